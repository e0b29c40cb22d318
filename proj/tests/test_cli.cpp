#include "rcdens/cli.hpp"
#include "rcdens/errors.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <sys/wait.h>

using namespace rcdens;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct TempDir
{
  fs::path path;
  TempDir()
  {
    std::string tmpl = (fs::temp_directory_path() / "rcdens_cli_XXXXXX").string();
    path = ::mkdtemp(tmpl.data());
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), {} };
}

void
write(const fs::path& p, const std::string& text)
{
  std::ofstream(p, std::ios::binary) << text;
}

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result
run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return { code, out.str(), err.str() };
}

void
write_config(const fs::path& p, const std::function<void(json&)>& edit)
{
  json j = cli::to_json(cli::RunConfig{});
  edit(j);
  write(p, j.dump(2));
}

std::string
g17(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string
sample_csv()
{
  std::ostringstream s;
  s << "x,y\n";
  auto rng = make_stream(3);
  const auto data = sample_model(DesignSpec{}, Gaussian{}, 200, rng);
  for (const auto& o : data.pairs())
    s << g17(o.x) << ',' << g17(o.y) << '\n';
  return s.str();
}

} // namespace

TEST_CASE("config round trip")
{
  const cli::RunConfig defaults;
  const json j = cli::to_json(defaults);
  CHECK(cli::to_json(cli::parse_config(j)) == j);

  json custom = j;
  custom["coeffs"]["family"] = "gaussian_mixture";
  custom["coeffs"]["components"] = json::array(
    { { { "weight", 0.4 }, { "mean", { 1, 0 } }, { "cov", { { 1, 0 }, { 0, 1 } } } },
      { { "weight", 0.6 }, { "mean", { 0, 1 } }, { "cov", { { 2, 0.1 }, { 0.1, 1 } } } } });
  custom["grid"]["points"] = json::array({ { 0.5, 0.25 } });
  custom["seed"] = 18446744073709551615ull;
  CHECK(cli::to_json(cli::parse_config(custom)) == custom);
  CHECK(cli::parse_config(json::object()).seed == defaults.seed);
}

TEST_CASE("config rejects unknown keys and bad values")
{
  json j = cli::to_json(cli::RunConfig{});
  j["kernel"]["elll"] = 4;
  CHECK_THROWS_WITH(cli::parse_config(j),
                    Catch::Matchers::ContainsSubstring("kernel.elll"));
  j = cli::to_json(cli::RunConfig{});
  j["extra"] = 1;
  CHECK_THROWS_AS(cli::parse_config(j), ParameterError);
  j = cli::to_json(cli::RunConfig{});
  j["kernel"]["ell"] = 2.5;
  CHECK_THROWS_AS(cli::parse_config(j), ParameterError);
  j = cli::to_json(cli::RunConfig{});
  j["tuning"]["mode"] = "magic";
  CHECK_THROWS_AS(cli::parse_config(j), ParameterError);
  j = cli::to_json(cli::RunConfig{});
  j["simulation"]["replications"] = -3;
  CHECK_THROWS_AS(cli::parse_config(j), ParameterError);
  j = cli::to_json(cli::RunConfig{});
  j["coeffs"]["components"] = json::array({ { { "weight", 1.0 }, { "bogus", 0 } } });
  CHECK_THROWS_WITH(cli::parse_config(j),
                    Catch::Matchers::ContainsSubstring("components[0].bogus"));
}

TEST_CASE("estimate passthrough and determinism")
{
  TempDir tmp;
  write(tmp.path / "data.csv", sample_csv());
  write_config(tmp.path / "c.json", [&](json& j) {
    j["input_path"] = (tmp.path / "data.csv").string();
    j["grid"]["points"] = json::array({ { 0.1, -0.2 } });
  });
  const auto cfg = (tmp.path / "c.json").string();
  const auto r1 = run({ "estimate", "--config", cfg, "--output", (tmp.path / "a").string() });
  REQUIRE(r1.code == 0);
  const auto r2 = run({ "estimate", "--config", cfg, "--output", (tmp.path / "b").string() });
  REQUIRE(r2.code == 0);
  const auto a = slurp(tmp.path / "a" / "estimate.csv");
  CHECK(a == slurp(tmp.path / "b" / "estimate.csv"));

  const auto data = to_polar(read_csv(tmp.path / "data.csv"));
  const Kernel k(make_weight(4));
  const double expected = estimate_point(data, k, { 0.5, 0.1 }, { 0.1, -0.2 });
  std::istringstream rows(a);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  CHECK(header == "a0,a1,estimate");
  CHECK(std::stod(row.substr(row.rfind(',') + 1)) == expected);
  CHECK_FALSE(std::getline(rows, row));
}

TEST_CASE("estimate with data-driven tuning")
{
  TempDir tmp;
  write(tmp.path / "data.csv", sample_csv());
  for (const char* mode : { "plugin", "lepski" }) {
    write_config(tmp.path / "c.json", [&](json& j) {
      j["input_path"] = (tmp.path / "data.csv").string();
      j["tuning"]["mode"] = mode;
      j["grid"]["a0_count"] = 3;
      j["grid"]["a1_count"] = 2;
    });
    const auto r = run({ "estimate", "--config", (tmp.path / "c.json").string(),
                         "--output", tmp.path.string() });
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("delta_hat = "));
    const auto csv = slurp(tmp.path / "estimate.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  }
}

TEST_CASE("estimate data errors")
{
  TempDir tmp;
  write(tmp.path / "bad.csv", "x,y\n1,1\n2,2\n3,3\n4,4\n5,5\nabc,1.0\n");
  auto r = run({ "estimate", "--input", (tmp.path / "bad.csv").string(),
                 "--output", tmp.path.string() });
  CHECK(r.code == 3);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("line 7"));

  r = run({ "estimate", "--input", (tmp.path / "missing.csv").string() });
  CHECK(r.code == 3);

  write(tmp.path / "small.csv", "1,1\n2,2\n3,3\n4,4\n");
  r = run({ "estimate", "--input", (tmp.path / "small.csv").string(),
            "--output", tmp.path.string() });
  CHECK(r.code == 3);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("at least 5"));
}

TEST_CASE("simulate")
{
  TempDir tmp;
  write_config(tmp.path / "c.json", [](json& j) {
    j["simulation"]["replications"] = 1;
    j["simulation"]["n"] = 300;
    j["tuning"]["mode"] = "oracle";
  });
  const auto cfg = (tmp.path / "c.json").string();
  REQUIRE(run({ "simulate", "--config", cfg, "--seed", "9", "--output",
                (tmp.path / "a").string() }).code == 0);
  REQUIRE(run({ "simulate", "--config", cfg, "--seed", "9", "--output",
                (tmp.path / "b").string() }).code == 0);
  const auto csv = slurp(tmp.path / "a" / "replications.csv");
  CHECK(csv.rfind("scenario_id,n,replication,estimate,truth,sq_error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv == slurp(tmp.path / "b" / "replications.csv"));
  const auto summary = slurp(tmp.path / "a" / "summary.json");
  CHECK(summary == slurp(tmp.path / "b" / "summary.json"));
  CHECK(json::parse(summary)["seed"] == 9);
}

TEST_CASE("unsupported regime")
{
  TempDir tmp;
  write_config(tmp.path / "c.json", [](json& j) {
    j["design"]["beta"] = 0.5;
    j["tuning"]["mode"] = "plugin";
  });
  const auto r = run({ "simulate", "--config", (tmp.path / "c.json").string(),
                       "--output", tmp.path.string() });
  CHECK(r.code == 4);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("beta > 1"));
}

TEST_CASE("rates")
{
  TempDir tmp;
  write_config(tmp.path / "c.json", [](json& j) {
    j["tuning"]["mode"] = "oracle";
    j["kernel"]["tabulated"] = true;
    j["simulation"]["replications"] = 10;
    j["simulation"]["n_values"] = { 1000, 3000, 10000, 30000 };
  });
  const auto cfg = (tmp.path / "c.json").string();
  REQUIRE(run({ "rates", "--config", cfg, "--output", (tmp.path / "a").string() }).code == 0);
  REQUIRE(run({ "rates", "--config", cfg, "--output", (tmp.path / "b").string() }).code == 0);
  const auto report = json::parse(slurp(tmp.path / "a" / "rates.json"));
  CHECK(report["theory_slope"].get<double>() == Catch::Approx(-1.0 / 3.0));
  CHECK(slurp(tmp.path / "a" / "rates.json") == slurp(tmp.path / "b" / "rates.json"));
  CHECK(fs::exists(tmp.path / "a" / "rates_summary.csv"));
  CHECK(fs::exists(tmp.path / "a" / "rates.gp"));

  write_config(tmp.path / "c3.json", [](json& j) {
    j["tuning"]["mode"] = "oracle";
    j["simulation"]["n_values"] = { 1000, 3000, 10000 };
  });
  const auto r = run({ "rates", "--config", (tmp.path / "c3.json").string(),
                       "--output", tmp.path.string() });
  CHECK(r.code == 2);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("at least 4"));
}

TEST_CASE("spacings check")
{
  TempDir tmp;
  const auto r = run({ "spacings-check", "--output", tmp.path.string() });
  REQUIRE(r.code == 0);
  const auto report = json::parse(slurp(tmp.path / "spacings.json"));
  CHECK(report["holds"] == true);
}

TEST_CASE("print-config round trips through the executable")
{
  TempDir tmp;
  const auto r = run({ "simulate", "--seed", "44", "--threads", "2",
                       "--output", tmp.path.string(), "--print-config" });
  REQUIRE(r.code == 0);
  write(tmp.path / "printed.json", r.out);
  const auto again = run({ "--config", (tmp.path / "printed.json").string(),
                           "--print-config" });
  CHECK(again.out == r.out);
  CHECK(json::parse(r.out)["command"] == "simulate");

  const std::string exe = RCDENS_CLI_PATH;
  auto status = [](const std::string& cmd) {
    return WEXITSTATUS(std::system((cmd + " >/dev/null 2>&1").c_str()));
  };
  CHECK(status(exe + " --print-config") == 0);
  CHECK(status(exe + " bogus") == 2);
  CHECK(status(exe + " estimate --config /nonexistent.json") == 2);
  write(tmp.path / "broken.json", "{ not json");
  CHECK(status(exe + " --config " + (tmp.path / "broken.json").string()) == 2);
}
