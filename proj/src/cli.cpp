#include "rcdens/cli.hpp"

#include "rcdens/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace rcdens::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string
fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Typed access to one config object; remembers which keys were consumed
// so that leftovers can be reported.
class Section
{
public:
  Section(const json& j, std::string path)
    : j_(j)
    , path_(std::move(path))
  {
    if (!j_.is_object())
      throw ParameterError("config " + where() + ": expected an object");
  }

  void real(const char* key, double& out)
  {
    if (const auto* v = take(key)) {
      if (!v->is_number())
        fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  void boolean(const char* key, bool& out)
  {
    if (const auto* v = take(key)) {
      if (!v->is_boolean())
        fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const char* key, std::string& out)
  {
    if (const auto* v = take(key)) {
      if (!v->is_string())
        fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template<class T>
  void integer(const char* key, T& out, T lowest = std::numeric_limits<T>::min())
  {
    if (const auto* v = take(key))
      out = as_integer<T>(*v, key, lowest);
  }

  void pair(const char* key, std::array<double, 2>& out)
  {
    if (const auto* v = take(key))
      out = as_pair(*v, key);
  }

  void matrix(const char* key, std::array<std::array<double, 2>, 2>& out)
  {
    if (const auto* v = take(key)) {
      if (!v->is_array() || v->size() != 2)
        fail(key, "expected a 2x2 array");
      out = { as_pair((*v)[0], key), as_pair((*v)[1], key) };
    }
  }

  template<class T>
  void integers(const char* key, std::vector<T>& out, T lowest)
  {
    if (const auto* v = take(key)) {
      if (!v->is_array())
        fail(key, "expected an array of integers");
      out.clear();
      for (const auto& e : *v)
        out.push_back(as_integer<T>(e, key, lowest));
    }
  }

  const json* child(const char* key) { return take(key); }
  std::string path(const char* key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const
  {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key))
        throw ParameterError("unknown config key '" +
                             (path_.empty() ? key : path_ + "." + key) + "'");
  }

  [[noreturn]] void fail(const char* key, const std::string& msg) const
  {
    throw ParameterError("config key '" + path(key) + "': " + msg);
  }

private:
  const json* take(const char* key)
  {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where() const { return path_.empty() ? "root" : "'" + path_ + "'"; }

  template<class T>
  T as_integer(const json& v, const char* key, T lowest) const
  {
    if (!v.is_number_integer())
      fail(key, "expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
        fail(key, "value out of range");
      const auto t = static_cast<T>(u);
      if (t < lowest)
        fail(key, "must be >= " + std::to_string(lowest));
      return t;
    }
    const auto s = v.get<std::int64_t>();
    if (s < 0 && !std::numeric_limits<T>::is_signed)
      fail(key, "must be >= " + std::to_string(lowest));
    const auto t = static_cast<T>(s);
    if (t < lowest)
      fail(key, "must be >= " + std::to_string(lowest));
    return t;
  }

  std::array<double, 2> as_pair(const json& v, const char* key) const
  {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
        !v[1].is_number())
      fail(key, "expected a pair of numbers");
    return { v[0].get<double>(), v[1].get<double>() };
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void
require_one_of(Section& s,
               const char* key,
               const std::string& value,
               std::initializer_list<const char*> allowed)
{
  std::string list;
  for (const char* a : allowed) {
    if (value == a)
      return;
    list += list.empty() ? a : std::string(", ") + a;
  }
  s.fail(key, "'" + value + "' is not one of " + list);
}

// Config as recorded in reports. Output location and thread count do not
// affect results and are left out.
json
config_echo(const RunConfig& cfg)
{
  json j = to_json(cfg);
  j.erase("output_path");
  j.erase("threads");
  return j;
}

json
pair_json(const std::array<double, 2>& p)
{
  return json::array({ p[0], p[1] });
}

json
matrix_json(const std::array<std::array<double, 2>, 2>& m)
{
  return json::array({ pair_json(m[0]), pair_json(m[1]) });
}

Gaussian
to_gaussian(const std::array<double, 2>& mean,
            const std::array<std::array<double, 2>, 2>& cov)
{
  Gaussian g;
  g.mean = mean;
  g.cov = cov;
  return g;
}

CoefficientSpec
make_coeffs(const CoeffsConfig& c)
{
  if (c.family == "gaussian")
    return to_gaussian(c.mean, c.cov);
  if (c.family == "gaussian_mixture") {
    GaussianMixture m;
    for (const auto& comp : c.components)
      m.components.push_back({ comp.weight, to_gaussian(comp.mean, comp.cov) });
    return m;
  }
  return ProductCauchy{};
}

std::ofstream
open_output(const fs::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InvalidDataError("cannot write " + path.string());
  return out;
}

fs::path
output_dir(const RunConfig& cfg)
{
  const fs::path dir = cfg.output_path.empty() ? "." : cfg.output_path;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw InvalidDataError("cannot create output directory " + dir.string() +
                           ": " + ec.message());
  return dir;
}

void
write_json(const fs::path& path, const json& j)
{
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

double
median(std::vector<double> v)
{
  if (v.empty())
    return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1)
    return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double
mean(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

struct ErrorRow
{
  std::size_t replication;
  double estimate;
  double truth;
  double sq_error;
  double delta;
  double h;
};

// Pointwise risk records the target; sup risk records the grid point with
// the largest absolute error.
std::vector<ErrorRow>
error_rows(const RunConfig& cfg, const Scenario& scenario, std::size_t n)
{
  const bool sup = cfg.simulation.risk == "sup";
  const auto points = sup ? make_grid(cfg.grid)
                          : std::vector<EvalPoint>{ cfg.simulation.target };
  std::vector<double> truth(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    truth[i] = true_density(scenario.coeffs, points[i]);

  const auto reps = run_replications(scenario, points, n,
                                     cfg.simulation.replications, cfg.seed,
                                     cfg.threads);
  std::vector<ErrorRow> rows;
  rows.reserve(reps.size());
  for (const auto& rep : reps) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (std::abs(rep.estimates[i] - truth[i]) >
          std::abs(rep.estimates[worst] - truth[worst]))
        worst = i;
    const double e = rep.estimates[worst] - truth[worst];
    rows.push_back({ rep.replication, rep.estimates[worst], truth[worst],
                     e * e, rep.delta, rep.h[worst] });
  }
  return rows;
}

void
write_rows(std::ostream& out,
           const std::string& scenario_id,
           std::size_t n,
           const std::vector<ErrorRow>& rows)
{
  for (const auto& r : rows)
    out << scenario_id << ',' << n << ',' << r.replication << ','
        << fmt(r.estimate) << ',' << fmt(r.truth) << ',' << fmt(r.sq_error)
        << '\n';
}

std::vector<double>
column(const std::vector<ErrorRow>& rows, double ErrorRow::*field)
{
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows)
    v.push_back(r.*field);
  return v;
}

} // namespace

// ---------------------------------------------------------------------------

std::string
command_name(Command command)
{
  switch (command) {
    case Command::estimate:
      return "estimate";
    case Command::simulate:
      return "simulate";
    case Command::rates:
      return "rates";
    case Command::spacings_check:
      return "spacings-check";
  }
  return "estimate";
}

Command
parse_command(const std::string& name)
{
  for (auto c : { Command::estimate, Command::simulate, Command::rates,
                  Command::spacings_check })
    if (command_name(c) == name)
      return c;
  throw ParameterError("unknown command '" + name +
                       "' (expected estimate, simulate, rates or "
                       "spacings-check)");
}

RunConfig
parse_config(const json& j)
{
  RunConfig cfg;
  Section root(j, "");

  std::string command = command_name(cfg.command);
  root.text("command", command);
  cfg.command = parse_command(command);
  root.text("input_path", cfg.input_path);
  root.text("output_path", cfg.output_path);
  root.integer("seed", cfg.seed);
  root.integer("threads", cfg.threads, 1u);

  if (const auto* v = root.child("kernel")) {
    Section s(*v, root.path("kernel"));
    s.integer("ell", cfg.kernel.ell, 0);
    s.integer("quadrature_nodes", cfg.kernel.quadrature_nodes, 1);
    s.boolean("tabulated", cfg.kernel.tabulated);
    s.finish();
  }

  if (const auto* v = root.child("tuning")) {
    Section s(*v, root.path("tuning"));
    auto& t = cfg.tuning;
    s.text("mode", t.mode);
    require_one_of(s, "mode", t.mode, { "fixed", "oracle", "plugin", "lepski" });
    s.real("alpha", t.alpha);
    s.real("h", t.h);
    s.real("delta", t.delta);
    s.real("q", t.q);
    s.real("kappa_le", t.kappa_le);
    s.real("c_delta", t.c_delta);
    s.real("c_h", t.c_h);
    s.boolean("log_variant", t.log_variant);
    s.finish();
  }

  if (const auto* v = root.child("design")) {
    Section s(*v, root.path("design"));
    s.real("beta", cfg.design.beta);
    s.finish();
  }

  if (const auto* v = root.child("coeffs")) {
    Section s(*v, root.path("coeffs"));
    auto& c = cfg.coeffs;
    s.text("family", c.family);
    require_one_of(s, "family", c.family,
                   { "product_cauchy", "gaussian", "gaussian_mixture" });
    s.pair("mean", c.mean);
    s.matrix("cov", c.cov);
    if (const auto* comps = s.child("components")) {
      if (!comps->is_array())
        s.fail("components", "expected an array of objects");
      c.components.clear();
      for (std::size_t i = 0; i < comps->size(); ++i) {
        Section e((*comps)[i], s.path("components") + "[" +
                                 std::to_string(i) + "]");
        GaussianConfig g;
        e.real("weight", g.weight);
        e.pair("mean", g.mean);
        e.matrix("cov", g.cov);
        e.finish();
        c.components.push_back(g);
      }
    }
    s.finish();
  }

  if (const auto* v = root.child("grid")) {
    Section s(*v, root.path("grid"));
    auto& g = cfg.grid;
    s.real("a0_min", g.a0_min);
    s.real("a0_max", g.a0_max);
    s.integer("a0_count", g.a0_count, std::size_t{ 1 });
    s.real("a1_min", g.a1_min);
    s.real("a1_max", g.a1_max);
    s.integer("a1_count", g.a1_count, std::size_t{ 1 });
    if (const auto* pts = s.child("points")) {
      if (!pts->is_array())
        s.fail("points", "expected an array of [a0, a1] pairs");
      g.points.clear();
      for (const auto& p : *pts) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number())
          s.fail("points", "expected an array of [a0, a1] pairs");
        g.points.push_back({ p[0].get<double>(), p[1].get<double>() });
      }
    }
    s.finish();
  }

  if (const auto* v = root.child("simulation")) {
    Section s(*v, root.path("simulation"));
    auto& m = cfg.simulation;
    s.text("scenario_id", m.scenario_id);
    if (m.scenario_id.empty() ||
        m.scenario_id.find_first_of(",\"\n\r") != std::string::npos)
      s.fail("scenario_id", "must be non-empty without commas or quotes");
    s.integer("n", m.n, std::size_t{ 5 });
    s.integer("replications", m.replications, std::size_t{ 1 });
    s.integers("n_values", m.n_values, std::size_t{ 5 });
    std::array<double, 2> target{ m.target.a0, m.target.a1 };
    s.pair("target", target);
    m.target = { target[0], target[1] };
    s.text("risk", m.risk);
    require_one_of(s, "risk", m.risk, { "pointwise", "sup" });
    s.finish();
  }

  if (const auto* v = root.child("spacings")) {
    Section s(*v, root.path("spacings"));
    auto& p = cfg.spacings;
    s.integer("n", p.n, std::size_t{ 2 });
    s.real("delta", p.delta);
    s.real("kappa", p.kappa);
    s.integer("replications", p.replications, std::size_t{ 1 });
    s.finish();
  }

  if (const auto* v = root.child("estimator")) {
    Section s(*v, root.path("estimator"));
    s.boolean("clip_negative", cfg.clip_negative);
    s.finish();
  }

  root.finish();
  return cfg;
}

json
to_json(const RunConfig& cfg)
{
  json components = json::array();
  for (const auto& c : cfg.coeffs.components)
    components.push_back({ { "weight", c.weight },
                           { "mean", pair_json(c.mean) },
                           { "cov", matrix_json(c.cov) } });
  json points = json::array();
  for (const auto& p : cfg.grid.points)
    points.push_back(json::array({ p.a0, p.a1 }));

  const auto& t = cfg.tuning;
  const auto& g = cfg.grid;
  const auto& m = cfg.simulation;
  const auto& s = cfg.spacings;
  return json{
    { "command", command_name(cfg.command) },
    { "input_path", cfg.input_path },
    { "output_path", cfg.output_path },
    { "seed", cfg.seed },
    { "threads", cfg.threads },
    { "kernel",
      { { "ell", cfg.kernel.ell },
        { "quadrature_nodes", cfg.kernel.quadrature_nodes },
        { "tabulated", cfg.kernel.tabulated } } },
    { "tuning",
      { { "mode", t.mode },
        { "alpha", t.alpha },
        { "h", t.h },
        { "delta", t.delta },
        { "q", t.q },
        { "kappa_le", t.kappa_le },
        { "c_delta", t.c_delta },
        { "c_h", t.c_h },
        { "log_variant", t.log_variant } } },
    { "design", { { "beta", cfg.design.beta } } },
    { "coeffs",
      { { "family", cfg.coeffs.family },
        { "mean", pair_json(cfg.coeffs.mean) },
        { "cov", matrix_json(cfg.coeffs.cov) },
        { "components", components } } },
    { "grid",
      { { "a0_min", g.a0_min },
        { "a0_max", g.a0_max },
        { "a0_count", g.a0_count },
        { "a1_min", g.a1_min },
        { "a1_max", g.a1_max },
        { "a1_count", g.a1_count },
        { "points", points } } },
    { "simulation",
      { { "scenario_id", m.scenario_id },
        { "n", m.n },
        { "replications", m.replications },
        { "n_values", m.n_values },
        { "target", json::array({ m.target.a0, m.target.a1 }) },
        { "risk", m.risk } } },
    { "spacings",
      { { "n", s.n },
        { "delta", s.delta },
        { "kappa", s.kappa },
        { "replications", s.replications } } },
    { "estimator", { { "clip_negative", cfg.clip_negative } } },
  };
}

Scenario
make_scenario(const RunConfig& cfg)
{
  Scenario sc;
  sc.id = cfg.simulation.scenario_id;
  sc.design = cfg.design;
  sc.coeffs = make_coeffs(cfg.coeffs);
  sc.kernel = make_weight(cfg.kernel.ell, cfg.kernel.quadrature_nodes);
  sc.kernel_mode =
    cfg.kernel.tabulated ? KernelMode::tabulated : KernelMode::quadrature;
  const auto& t = cfg.tuning;
  if (t.mode == "oracle")
    sc.tuning = OracleTuning{ t.alpha, t.c_delta, t.c_h, t.log_variant };
  else if (t.mode == "plugin")
    sc.tuning = PluginTuning{ t.alpha };
  else if (t.mode == "lepski")
    sc.tuning = LepskiTuning{ LepskiConfig{ t.q, t.kappa_le } };
  else
    sc.tuning = FixedTuning{ t.h, t.delta };
  validate(sc);
  return sc;
}

std::vector<EvalPoint>
make_grid(const GridConfig& grid)
{
  if (!grid.points.empty())
    return grid.points;
  return rectangular_grid(grid.a0_min, grid.a0_max, grid.a0_count,
                          grid.a1_min, grid.a1_max, grid.a1_count);
}

// ---------------------------------------------------------------------------

void
cmd_estimate(const RunConfig& cfg, std::ostream& log)
{
  if (cfg.input_path.empty())
    throw ParameterError("estimate needs an input CSV (--input or input_path)");
  const auto& t = cfg.tuning;
  if (t.mode == "oracle")
    throw ParameterError("tuning mode 'oracle' needs the true design; use "
                         "fixed, plugin or lepski for data");

  const auto data = to_polar(read_csv(fs::path(cfg.input_path)));
  const std::size_t n = data.size();
  if (n < 5)
    throw SampleSizeError("estimate needs at least 5 observations, got " +
                          std::to_string(n));
  const Kernel kernel(make_weight(cfg.kernel.ell, cfg.kernel.quadrature_nodes),
                      cfg.kernel.tabulated ? KernelMode::tabulated
                                           : KernelMode::quadrature);
  const auto grid = make_grid(cfg.grid);
  std::vector<double> values;

  log << "n = " << n << '\n';
  if (t.mode == "fixed") {
    const EstimatorConfig ec{ t.h, t.delta };
    values = estimate_grid(data, kernel, ec, grid);
    log << "delta = " << fmt(ec.delta) << "\nh = " << fmt(ec.h) << '\n';
  } else {
    const auto sel = select_delta(data);
    log << "delta_hat = " << fmt(sel.delta_hat)
        << "\ncriterion = " << fmt(sel.criterion_value) << '\n';
    if (t.mode == "plugin") {
      const double h = select_h_known_alpha(sel.criterion_value, t.alpha);
      values = estimate_grid(data, kernel, { h, sel.delta_hat }, grid);
      log << "h_hat = " << fmt(h) << '\n';
    } else {
      const LepskiConfig lc{ t.q, t.kappa_le };
      const WindowTerms terms(data, sel.delta_hat);
      int k_min = std::numeric_limits<int>::max();
      int k_max = std::numeric_limits<int>::min();
      for (const auto& a : grid) {
        const auto res = lepski_select(terms, n, sel, a, kernel, lc);
        values.push_back(res.estimate);
        k_min = std::min(k_min, res.k_hat);
        k_max = std::max(k_max, res.k_hat);
      }
      log << "K = " << lepski_grid_size(n, lc.q) << "\nk_hat = " << k_min;
      if (k_max != k_min)
        log << ".." << k_max;
      log << '\n';
    }
  }

  const auto path = output_dir(cfg) / "estimate.csv";
  auto out = open_output(path);
  out << "a0,a1,estimate\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = cfg.clip_negative ? std::max(values[i], 0.0) : values[i];
    out << fmt(grid[i].a0) << ',' << fmt(grid[i].a1) << ',' << fmt(v) << '\n';
  }
  log << "wrote " << path.string() << '\n';
}

void
cmd_simulate(const RunConfig& cfg, std::ostream& log)
{
  const auto scenario = make_scenario(cfg);
  const std::size_t n = cfg.simulation.n;
  const auto rows = error_rows(cfg, scenario, n);
  const auto dir = output_dir(cfg);

  auto csv = open_output(dir / "replications.csv");
  csv << "scenario_id,n,replication,estimate,truth,sq_error\n";
  write_rows(csv, scenario.id, n, rows);

  const auto sq = column(rows, &ErrorRow::sq_error);
  const json summary{
    { "scenario_id", scenario.id },
    { "family", family_name(scenario.coeffs) },
    { "tuning", tuning_name(scenario.tuning) },
    { "risk", cfg.simulation.risk },
    { "n", n },
    { "replications", rows.size() },
    { "seed", cfg.seed },
    { "mse", mean(sq) },
    { "median_sq_error", median(sq) },
    { "mean_estimate", mean(column(rows, &ErrorRow::estimate)) },
    { "median_delta", median(column(rows, &ErrorRow::delta)) },
    { "median_h", median(column(rows, &ErrorRow::h)) },
    { "config", config_echo(cfg) },
  };
  write_json(dir / "summary.json", summary);
  log << "scenario " << scenario.id << ": n = " << n << ", mse = "
      << fmt(mean(sq)) << '\n'
      << "wrote " << (dir / "replications.csv").string() << " and "
      << (dir / "summary.json").string() << '\n';
}

void
cmd_rates(const RunConfig& cfg, std::ostream& log)
{
  auto distinct = cfg.simulation.n_values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4)
    throw InsufficientDataError(
      "rates needs at least 4 distinct sample sizes in simulation.n_values, "
      "got " + std::to_string(distinct.size()));

  const auto scenario = make_scenario(cfg);
  const auto dir = output_dir(cfg);
  auto csv = open_output(dir / "replications.csv");
  csv << "scenario_id,n,replication,estimate,truth,sq_error\n";

  std::vector<std::pair<double, double>> n_mse;
  std::vector<double> medians;
  for (const auto n : cfg.simulation.n_values) {
    const auto rows = error_rows(cfg, scenario, n);
    write_rows(csv, scenario.id, n, rows);
    const auto sq = column(rows, &ErrorRow::sq_error);
    n_mse.emplace_back(static_cast<double>(n), mean(sq));
    medians.push_back(median(sq));
    log << "n = " << n << ": mse = " << fmt(n_mse.back().second) << '\n';
  }
  const auto report = rate_fit(n_mse, cfg.tuning.alpha, cfg.design.beta);

  auto summary = open_output(dir / "rates_summary.csv");
  summary << "n,mse,median_sq_error\n";
  for (std::size_t i = 0; i < n_mse.size(); ++i)
    summary << cfg.simulation.n_values[i] << ',' << fmt(n_mse[i].second) << ','
            << fmt(medians[i]) << '\n';

  write_json(dir / "rates.json",
             json{
               { "scenario_id", scenario.id },
               { "tuning", tuning_name(scenario.tuning) },
               { "risk", cfg.simulation.risk },
               { "seed", cfg.seed },
               { "replications", cfg.simulation.replications },
               { "n_values", cfg.simulation.n_values },
               { "mse", report.mse },
               { "median_sq_error", medians },
               { "slope", report.slope },
               { "slope_se", report.slope_se },
               { "theory_slope", report.theory_slope },
               { "config", config_echo(cfg) },
             });

  auto gp = open_output(dir / "rates.gp");
  gp << "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'n'\n"
        "set ylabel 'squared error'\n"
        "set key top right\n"
        "set terminal pngcairo size 800,600\n"
        "set output 'rates.png'\n"
        "plot 'rates_summary.csv' using 1:2 skip 1 with linespoints title "
        "'mse', \\\n"
        "     'rates_summary.csv' using 1:3 skip 1 with linespoints title "
        "'median', \\\n"
        "     "
     << fmt(n_mse.front().second) << "*(x/" << fmt(n_mse.front().first)
     << ")**(" << fmt(report.theory_slope) << ") title 'theory'\n";

  log << "slope = " << fmt(report.slope) << " (se " << fmt(report.slope_se)
      << "), theory_slope = " << fmt(report.theory_slope) << '\n'
      << "wrote " << (dir / "rates.json").string() << '\n';
}

void
cmd_spacings_check(const RunConfig& cfg, std::ostream& log)
{
  const auto& s = cfg.spacings;
  const auto check = spacings_bound_check(cfg.design, s.n, s.delta, s.kappa,
                                          s.replications, cfg.seed,
                                          cfg.threads);
  const auto dir = output_dir(cfg);
  write_json(dir / "spacings.json",
             json{
               { "beta", cfg.design.beta },
               { "n", s.n },
               { "delta", s.delta },
               { "kappa", s.kappa },
               { "replications", s.replications },
               { "seed", cfg.seed },
               { "empirical", check.empirical },
               { "bound", check.bound },
               { "holds", check.holds },
               { "c_z", check.params.c_z },
               { "C_z", check.params.C_z },
               { "config", config_echo(cfg) },
             });
  log << "empirical = " << fmt(check.empirical) << "\nbound = "
      << fmt(check.bound) << "\nholds = " << (check.holds ? "true" : "false")
      << '\n';
}

// ---------------------------------------------------------------------------

int
run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Density estimation for random coefficient regression "
                "Y = A0 + A1 X" };
  app.name("rcdens");

  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output;
  std::string input;
  bool print_config = false;
  app.add_option("command", command,
                 "estimate | simulate | rates | spacings-check")
    ->check(CLI::IsMember({ "estimate", "simulate", "rates", "spacings-check" }));
  app.add_option("--config", config_path, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* threads_opt =
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* output_opt = app.add_option("--output", output, "output directory");
  auto* input_opt = app.add_option("--input", input, "input CSV with columns x,y");
  app.add_flag("--print-config", print_config,
               "print the resolved configuration and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw ParameterError("cannot open config file " + config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ParameterError("config file " + config_path + ": " + e.what());
      }
      cfg = parse_config(j);
    }
    if (!command.empty())
      cfg.command = parse_command(command);
    if (seed_opt->count())
      cfg.seed = seed;
    if (threads_opt->count())
      cfg.threads = threads;
    if (output_opt->count())
      cfg.output_path = output;
    if (input_opt->count())
      cfg.input_path = input;

    if (print_config) {
      out << to_json(cfg).dump(2) << '\n';
      return 0;
    }
    switch (cfg.command) {
      case Command::estimate:
        cmd_estimate(cfg, out);
        break;
      case Command::simulate:
        cmd_simulate(cfg, out);
        break;
      case Command::rates:
        cmd_rates(cfg, out);
        break;
      case Command::spacings_check:
        cmd_spacings_check(cfg, out);
        break;
    }
    return 0;
  } catch (const UnsupportedRegimeError& e) {
    err << "error: unsupported regime: " << e.what() << '\n';
    return 4;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

} // namespace rcdens::cli
