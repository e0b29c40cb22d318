#pragma once

#include "rcdens/estimator.hpp"
#include "rcdens/simulate.hpp"
#include "rcdens/tuning.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcdens::cli {

enum class Command
{
  estimate,
  simulate,
  rates,
  spacings_check
};

std::string command_name(Command command);
Command parse_command(const std::string& name);

struct KernelConfig
{
  int ell = 4;
  int quadrature_nodes = 48;
  bool tabulated = false;
};

//! mode: fixed, oracle, plugin or lepski.
struct TuningConfig
{
  std::string mode = "fixed";
  double alpha = 2.0;
  double h = 0.5;
  double delta = 0.1;
  double q = 1.25;
  double kappa_le = 400.0;
  double c_delta = 1.0;
  double c_h = 1.0;
  bool log_variant = false;
};

struct GaussianConfig
{
  double weight = 1.0;
  std::array<double, 2> mean{ 0.0, 0.0 };
  std::array<std::array<double, 2>, 2> cov{ { { 1.0, 0.0 }, { 0.0, 1.0 } } };
};

//! family: product_cauchy, gaussian or gaussian_mixture.
struct CoeffsConfig
{
  std::string family = "product_cauchy";
  std::array<double, 2> mean{ 0.0, 0.0 };
  std::array<std::array<double, 2>, 2> cov{ { { 1.0, 0.0 }, { 0.0, 1.0 } } };
  std::vector<GaussianConfig> components;
};

//! Explicit `points` replace the rectangular grid when non-empty.
struct GridConfig
{
  double a0_min = -1.0;
  double a0_max = 1.0;
  std::size_t a0_count = 11;
  double a1_min = -1.0;
  double a1_max = 1.0;
  std::size_t a1_count = 11;
  std::vector<EvalPoint> points;
};

//! risk: pointwise (squared error at `target`) or sup (squared max error
//! over the grid).
struct SimulationConfig
{
  std::string scenario_id = "default";
  std::size_t n = 1000;
  std::size_t replications = 100;
  std::vector<std::size_t> n_values{ 1000, 3000, 10000, 30000 };
  EvalPoint target{ 0.0, 0.0 };
  std::string risk = "pointwise";
};

struct SpacingsConfig
{
  std::size_t n = 1000;
  double delta = 0.1;
  double kappa = 2.0;
  std::size_t replications = 500;
};

struct RunConfig
{
  Command command = Command::estimate;
  std::string input_path;
  std::string output_path = "rcdens_out";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  KernelConfig kernel;
  TuningConfig tuning;
  DesignSpec design;
  CoeffsConfig coeffs;
  GridConfig grid;
  SimulationConfig simulation;
  SpacingsConfig spacings;
  bool clip_negative = false;
};

//! Reads a config on top of the defaults. Unknown keys and ill-typed
//! values raise ParameterError.
RunConfig parse_config(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const RunConfig& cfg);

Scenario make_scenario(const RunConfig& cfg);
std::vector<EvalPoint> make_grid(const GridConfig& grid);

//! Each command writes its files under cfg.output_path and logs
//! diagnostics to `log`. Errors propagate as rcdens::Error.
void cmd_estimate(const RunConfig& cfg, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_rates(const RunConfig& cfg, std::ostream& log);
void cmd_spacings_check(const RunConfig& cfg, std::ostream& log);

//! Exit codes: 0 success, 2 config error, 3 data error, 4 unsupported regime.
int run(const std::vector<std::string>& args,
        std::ostream& out,
        std::ostream& err);

} // namespace rcdens::cli
