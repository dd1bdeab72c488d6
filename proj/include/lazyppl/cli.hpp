#ifndef LAZYPPL_CLI_HPP_
#define LAZYPPL_CLI_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace lazyppl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunConfig {
  std::string model;
  std::string kernel = "all-sites";  // all-sites | single-site | mix
  double p = 0.5;
  double mix_r = 0.1;
  std::size_t steps = 10000;
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  std::string dataset;
  double grid_min = 0.0;
  double grid_max = 10.0;
  std::size_t grid_points = 101;
  std::size_t draws = 50;
  std::string output = "samples.csv";
  std::string format = "csv";  // csv | json
  std::size_t chains = 1;
  std::optional<double> sigma;
  double rate = 0.2;
  double alpha = 1.0;
};

// Thrown for invalid flag combinations; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate(const RunConfig& config);

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

// Runs the model and writes the samples file(s) and the summary. Returns
// the summary.
nlohmann::ordered_json run(const RunConfig& config);

// One line per model: id, description, inputs (tab separated).
void list(std::ostream& out);

// Per-column diagnostics of a samples file written by `run` (CSV or JSON).
nlohmann::ordered_json diagnose(const std::string& path);

// Output locations for chain `c` of `chains`.
std::string samples_path(const RunConfig& config, std::size_t chain);
std::string summary_path(const RunConfig& config);

// Full command line entry point.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

}  // namespace lazyppl::cli

#endif  // LAZYPPL_CLI_HPP_
