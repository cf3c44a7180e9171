#ifndef URYSOHN_CLI_CONFIG_HPP
#define URYSOHN_CLI_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urysohn/urysohn.hpp"

namespace urysohn::cli {

/// Bad or incomplete configuration. The message names the offending field.
class ConfigError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Inline scalar linear system: f = a x, K1 = b x, K2 = kernel(xi, s).
struct LinearSystemConfig {
  double a = 0.0;
  double b = 0.0;
  double kernel_scale = 1.0;
  std::optional<double> kernel_length; // set: scale * exp(-|xi-s|^2 / length^2), else constant
  double lambda = 0.0;
  double rho = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct RunConfig {
  std::string system_name;                 // builtin name, or "linear" for the inline form
  std::optional<LinearSystemConfig> linear;
  Index resolution = 64;
  std::vector<double> epsilons;
  std::size_t sample_count = 200;
  std::size_t cap = 100000;
  std::size_t random_members = 256;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  Index max_iter = 500;
  unsigned workers = 0;
  std::optional<double> R_star;
  std::optional<double> tau_cap;
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = true;
  std::string source; // raw config text, hashed into the manifest
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// The system a config describes.
SystemSpec<double> make_system(const RunConfig& cfg);

} // namespace urysohn::cli

#endif // URYSOHN_CLI_CONFIG_HPP
