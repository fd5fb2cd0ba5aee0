#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sse/dynamics.hpp"
#include "sse/model.hpp"

namespace sse::cli {

enum class Command { eigenprofile, ratio_sweep, scaling_study, nh_compare, noise_spectrum, estimator };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

std::string to_string(InitMode m);
InitMode init_from_string(const std::string& name);

/// Fully resolved parameters of one run. Omega values are absolute.
struct RunConfig {
  Command command = Command::ratio_sweep;
  SystemParams params;
  std::vector<double> omegas;
  std::vector<std::size_t> n_list;
  double t_max_tr = 25.0;
  std::size_t ensemble = 200;
  std::uint64_t seed = 1;
  InitMode init = InitMode::random;
  double temperature = 1.0;
  std::size_t realizations = 64;
  double noise_dt = 0.0;
  double t_max_gamma = 400.0;
  bool threshold = false;
  bool full_ratio = true;
  bool svg = false;

  /// Throws InvalidArgument on an inconsistent bundle.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// FNV-1a over the canonical JSON dump of the config, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Raw command-line choices before resolution against the model.
struct ModelOptions {
  std::optional<std::size_t> n_bath;
  std::optional<double> delta_omega;
  std::optional<double> g;
  std::optional<double> gamma;
  double omega0 = 0.0;
};

inline constexpr double default_gamma = 0.02;
inline constexpr std::size_t default_n_bath = 400;

/// Desk defaults: N = 400, N*dw = 1, gamma = 0.02. Explicit g and gamma
/// together are a config error.
SystemParams resolve_params(const ModelOptions& o);

/// `lo:hi:count` inclusive grid with count >= 2 (or count = 1 with lo = hi).
std::vector<double> parse_grid(const std::string& spec);

/// Scales values given in units of Omega_SSE; `abs` leaves them unchanged.
std::vector<double> resolve_omegas(std::vector<double> values, const std::string& units,
                                   const SystemParams& p);

/// Command-specific default Omega values, in units of Omega_SSE.
std::vector<double> default_omegas_sse(Command c);

/// Command-specific default horizon in units of T_R.
double default_t_max_tr(Command c);

}  // namespace sse::cli
