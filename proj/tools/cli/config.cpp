#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "sse/errors.hpp"

namespace sse::cli {

namespace {

constexpr std::pair<Command, const char*> command_names[] = {
    {Command::eigenprofile, "eigenprofile"},   {Command::ratio_sweep, "ratio-sweep"},
    {Command::scaling_study, "scaling-study"}, {Command::nh_compare, "nh-compare"},
    {Command::noise_spectrum, "noise-spectrum"}, {Command::estimator, "estimator"},
};

constexpr std::pair<InitMode, const char*> init_names[] = {
    {InitMode::random, "random"}, {InitMode::unit, "unit"}, {InitMode::eigenplus, "eigenplus"}};

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

template <class T>
T get(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("config is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [k, name] : command_names)
    if (k == c) return name;
  return "?";
}

Command command_from_string(const std::string& name) {
  for (const auto& [k, n] : command_names)
    if (name == n) return k;
  throw InvalidArgument("unknown command '" + name + "'");
}

std::string to_string(InitMode m) {
  for (const auto& [k, name] : init_names)
    if (k == m) return name;
  return "?";
}

InitMode init_from_string(const std::string& name) {
  for (const auto& [k, n] : init_names)
    if (name == n) return k;
  throw InvalidArgument("unknown init mode '" + name + "'");
}

void RunConfig::validate() const {
  params.validate();
  if (omegas.empty()) throw InvalidArgument("empty Omega list");
  for (double w : omegas)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("Omega values must be >= 0");
  for (std::size_t n : n_list)
    if (n < 1) throw InvalidArgument("n_list entries must be >= 1");
  if (!(t_max_tr > 0.0)) throw InvalidArgument("t_max_tr must be > 0");
  if (init == InitMode::random && ensemble < 1) throw InvalidArgument("ensemble must be >= 1");
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
  if (realizations < 1) throw InvalidArgument("realizations must be >= 1");
  if (!(noise_dt >= 0.0)) throw InvalidArgument("dt must be >= 0");
  if (!(t_max_gamma > 0.0)) throw InvalidArgument("t_max_gamma must be > 0");
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = to_string(c.command);
  j["n_bath"] = c.params.n_bath;
  j["delta_omega"] = c.params.delta_omega;
  j["g"] = c.params.g;
  j["omega0"] = c.params.omega0;
  j["omegas"] = c.omegas;
  j["n_list"] = c.n_list;
  j["t_max_tr"] = c.t_max_tr;
  j["ensemble"] = c.ensemble;
  j["seed"] = c.seed;
  j["init"] = to_string(c.init);
  j["temperature"] = c.temperature;
  j["realizations"] = c.realizations;
  j["noise_dt"] = c.noise_dt;
  j["t_max_gamma"] = c.t_max_gamma;
  j["threshold"] = c.threshold;
  j["full_ratio"] = c.full_ratio;
  j["svg"] = c.svg;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  RunConfig c;
  c.command = command_from_string(get<std::string>(j, "command"));
  c.params.n_bath = get<std::size_t>(j, "n_bath");
  c.params.delta_omega = get<double>(j, "delta_omega");
  c.params.g = get<double>(j, "g");
  c.params.omega0 = get<double>(j, "omega0");
  c.omegas = get<std::vector<double>>(j, "omegas");
  c.n_list = get<std::vector<std::size_t>>(j, "n_list");
  c.t_max_tr = get<double>(j, "t_max_tr");
  c.ensemble = get<std::size_t>(j, "ensemble");
  c.seed = get<std::uint64_t>(j, "seed");
  c.init = init_from_string(get<std::string>(j, "init"));
  c.temperature = get<double>(j, "temperature");
  c.realizations = get<std::size_t>(j, "realizations");
  c.noise_dt = get<double>(j, "noise_dt");
  c.t_max_gamma = get<double>(j, "t_max_gamma");
  c.threshold = get<bool>(j, "threshold");
  c.full_ratio = get<bool>(j, "full_ratio");
  c.svg = get<bool>(j, "svg");
  c.params.omega_big = c.omegas.empty() ? 0.0 : c.omegas.front();
  c.validate();
  return c;
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemParams resolve_params(const ModelOptions& o) {
  if (o.g && o.gamma) throw InvalidArgument("give either --g or --gamma, not both");
  SystemParams p;
  p.n_bath = o.n_bath.value_or(default_n_bath);
  if (p.n_bath < 1) throw InvalidArgument("n_bath must be >= 1");
  p.delta_omega = o.delta_omega.value_or(1.0 / static_cast<double>(p.n_bath));
  if (!(p.delta_omega > 0.0)) throw InvalidArgument("delta_omega must be > 0");
  p.g = o.g ? *o.g : coupling_for_gamma(o.gamma.value_or(default_gamma), p.delta_omega);
  p.omega0 = o.omega0;
  p.validate();
  return p;
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos || spec.find(':', b + 1) != std::string::npos)
    throw InvalidArgument("grid must be lo:hi:count, got '" + spec + "'");
  const double lo = parse_double(spec.substr(0, a));
  const double hi = parse_double(spec.substr(a + 1, b - a - 1));
  const std::string count_s = spec.substr(b + 1);
  std::size_t count = 0;
  const auto [ptr, ec] = std::from_chars(count_s.data(), count_s.data() + count_s.size(), count);
  if (ec != std::errc{} || ptr != count_s.data() + count_s.size() || count < 1)
    throw InvalidArgument("grid count must be a positive integer, got '" + count_s + "'");
  if (count == 1) {
    if (lo != hi) throw InvalidArgument("a one-point grid needs lo == hi");
    return {lo};
  }
  if (!(hi > lo)) throw InvalidArgument("grid needs hi > lo");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  v.back() = hi;
  return v;
}

std::vector<double> resolve_omegas(std::vector<double> values, const std::string& units,
                                   const SystemParams& p) {
  if (units == "abs") return values;
  if (units != "sse") throw InvalidArgument("omega units must be 'sse' or 'abs'");
  const double scale = p.omega_sse();
  if (!(scale > 0.0)) throw InvalidArgument("Omega_SSE units need g > 0; use --omega-units abs");
  for (double& w : values) w *= scale;
  return values;
}

std::vector<double> default_omegas_sse(Command c) {
  switch (c) {
    case Command::eigenprofile:
      return {0.5, 1.0, 1.5, 6.0};
    case Command::nh_compare:
      return {0.5};
    case Command::noise_spectrum:
      return {0.5, 1.3};
    default:
      return parse_grid("0.125:4:32");
  }
}

double default_t_max_tr(Command c) { return c == Command::nh_compare ? 3.0 : 25.0; }

}  // namespace sse::cli
