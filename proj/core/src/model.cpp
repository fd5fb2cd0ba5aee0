#include "sse/model.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <string>

#include "sse/errors.hpp"

namespace sse {

void SystemParams::validate() const {
  if (n_bath < 1) throw InvalidArgument("n_bath must be >= 1");
  if (!(delta_omega > 0.0) || !std::isfinite(delta_omega))
    throw InvalidArgument("delta_omega must be finite and > 0");
  if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidArgument("g must be finite and >= 0");
  if (!(omega_big >= 0.0) || !std::isfinite(omega_big))
    throw InvalidArgument("omega_big must be finite and >= 0");
  if (!std::isfinite(omega0)) throw InvalidArgument("omega0 must be finite");
}

double SystemParams::gamma() const { return std::numbers::pi * g * g / delta_omega; }
double SystemParams::omega_ep() const { return gamma() / 2.0; }
double SystemParams::omega_sse() const { return gamma() / std::numbers::sqrt2; }
double SystemParams::t_return() const { return 2.0 * std::numbers::pi / delta_omega; }

DerivedConstants derive_constants(const SystemParams& p) {
  p.validate();
  return {p.gamma(), p.omega_ep(), p.omega_sse(), p.t_return()};
}

double bath_detuning(const SystemParams& p, std::size_t k) {
  if (k < 1 || k > p.n_bath) throw InvalidArgument("bath index out of range");
  return p.delta_omega * (static_cast<double>(k) - static_cast<double>(p.n_bath) / 2.0);
}

double bath_frequency(const SystemParams& p, std::size_t k) {
  return p.omega0 + bath_detuning(p, k);
}

SystemParams scale_to(const SystemParams& p, std::size_t n_new) {
  if (n_new < 1) throw InvalidArgument("n_new must be >= 1");
  const double ratio = static_cast<double>(p.n_bath) / static_cast<double>(n_new);
  SystemParams q = p;
  q.n_bath = n_new;
  q.delta_omega = p.delta_omega * ratio;
  q.g = p.g * std::sqrt(ratio);
  return q;
}

SystemParams with_omega(SystemParams p, double omega_big) {
  p.omega_big = omega_big;
  return p;
}

double coupling_for_gamma(double gamma, double delta_omega) {
  if (!(gamma >= 0.0) || !(delta_omega > 0.0))
    throw InvalidArgument("coupling_for_gamma needs gamma >= 0 and delta_omega > 0");
  return std::sqrt(gamma * delta_omega / std::numbers::pi);
}

void InitialState::validate_for(const SystemParams& p) const {
  if (!bath_0.empty() && bath_0.size() != p.n_bath)
    throw InvalidArgument("bath_0 length does not match n_bath");
}

double InitialState::norm2() const {
  double s = std::norm(a1_0) + std::norm(a2_0);
  for (const auto& b : bath_0) s += std::norm(b);
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end) throw InvalidArgument("bad value for " + key + ": " + v);
  return x;
}

}  // namespace

SystemParams read_params(std::istream& in, SystemParams base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "n_bath") {
      const double n = parse_double(key, val);
      if (n < 1 || n != std::floor(n)) throw InvalidArgument("n_bath must be a positive integer");
      base.n_bath = static_cast<std::size_t>(n);
    } else if (key == "delta_omega") {
      base.delta_omega = parse_double(key, val);
    } else if (key == "g") {
      base.g = parse_double(key, val);
    } else if (key == "omega_big") {
      base.omega_big = parse_double(key, val);
    } else if (key == "omega0") {
      base.omega0 = parse_double(key, val);
    } else {
      throw InvalidArgument("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

}  // namespace sse
