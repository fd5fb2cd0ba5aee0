#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace sse {

using cplx = std::complex<double>;

/// Two head oscillators, oscillator 1 coupled to a uniform bath of N modes.
struct SystemParams {
  std::size_t n_bath = 1;
  double delta_omega = 1.0;
  double g = 0.0;
  double omega_big = 0.0;
  double omega0 = 0.0;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  double gamma() const;
  double omega_ep() const;
  double omega_sse() const;
  double t_return() const;
  double bandwidth() const { return static_cast<double>(n_bath) * delta_omega; }

  bool operator==(const SystemParams&) const = default;
};

struct DerivedConstants {
  double gamma;
  double omega_ep;
  double omega_sse;
  double t_return;
};

DerivedConstants derive_constants(const SystemParams& p);

/// omega0 + delta_omega * (k - N/2), k in 1..N.
double bath_frequency(const SystemParams& p, std::size_t k);

/// Bath detuning from omega0, computed without the carrier so it is exact
/// for any omega0.
double bath_detuning(const SystemParams& p, std::size_t k);

/// delta_omega ~ 1/N, g ~ 1/sqrt(N); gamma and the bandwidth are preserved.
SystemParams scale_to(const SystemParams& p, std::size_t n_new);

SystemParams with_omega(SystemParams p, double omega_big);

/// Coupling g that yields decay rate gamma for spacing delta_omega.
double coupling_for_gamma(double gamma, double delta_omega);

struct InitialState {
  cplx a1_0{1.0, 0.0};
  cplx a2_0{0.0, 0.0};
  std::vector<cplx> bath_0;  // empty means all zero

  static InitialState heads(cplx a1, cplx a2) { return {a1, a2, {}}; }

  void validate_for(const SystemParams& p) const;
  double norm2() const;
};

/// Reads flat `key = value` lines (keys n_bath, delta_omega, g, omega_big,
/// omega0). `#` starts a comment. Unknown keys and bad values throw
/// InvalidArgument. Keys absent from the stream keep their value in `base`.
SystemParams read_params(std::istream& in, SystemParams base = {});

}  // namespace sse
