#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sse/model.hpp"

namespace sse {

/// Head oscillator selector; values are the 1-based component indices.
enum class Head : int { first = 1, second = 2 };

inline Eigen::Index row_of(Head j) { return static_cast<int>(j) - 1; }

/// Real symmetric generator of da/dt = -iHa.
///
/// Stored as H - omega0*I (exact bath detunings on the diagonal) so the
/// spectrum is not polluted by a large carrier; entries of H itself are
/// recovered with operator().
struct CouplingMatrix {
  SystemParams params;
  Eigen::MatrixXd detuned;

  Eigen::Index dimension() const { return detuned.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    return detuned(i, j) + (i == j ? params.omega0 : 0.0);
  }
  Eigen::MatrixXd dense() const;
};

struct BuildOptions {
  std::size_t max_dimension = 20002;
};

CouplingMatrix build_matrix(const SystemParams& p, const BuildOptions& opts = {});

struct EigenBasis {
  SystemParams params;
  std::uint64_t id = 0;
  Eigen::VectorXd offsets;  // f_k - omega0, ascending
  Eigen::MatrixXd vectors;  // column k is e_k

  Eigen::Index size() const { return offsets.size(); }
  double freq(Eigen::Index k) const { return params.omega0 + offsets(k); }
  Eigen::VectorXd freqs() const;
  double component(Eigen::Index k, Head j) const { return vectors(row_of(j), k); }
};

/// Dense symmetric eigensolve. Each eigenvector has its largest-magnitude
/// entry positive (lowest index wins ties). Throws NumericalError when the
/// solver does not converge.
EigenBasis diagonalize(const CouplingMatrix& h);

/// Stable identifier of a parameter set, used to tie derived data to a basis.
std::uint64_t params_id(const SystemParams& p);

struct ProfilePoint {
  double freq;
  double value;
};

struct ComponentProfile {
  Head component = Head::first;
  double omega0 = 0.0;
  std::vector<ProfilePoint> points;  // ascending in freq
};

ComponentProfile component_profile(const EigenBasis& basis, Head j);

/// Peak descriptors of a squared component profile.
///
/// peak_count counts maxima at or above half the global maximum separated by
/// a strict dip (the splitting onset). half_height_split is the stricter
/// condition that the dip between the two outermost maxima falls below half
/// the maximum, which is the switch used by the peak estimator. Widths and
/// heights are taken at the half-height level.
struct PeakFeatures {
  int peak_count = 1;
  bool half_height_split = false;
  std::vector<double> heights;     // squared maxima, one per peak
  std::vector<double> peak_freqs;  // ascending
  std::vector<double> offsets;     // |peak_freq - omega0|
  double total_width = 0.0;        // measure of {value^2 >= max/2}

  double max_height() const;
};

/// Returns nullopt for a degenerate profile (every squared value < 1e-14).
std::optional<PeakFeatures> peak_features(const ComponentProfile& profile);

/// Bisection on omega_big for the onset of the component-2 double peak.
/// Throws NumericalError on bracketing failure.
double find_split_threshold(const SystemParams& p, double omega_lo, double omega_hi,
                            double tol);

/// `k,f_k,e1,e2` rows, 1-based k.
void write_eigenprofile_csv(std::ostream& out, const EigenBasis& basis);

}  // namespace sse
