#include "sse/spectral.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <string>

#include "sse/csv.hpp"
#include "sse/errors.hpp"

namespace sse {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t params_id(const SystemParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, p.n_bath);
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.delta_omega));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.g));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.omega_big));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.omega0));
  return h;
}

Eigen::MatrixXd CouplingMatrix::dense() const {
  Eigen::MatrixXd h = detuned;
  h.diagonal().array() += params.omega0;
  return h;
}

CouplingMatrix build_matrix(const SystemParams& p, const BuildOptions& opts) {
  p.validate();
  const std::size_t dim = p.n_bath + 2;
  if (dim > opts.max_dimension)
    throw InvalidArgument("matrix dimension " + std::to_string(dim) + " exceeds limit " +
                          std::to_string(opts.max_dimension));
  const auto n = static_cast<Eigen::Index>(dim);
  CouplingMatrix m{p, Eigen::MatrixXd::Zero(n, n)};
  m.detuned(0, 1) = m.detuned(1, 0) = p.omega_big;
  for (std::size_t k = 1; k <= p.n_bath; ++k) {
    const auto i = static_cast<Eigen::Index>(k + 1);
    m.detuned(0, i) = m.detuned(i, 0) = p.g;
    m.detuned(i, i) = bath_detuning(p, k);
  }
  return m;
}

EigenBasis diagonalize(const CouplingMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.detuned);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  EigenBasis b;
  b.params = h.params;
  b.id = params_id(h.params);
  b.offsets = solver.eigenvalues();
  b.vectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < b.vectors.cols(); ++k) {
    auto col = b.vectors.col(k);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > best) {
        best = std::abs(col(i));
        arg = i;
      }
    }
    if (col(arg) < 0.0) col = -col;
  }
  if (!b.offsets.allFinite() || !b.vectors.allFinite())
    throw NumericalError("eigensolver produced non-finite output");
  return b;
}

Eigen::VectorXd EigenBasis::freqs() const {
  return (offsets.array() + params.omega0).matrix();
}

ComponentProfile component_profile(const EigenBasis& basis, Head j) {
  ComponentProfile p{j, basis.params.omega0, {}};
  p.points.reserve(static_cast<std::size_t>(basis.size()));
  for (Eigen::Index k = 0; k < basis.size(); ++k)
    p.points.push_back({basis.freq(k), basis.component(k, j)});
  return p;
}

void write_eigenprofile_csv(std::ostream& out, const EigenBasis& basis) {
  csv::header(out, "k,f_k,e1,e2");
  for (Eigen::Index k = 0; k < basis.size(); ++k)
    csv::row(out, {static_cast<double>(k + 1), basis.freq(k), basis.component(k, Head::first),
                   basis.component(k, Head::second)});
}

}  // namespace sse
