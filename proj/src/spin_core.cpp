#include "qmem/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmem {

SpinOperators spin_operators(double s) {
  const double two_s = 2.0 * s;
  if (!std::isfinite(s) || s < 0.0 || std::abs(two_s - std::round(two_s)) > 1e-12) {
    throw std::invalid_argument("spin_operators: 2s must be a nonnegative integer, got s=" +
                                std::to_string(s));
  }
  const int dim = static_cast<int>(std::round(two_s)) + 1;
  CMatrix raise = CMatrix::Zero(dim, dim);
  CMatrix z = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = -s + k;
    z(k, k) = m;
    if (k + 1 < dim) {
      raise(k + 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
  }
  const CMatrix lower = raise.adjoint();
  SpinOperators ops;
  ops.x = 0.5 * (raise + lower);
  ops.y = Complex(0.0, -0.5) * (raise - lower);
  ops.z = z;
  return ops;
}

void SpinParams::validate() const {
  for (double v : {gamma_S_GHz_per_T, gamma_I_MHz_per_T, A_hf_MHz, D_MHz, B_z_T}) {
    if (!std::isfinite(v)) throw std::invalid_argument("SpinParams: non-finite parameter");
  }
  if (B_z_T < 0.0) throw std::invalid_argument("SpinParams: B_z must be >= 0");
}

namespace {

CMatrix zeeman_hyperfine_zfs(const SpinParams& p, double S, double I) {
  const SpinOperators e = spin_operators(S);
  const SpinOperators n = spin_operators(I);
  const CMatrix one_e = CMatrix::Identity(e.z.rows(), e.z.cols());
  const CMatrix one_n = CMatrix::Identity(n.z.rows(), n.z.cols());
  using Eigen::kroneckerProduct;

  const double gamma_S_MHz = 1e3 * p.gamma_S_GHz_per_T;
  CMatrix h = (gamma_S_MHz * p.B_z_T) * CMatrix(kroneckerProduct(e.z, one_n));
  h += (p.gamma_I_MHz_per_T * p.B_z_T) * CMatrix(kroneckerProduct(one_e, n.z));
  h += p.A_hf_MHz * CMatrix(kroneckerProduct(e.x, n.x) + kroneckerProduct(e.y, n.y) +
                            kroneckerProduct(e.z, n.z));
  h -= p.D_MHz * CMatrix(kroneckerProduct(CMatrix(e.z * e.z), one_n));
  return h;
}

}  // namespace

SpinSystem::SpinSystem(const SpinParams& params, double S, double I)
    : SpinSystem(params, S, I, [&] {
        params.validate();
        return zeeman_hyperfine_zfs(params, S, I);
      }()) {}

SpinSystem::SpinSystem(const SpinParams& params, double S, double I, CMatrix hamiltonian)
    : params_(params), S_(S), I_(I), hamiltonian_(std::move(hamiltonian)) {
  const int expected = static_cast<int>(std::lround((2 * S + 1) * (2 * I + 1)));
  if (hamiltonian_.rows() != expected || hamiltonian_.cols() != expected) {
    throw std::invalid_argument("SpinSystem: Hamiltonian dimension mismatch");
  }
  diagonalise_and_label();
}

SpinSystem SpinSystem::from_matrix(const SpinParams& params, const CMatrix& hamiltonian,
                                   double S, double I) {
  return SpinSystem(params, S, I, hamiltonian);
}

void SpinSystem::diagonalise_and_label() {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hamiltonian_);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("SpinSystem: eigen-decomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();

  const int dim = dimension();
  eigen_of_product_.assign(dim, -1);
  label_weight_.assign(dim, 0.0);
  for (int col = 0; col < dim; ++col) {
    Eigen::Index row = 0;
    const double weight = eigenvectors_.col(col).cwiseAbs2().maxCoeff(&row);
    if (weight < 0.5) {
      throw LabelingError("eigenstate " + std::to_string(col) +
                          " has no dominant product component (max overlap " +
                          std::to_string(weight) + ")");
    }
    if (eigen_of_product_[row] != -1) {
      throw LabelingError("two eigenstates share the label " +
                          to_string(product_level(static_cast<int>(row))));
    }
    eigen_of_product_[row] = col;
    label_weight_[row] = weight;
  }
}

int SpinSystem::product_index(const Level& level) const {
  const int dim_i = static_cast<int>(std::lround(2 * I_ + 1));
  const int k_s = (level.twice_ms + static_cast<int>(std::lround(2 * S_))) / 2;
  const int k_i = (level.twice_mi + static_cast<int>(std::lround(2 * I_))) / 2;
  const bool parity_ok = (level.twice_ms + static_cast<int>(std::lround(2 * S_))) % 2 == 0 &&
                         (level.twice_mi + static_cast<int>(std::lround(2 * I_))) % 2 == 0;
  if (!parity_ok || k_s < 0 || k_i < 0 || k_i >= dim_i ||
      k_s >= static_cast<int>(std::lround(2 * S_ + 1))) {
    throw std::invalid_argument("level " + to_string(level) + " not in the spin system");
  }
  return k_s * dim_i + k_i;
}

Level SpinSystem::product_level(int index) const {
  const int dim_i = static_cast<int>(std::lround(2 * I_ + 1));
  const int k_s = index / dim_i;
  const int k_i = index % dim_i;
  return Level{2 * k_s - static_cast<int>(std::lround(2 * S_)),
               2 * k_i - static_cast<int>(std::lround(2 * I_))};
}

int SpinSystem::eigen_index(const Level& level) const {
  return eigen_of_product_[product_index(level)];
}

double SpinSystem::label_weight(const Level& level) const {
  return label_weight_[product_index(level)];
}

SpinSystem build_hamiltonian(const SpinParams& params) { return SpinSystem(params); }

std::vector<TransitionLabel> transition_frequencies(const SpinSystem& sys,
                                                    const TransitionFilter& filter) {
  std::vector<TransitionLabel> out;
  const int dim = sys.dimension();
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      const Level la = sys.product_level(a);
      const Level lb = sys.product_level(b);
      const double dms = std::abs(la.ms() - lb.ms());
      const double dmi = std::abs(la.mi() - lb.mi());
      if (dms + dmi < 1.0) continue;
      if (dms > filter.max_delta_ms || dmi > filter.max_delta_mi) continue;
      if (filter.pure_only && dms > 0.0 && dmi > 0.0) continue;
      if (filter.within_ms && (la.ms() != *filter.within_ms || lb.ms() != *filter.within_ms)) {
        continue;
      }
      const double ea = sys.energy(la);
      const double eb = sys.energy(lb);
      TransitionLabel t;
      // lower = smaller m_S, then smaller m_I: the rotation-block convention.
      t.lower = std::min(la, lb);
      t.upper = std::max(la, lb);
      t.frequency_MHz = std::abs(eb - ea);
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end(), [](const TransitionLabel& x, const TransitionLabel& y) {
    return x.frequency_MHz < y.frequency_MHz;
  });
  return out;
}

namespace {

TransitionLabel labelled(const SpinSystem& sys, Level lower, Level upper) {
  TransitionLabel t{lower, upper, std::abs(sys.energy(upper) - sys.energy(lower))};
  return t;
}

}  // namespace

NmrTriplet nmr_triplet(const SpinSystem& sys) {
  return NmrTriplet{labelled(sys, Level{-1, -3}, Level{-1, -1}),
                    labelled(sys, Level{-1, -1}, Level{-1, 1}),
                    labelled(sys, Level{-1, 1}, Level{-1, 3})};
}

TransitionLabel esr_transition(const SpinSystem& sys, double mi) {
  return labelled(sys, Level::of(-0.5, mi), Level::of(0.5, mi));
}

SubspaceProjection subspace_projection(const SpinSystem& sys) {
  SubspaceProjection out;
  out.view = LevelView::experiment();
  std::vector<int> rows;
  for (const Level& level : out.view.levels()) rows.push_back(sys.product_index(level));
  for (std::size_t k = 0; k < out.view.size(); ++k) {
    const int col = sys.eigen_index(out.view[k]);
    double norm2 = 0.0;
    for (int r : rows) norm2 += std::norm(sys.eigenvectors()(r, col));
    out.eigen_indices[k] = col;
    out.projection_norms[k] = std::sqrt(norm2);
  }
  return out;
}

}  // namespace qmem
