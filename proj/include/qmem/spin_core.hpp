#pragma once

#include <array>
#include <vector>

#include "qmem/types.hpp"

namespace qmem {

/// Cartesian angular-momentum matrices for spin s, basis ordered m = -s..+s.
struct SpinOperators {
  CMatrix x;
  CMatrix y;
  CMatrix z;
};

/// Throws std::invalid_argument unless 2s is a nonnegative integer.
SpinOperators spin_operators(double s);

/// Static Hamiltonian constants. Energies are linear frequencies (h = 1).
struct SpinParams {
  double gamma_S_GHz_per_T = 28.02;
  double gamma_I_MHz_per_T = -10.96;
  double A_hf_MHz = -220.0;
  double D_MHz = 707.0;
  double B_z_T = 0.3443;

  void validate() const;
};

struct TransitionLabel {
  Level lower;  // first level of the rotation block
  Level upper;
  double frequency_MHz = 0.0;
};

/// Addressable transitions: |dm_S| <= max_delta_ms, |dm_I| <= max_delta_mi.
struct TransitionFilter {
  double max_delta_ms = 1.0;
  double max_delta_mi = 2.0;
  // Optional restriction to one electron manifold for both ends.
  std::optional<double> within_ms;
  // Keep only pure ESR (dm_I = 0) or pure NMR (dm_S = 0) lines.
  bool pure_only = false;
};

/// Electron S and nuclear I coupled by
///   H = (gS Sz + gI Iz) Bz + A S.I - D Sz^2
/// in the product basis m_S ascending (outer), m_I ascending (inner), MHz.
/// Immutable after construction.
class SpinSystem {
 public:
  explicit SpinSystem(const SpinParams& params, double S = 2.5, double I = 2.5);

  /// Diagonalises an arbitrary Hermitian matrix on the same product basis.
  static SpinSystem from_matrix(const SpinParams& params, const CMatrix& hamiltonian,
                                double S = 2.5, double I = 2.5);

  const SpinParams& params() const { return params_; }
  double S() const { return S_; }
  double I() const { return I_; }
  int dimension() const { return static_cast<int>(hamiltonian_.rows()); }
  const CMatrix& hamiltonian() const { return hamiltonian_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }

  int product_index(const Level& level) const;
  Level product_level(int index) const;

  /// Eigenstate whose dominant product component is `level`.
  int eigen_index(const Level& level) const;
  double energy(const Level& level) const { return eigenvalues_(eigen_index(level)); }
  /// |<level|eigenstate(level)>|^2
  double label_weight(const Level& level) const;

 private:
  SpinSystem(const SpinParams& params, double S, double I, CMatrix hamiltonian);
  void diagonalise_and_label();

  SpinParams params_;
  double S_;
  double I_;
  CMatrix hamiltonian_;
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
  std::vector<int> eigen_of_product_;
  std::vector<double> label_weight_;
};

SpinSystem build_hamiltonian(const SpinParams& params);

/// Positive eigenvalue differences between labelled eigenstates, sorted by
/// frequency. Throws LabelingError if any label overlap is below 0.5.
std::vector<TransitionLabel> transition_frequencies(const SpinSystem& sys,
                                                    const TransitionFilter& filter = {});

/// The three Delta m_I = 1 lines inside m_S = -1/2 that carry the qudit:
/// f1 (-3/2 <-> -1/2), f2 (-1/2 <-> +1/2), f3 (+1/2 <-> +3/2).
struct NmrTriplet {
  TransitionLabel f1;
  TransitionLabel f2;
  TransitionLabel f3;
};
NmrTriplet nmr_triplet(const SpinSystem& sys);

/// ESR line |-1/2,m_I> <-> |+1/2,m_I>.
TransitionLabel esr_transition(const SpinSystem& sys, double mi = -0.5);

struct SubspaceProjection {
  LevelView view;
  std::array<int, 5> eigen_indices{};
  // Norm of each labelled eigenstate projected onto span(view).
  std::array<double, 5> projection_norms{};
};

/// Maps the five-level experiment basis onto eigenstates of the full system.
SubspaceProjection subspace_projection(const SpinSystem& sys);

}  // namespace qmem
