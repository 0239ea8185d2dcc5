#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qmem/pulse_engine.hpp"

namespace qmem {

/// exp(-i theta m_I) on every amplitude of `view`.
CVector z_error_exact(const CVector& state, double theta,
                      const LevelView& view = LevelView::nuclear());

enum class SeriesTail {
  Truncate,   // terms n > N dropped
  IdealTail,  // terms n > N kept with A_n = A_0
};

/// sum_n A_n (-i theta I_z)^n / n!, n = 0..N.
struct SeriesModel {
  std::vector<double> A{1, 1, 1, 1, 1, 1};
  SeriesTail tail = SeriesTail::Truncate;

  int order() const { return static_cast<int>(A.size()) - 1; }
  /// Throws std::invalid_argument unless A_0 > 0 and every A_n is finite.
  void validate() const;
  /// Scalar factor multiplying the amplitude with I_z eigenvalue m.
  Complex factor(double theta, double m) const;

  static SeriesModel ideal(int order = 5, SeriesTail tail = SeriesTail::Truncate);
};

/// Unnormalised series-corrupted state.
CVector z_error_series(const CVector& state, double theta, const SeriesModel& model,
                       const LevelView& view = LevelView::nuclear());

/// <psi_L| Z(theta) |psi_L> and <psi_L| I_z^dag Z(theta) |psi_L> for a
/// nuclear-view state (the second without normalisation factor).
Complex logical_overlap(const CVector& psi, double theta);
Complex error_overlap(const CVector& psi, double theta);

/// Pure dephasing with L = sqrt(2/T2n) I_z.
struct LindbladModel {
  double T2n_ms = 1.05;
  void validate() const;
};

/// Throws InvalidState if rho is not Hermitian, unit-trace and positive
/// semidefinite within `tol`.
void check_density_matrix(const CMatrix& rho, double tol = 1e-9);

/// Closed form: rho_ab *= exp(-(m_a - m_b)^2 t / T2n). m_I is read from
/// `view`, so electron levels dephase with their nuclear projection.
CMatrix lindblad_evolve(const CMatrix& rho, double t_ms, const LindbladModel& model,
                        const LevelView& view = LevelView::nuclear());

/// dρ/dt = L ρ L† − ½{L†L, ρ} integrated with fixed-step RK4 for an
/// arbitrary list of collapse operators. Reference solver for tests.
CMatrix lindblad_rk4(const CMatrix& rho, double t, const std::vector<CMatrix>& collapse,
                     const CMatrix& hamiltonian, int steps);

CMatrix collapse_operator(const LindbladModel& model,
                          const LevelView& view = LevelView::nuclear());

/// Gaussian B1 inhomogeneity and static detuning spread.
/// sigma_* is the envelope parameter of exp(-sigma^2 n^2); the per-spin
/// angle scale g has standard deviation sqrt(2) sigma / pi.
struct InhomogeneityModel {
  double sigma_MW = 0.0;
  double sigma_RF = 0.0;
  double detuning_sigma_MHz = 0.0;

  void validate() const;
  double angle_scale_sd(PulseKind kind) const;
  bool is_ideal() const { return sigma_MW == 0 && sigma_RF == 0 && detuning_sigma_MHz == 0; }
};

/// Average pi-pulse fidelity under the model: F = (1 + exp(-sigma^2)) / 2.
double fidelity_from_sigma(double sigma);
/// Inverse of fidelity_from_sigma; throws std::invalid_argument outside (1/2, 1].
double sigma_from_fidelity(double fidelity);

/// One spin of the ensemble: angle scales shared by every pulse of a kind.
struct ShotDraw {
  double g_MW = 0.0;
  double g_RF = 0.0;
  Detunings detunings;
};

ShotDraw draw_shot(const InhomogeneityModel& model, std::mt19937_64& rng);

/// Pulse angle multiplied by (1 + g) for the pulse's kind.
Pulse scale_pulse(const Pulse& pulse, const ShotDraw& draw);
PulseSequence scale_sequence(const PulseSequence& seq, const ShotDraw& draw);

/// Angle scaled by (1 + g), g ~ N(0, angle_scale_sd(kind)), deterministic
/// in `seed`.
Pulse sample_imperfect_rotation(const Pulse& pulse, const InhomogeneityModel& model,
                                std::uint64_t seed);

/// theta = cal * amplitude * duration. Throws std::invalid_argument if cal <= 0.
double b_field_pulse_phase(double amplitude, double duration_us, double cal);

}  // namespace qmem
