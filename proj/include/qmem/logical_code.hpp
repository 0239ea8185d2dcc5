#pragma once

#include <random>

#include "qmem/pulse_engine.hpp"

namespace qmem {

/// Code words over the nuclear view (m_I = -3/2, -1/2, +1/2, +3/2).
struct LogicalBasis {
  CVector ket0L;    // (1/2)|-3/2> + (sqrt3/2)|+1/2>
  CVector ket1L;    // (1/2)|+3/2> + (sqrt3/2)|-1/2>
  CVector ketIz0L;  // (2/sqrt3) I_z |0_L>
  CVector ketIz1L;  // (2/sqrt3) I_z |1_L>

  static const LogicalBasis& standard();
};

struct LogicalQubit {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  /// Throws InvalidState unless |alpha|^2 + |beta|^2 = 1 to 1e-12.
  void validate() const;
  /// alpha |0_L> + beta |1_L> on the nuclear view.
  CVector encoded() const;
  /// alpha |-1/2> + beta |+1/2> on the nuclear view.
  CVector bare() const;

  /// Haar-random pure qubit.
  static LogicalQubit random(std::mt19937_64& rng);
};

/// 4x4 unitary: |-1/2> -> |0_L>, |+1/2> -> |1_L>, |-3/2> -> |I_z 0_L>,
/// |+3/2> -> |I_z 1_L>.
const CMatrix& encode_unitary();

/// R(-1/2<->+1/2, -pi), then R(-3/2<->+1/2, 5pi/3), then R(-1/2<->+3/2, pi/3).
/// Throws UnsupportedEncoding when dm_I = 2 lines are unavailable.
PulseSequence encode_pulse_sequence(bool delta_mi2_available = true, double unit_delay_us = 8.0);

/// Reverse of the encoder with negated angles.
PulseSequence decode_pulse_sequence(bool delta_mi2_available = true, double unit_delay_us = 8.0);

/// The four dm_I = 1 pulses used in the experiment: f2 pi, f1 pi/3, f3 pi/3,
/// f2 -pi. Maps |-1/2> -> -|0_L>, |+1/2> -> |1_L>.
PulseSequence experimental_encode_sequence(double unit_delay_us = 8.0);

/// One nuclear and one electron pi pulse taking
/// (a|-1/2> + b|+1/2>) x |m_I=-1/2> to |-1/2> x (a|-1/2> + b|+1/2>).
/// Acts on LevelView::qudit().
PulseSequence swap_electron_to_nuclear();

/// RF f2 pi then MW pi on the experiment view: (0,a,0,0,b) -> (0,-b,a,0,0).
PulseSequence coherence_transfer_to_nuclear();

/// Moves a|-1/2,-3/2> + b|-1/2,+3/2> to a|+1/2,-1/2> + b|+1/2,+1/2>
/// (two electron pi pulses, then two nuclear pi pulses). Acts on
/// LevelView::qudit().
PulseSequence decode_error_transfer();

/// |<a|b>|^2 / (|a|^2 |b|^2); insensitive to global phase.
double state_fidelity(const CVector& a, const CVector& b);

/// Tr(U^dag V)/d in magnitude squared; 1 iff V = e^{i phi} U.
double unitary_fidelity(const CMatrix& u, const CMatrix& v);

}  // namespace qmem
