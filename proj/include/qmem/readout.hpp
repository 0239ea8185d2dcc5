#pragma once

#include <utility>

#include "qmem/error_dynamics.hpp"
#include "qmem/pulse_engine.hpp"

namespace qmem {

/// Anti-diagonal nuclear propagator of the eight-pulse refocusing block:
/// rows (+-lambda, +-eta, zeta, xi) for input (xi, zeta, eta, lambda).
CMatrix refocus_matrix(int sign);

/// Pulses 5-12 of the sequence table with the given alternation sign.
PulseSequence refocus_sequence(int sign, double unit_delay_us = 8.0, double tau_us = 100.0);

/// free(tau) -> P_sign -> free(tau) on the nuclear view.
CVector refocus_apply(const CVector& state, double tau_us, const Detunings& det, int sign);

struct EchoRecord {
  double sweep = 0.0;
  double I_half_x = 0.0;
  double I_half_y = 0.0;
  double I_threehalf_x = 0.0;
  double I_threehalf_y = 0.0;
};

enum class EchoVariant { Half, ThreeHalf };

/// Decoding chain: f2 pi, [f1 pi, f3 pi], MW pi, f2 pi, MW pi. The green
/// f1/f3 pulses are present only for the three-half variant.
PulseSequence detection_sequence(EchoVariant variant, double unit_delay_us = 8.0,
                                 double tau_us = 100.0);

/// Electron coherence 2 conj(c_{-1/2,-1/2}) c_{+1/2,-1/2} after the chain.
Complex raw_echo(const CVector& state5);

/// Echo as reported: x + i y. The three-half channel is read in the
/// mirrored quadrature so both y-echoes carry the same sign.
Complex detection_pathway(const CVector& state5, EchoVariant variant);
Complex report_quadrature(Complex raw, EchoVariant variant);

/// Closed-form echoes of the encoded |+>_L state corrupted by the series:
/// I_half = 3/4 f(1/2) conj f(-1/2), I_threehalf = 1/4 f(3/2) conj f(-3/2).
EchoRecord echo_expansions(double theta, const SeriesModel& model);

/// The expansions truncated at the printed order (theta^2 for x, theta^3
/// for y). Uses A_0..A_3; missing coefficients count as 0.
EchoRecord echo_expansions_printed(double theta, const std::vector<double>& A);

double combine_uncorrupted(const EchoRecord& rec);
std::pair<double, double> combine_corrupted_linear(const EchoRecord& rec);
double combine_corrupted_square(const EchoRecord& rec);

}  // namespace qmem
