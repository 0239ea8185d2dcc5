#include "qmem/readout.hpp"

#include <cmath>
#include <stdexcept>

#include "qmem/sequence_table.hpp"

namespace qmem {

namespace {

int checked_sign(int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("refocus sign must be +1 or -1");
  return sign;
}

}  // namespace

CMatrix refocus_matrix(int sign) {
  const double s = checked_sign(sign);
  CMatrix p = CMatrix::Zero(4, 4);
  p(0, 3) = s;
  p(1, 2) = s;
  p(2, 1) = 1.0;
  p(3, 0) = 1.0;
  return p;
}

PulseSequence refocus_sequence(int sign, double unit_delay_us, double tau_us) {
  ResolveOptions opt;
  opt.unit_delay_us = unit_delay_us;
  opt.tau_us = tau_us;
  opt.alternation = checked_sign(sign);
  return resolve(select_rows(qec_table(), {"5", "6", "7", "8", "9", "10", "11", "12"}), opt);
}

CVector refocus_apply(const CVector& state, double tau_us, const Detunings& det, int sign) {
  if (state.size() != 4) throw std::invalid_argument("refocus_apply: expects the nuclear view");
  const CVector first = free_evolution_phases(state, tau_us, det);
  return free_evolution_phases(refocus_matrix(sign) * first, tau_us, det);
}

PulseSequence detection_sequence(EchoVariant variant, double unit_delay_us, double tau_us) {
  ResolveOptions opt;
  opt.unit_delay_us = unit_delay_us;
  opt.tau_us = tau_us;
  if (variant == EchoVariant::Half) opt.disabled_groups.push_back("green");
  return resolve(select_rows(experiment_table(), {"13", "14", "15", "mw_3", "16", "mw_4"}), opt);
}

Complex raw_echo(const CVector& state5) {
  if (state5.size() != 5) throw std::invalid_argument("raw_echo: expects the experiment view");
  return 2.0 * std::conj(state5(1)) * state5(4);
}

Complex report_quadrature(Complex raw, EchoVariant variant) {
  return variant == EchoVariant::ThreeHalf ? std::conj(raw) : raw;
}

Complex detection_pathway(const CVector& state5, EchoVariant variant) {
  const CVector out =
      apply_sequence(state5, LevelView::experiment(), detection_sequence(variant));
  return report_quadrature(raw_echo(out), variant);
}

EchoRecord echo_expansions(double theta, const SeriesModel& model) {
  model.validate();
  const Complex half =
      0.75 * model.factor(theta, 0.5) * std::conj(model.factor(theta, -0.5));
  const Complex three =
      0.25 * model.factor(theta, 1.5) * std::conj(model.factor(theta, -1.5));
  return EchoRecord{theta, half.real(), half.imag(), three.real(), three.imag()};
}

EchoRecord echo_expansions_printed(double theta, const std::vector<double>& A) {
  auto a = [&A](std::size_t n) { return n < A.size() ? A[n] : 0.0; };
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  EchoRecord r;
  r.sweep = theta;
  r.I_half_x = 0.75 * a(0) * a(0) - 3.0 * t2 / 16.0 * (a(1) * a(1) + a(0) * a(2));
  r.I_half_y = -0.75 * theta * a(0) * a(1) + t3 / 32.0 * (3.0 * a(1) * a(2) + a(0) * a(3));
  r.I_threehalf_x = 0.25 * a(0) * a(0) - 9.0 * t2 / 16.0 * (a(1) * a(1) + a(0) * a(2));
  r.I_threehalf_y =
      -0.75 * theta * a(0) * a(1) + 9.0 * t3 / 32.0 * (3.0 * a(1) * a(2) + a(0) * a(3));
  return r;
}

double combine_uncorrupted(const EchoRecord& rec) {
  return 0.5 * (3.0 * rec.I_half_x - rec.I_threehalf_x);
}

std::pair<double, double> combine_corrupted_linear(const EchoRecord& rec) {
  return {-4.0 * rec.I_half_y / 3.0, -4.0 * rec.I_threehalf_y / 3.0};
}

double combine_corrupted_square(const EchoRecord& rec) {
  return 2.0 * (rec.I_half_x - 3.0 * rec.I_threehalf_x) / 3.0;
}

}  // namespace qmem
