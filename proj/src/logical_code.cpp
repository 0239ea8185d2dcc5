#include "qmem/logical_code.hpp"

#include <cmath>

#include "qmem/sequence_table.hpp"

namespace qmem {

namespace {

const double kHalfRoot3 = std::sqrt(3.0) / 2.0;

CVector nuclear_vector(double a, double b, double c, double d) {
  CVector v(4);
  v << a, b, c, d;
  return v;
}

Pulse make_pulse(Level lower, Level upper, double angle, double position, std::string tag) {
  Pulse p;
  p.transition = TransitionLabel{lower, upper, 0.0};
  p.angle = angle;
  p.position_us = position;
  p.kind = lower.twice_ms != upper.twice_ms ? PulseKind::MW : PulseKind::RF;
  p.tag = std::move(tag);
  return p;
}

Pulse labelled_pulse(const std::string& label, double angle, double position) {
  Pulse p;
  p.transition = transition_for(label);
  p.kind = kind_for(label);
  p.angle = angle;
  p.position_us = position;
  p.tag = label;
  return p;
}

}  // namespace

const LogicalBasis& LogicalBasis::standard() {
  static const LogicalBasis basis{
      nuclear_vector(0.5, 0.0, kHalfRoot3, 0.0),
      nuclear_vector(0.0, kHalfRoot3, 0.0, 0.5),
      nuclear_vector(-kHalfRoot3, 0.0, 0.5, 0.0),
      nuclear_vector(0.0, -0.5, 0.0, kHalfRoot3),
  };
  return basis;
}

void LogicalQubit::validate() const {
  const double n = std::norm(alpha) + std::norm(beta);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-12) {
    throw InvalidState("logical qubit not normalised: |alpha|^2 + |beta|^2 = " +
                       std::to_string(n));
  }
}

CVector LogicalQubit::encoded() const {
  const auto& b = LogicalBasis::standard();
  return alpha * b.ket0L + beta * b.ket1L;
}

CVector LogicalQubit::bare() const {
  CVector v = CVector::Zero(4);
  v(1) = alpha;
  v(2) = beta;
  return v;
}

LogicalQubit LogicalQubit::random(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Complex a(g(rng), g(rng));
  const Complex b(g(rng), g(rng));
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return LogicalQubit{a / n, b / n};
}

const CMatrix& encode_unitary() {
  static const CMatrix u = [] {
    const auto& b = LogicalBasis::standard();
    CMatrix m(4, 4);
    m.col(0) = b.ketIz0L;
    m.col(1) = b.ket0L;
    m.col(2) = b.ket1L;
    m.col(3) = b.ketIz1L;
    return m;
  }();
  return u;
}

PulseSequence encode_pulse_sequence(bool delta_mi2_available, double unit_delay_us) {
  if (!delta_mi2_available) {
    throw UnsupportedEncoding(
        "encoder needs the dm_I = 2 transitions -3/2<->+1/2 and -1/2<->+3/2");
  }
  PulseSequence seq(unit_delay_us);
  seq.add(labelled_pulse("f2", -kPi, 0.0));
  seq.add(labelled_pulse("f1+f2", 5.0 * kPi / 3.0, unit_delay_us));
  seq.add(labelled_pulse("f2+f3", kPi / 3.0, 2.0 * unit_delay_us));
  return seq;
}

PulseSequence decode_pulse_sequence(bool delta_mi2_available, double unit_delay_us) {
  return encode_pulse_sequence(delta_mi2_available, unit_delay_us).inverse();
}

PulseSequence experimental_encode_sequence(double unit_delay_us) {
  SequenceTable table = qec_table();
  table.rows.resize(4);
  ResolveOptions opt;
  opt.unit_delay_us = unit_delay_us;
  return resolve(table, opt);
}

PulseSequence swap_electron_to_nuclear() {
  PulseSequence seq;
  seq.add(make_pulse(Level{1, -1}, Level{1, 1}, -kPi, 0.0, "swap_rf"));
  seq.add(make_pulse(Level{-1, 1}, Level{1, 1}, kPi, 0.0, "swap_mw"));
  return seq;
}

PulseSequence coherence_transfer_to_nuclear() {
  PulseSequence seq;
  seq.add(labelled_pulse("f2", kPi, 0.0));
  seq.add(labelled_pulse("MW", kPi, 0.0));
  return seq;
}

PulseSequence decode_error_transfer() {
  PulseSequence seq;
  seq.add(make_pulse(Level{-1, -3}, Level{1, -3}, -kPi, 0.0, "mw_m32"));
  seq.add(make_pulse(Level{-1, 3}, Level{1, 3}, -kPi, 0.0, "mw_p32"));
  seq.add(make_pulse(Level{1, -3}, Level{1, -1}, -kPi, 0.0, "rf_m"));
  seq.add(make_pulse(Level{1, 1}, Level{1, 3}, kPi, 0.0, "rf_p"));
  return seq;
}

double state_fidelity(const CVector& a, const CVector& b) {
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::norm(a.dot(b)) / (na * nb);
}

double unitary_fidelity(const CMatrix& u, const CMatrix& v) {
  const double d = static_cast<double>(u.rows());
  return std::norm((u.adjoint() * v).trace() / d);
}

}  // namespace qmem
