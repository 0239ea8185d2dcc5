#include "qmem/pulse_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmem {

std::string to_string(PulseKind kind) { return kind == PulseKind::MW ? "MW" : "RF"; }

void Pulse::validate() const {
  if (!std::isfinite(angle) || std::abs(angle) > 4.0 * kPi + 1e-12) {
    throw InvalidSequence("pulse '" + tag + "': angle must be finite with |angle| <= 4 pi");
  }
  if (!std::isfinite(phase) || !std::isfinite(position_us)) {
    throw InvalidSequence("pulse '" + tag + "': non-finite phase or position");
  }
  const int dms = std::abs(transition.upper.twice_ms - transition.lower.twice_ms);
  const int dmi = std::abs(transition.upper.twice_mi - transition.lower.twice_mi);
  if (dms + dmi == 0 || dms > 2 || dmi > 4) {
    throw InvalidSequence("pulse '" + tag + "': transition " + to_string(transition.lower) +
                          " <-> " + to_string(transition.upper) + " is not addressable");
  }
}

double position_of(const SequenceEvent& event) {
  return std::visit([](const auto& e) { return e.position_us; }, event);
}

PulseSequence& PulseSequence::add(Pulse pulse) {
  events_.emplace_back(std::move(pulse));
  return *this;
}

PulseSequence& PulseSequence::mark(std::string name, double position_us) {
  events_.emplace_back(Marker{std::move(name), position_us});
  return *this;
}

std::vector<Pulse> PulseSequence::pulses() const {
  std::vector<Pulse> out;
  for (const auto& e : events_) {
    if (const auto* p = std::get_if<Pulse>(&e)) out.push_back(*p);
  }
  return out;
}

std::size_t PulseSequence::pulse_count() const {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [](const auto& e) {
    return std::holds_alternative<Pulse>(e);
  }));
}

double PulseSequence::duration_us() const {
  if (events_.empty()) return 0.0;
  return position_of(events_.back()) - position_of(events_.front());
}

std::vector<double> PulseSequence::free_intervals() const {
  std::vector<double> out;
  for (std::size_t k = 1; k < events_.size(); ++k) {
    out.push_back(position_of(events_[k]) - position_of(events_[k - 1]));
  }
  return out;
}

void PulseSequence::validate() const {
  for (std::size_t k = 0; k < events_.size(); ++k) {
    if (const auto* p = std::get_if<Pulse>(&events_[k])) p->validate();
    if (k > 0 && position_of(events_[k]) < position_of(events_[k - 1])) {
      throw InvalidSequence("event " + std::to_string(k) + " at " +
                            std::to_string(position_of(events_[k])) +
                            " us precedes the previous event at " +
                            std::to_string(position_of(events_[k - 1])) + " us");
    }
  }
}

PulseSequence& PulseSequence::mark_after(const std::string& tag, std::string name) {
  for (auto it = events_.begin(); it != events_.end(); ++it) {
    const auto* p = std::get_if<Pulse>(&*it);
    if (p && p->tag == tag) {
      const double pos = p->position_us;
      events_.insert(std::next(it), Marker{std::move(name), pos});
      return *this;
    }
  }
  throw std::invalid_argument("mark_after: no pulse tagged '" + tag + "'");
}

PulseSequence PulseSequence::inverse() const {
  PulseSequence out(unit_delay_us_);
  if (events_.empty()) return out;
  const double mirror = position_of(events_.front()) + position_of(events_.back());
  for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
    if (const auto* p = std::get_if<Pulse>(&*it)) {
      Pulse q = *p;
      q.angle = -q.angle;
      q.position_us = mirror - q.position_us;
      out.add(std::move(q));
    }
  }
  return out;
}

PulseSequence PulseSequence::then(const PulseSequence& next, double gap_us) const {
  PulseSequence out = *this;
  if (next.events_.empty()) return out;
  const double end = events_.empty() ? 0.0 : position_of(events_.back());
  const double shift = end + gap_us - position_of(next.events_.front());
  for (auto e : next.events_) {
    std::visit([shift](auto& x) { x.position_us += shift; }, e);
    out.events_.push_back(std::move(e));
  }
  return out;
}

double Detunings::level_offset_MHz(const Level& level) const {
  if (level.twice_ms != -1) return 0.0;
  switch (level.twice_mi) {
    case -3:
      return delta_f1_MHz + delta_f2_MHz + delta_f3_MHz;
    case -1:
      return delta_f1_MHz + delta_f2_MHz;
    case 1:
      return delta_f1_MHz;
    default:
      return 0.0;
  }
}

namespace {

struct Block {
  Complex ii, ij, ji, jj;
};

Block rotation_block(double angle, double phase) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex e = std::polar(1.0, phase);
  return Block{c, -s * std::conj(e), s * e, c};
}

void check_pair(int dim, int i, int j) {
  if (i == j) throw std::invalid_argument("rotation: levels must differ");
  if (i < 0 || j < 0 || i >= dim || j >= dim) {
    throw std::invalid_argument("rotation: level index out of range");
  }
}

}  // namespace

CMatrix rotation_propagator(int dim, int i, int j, double angle, double phase) {
  check_pair(dim, i, j);
  const Block b = rotation_block(angle, phase);
  CMatrix u = CMatrix::Identity(dim, dim);
  u(i, i) = b.ii;
  u(i, j) = b.ij;
  u(j, i) = b.ji;
  u(j, j) = b.jj;
  return u;
}

void apply_rotation(CVector& state, int i, int j, double angle, double phase) {
  check_pair(static_cast<int>(state.size()), i, j);
  const Block b = rotation_block(angle, phase);
  const Complex ci = state(i);
  const Complex cj = state(j);
  state(i) = b.ii * ci + b.ij * cj;
  state(j) = b.ji * ci + b.jj * cj;
}

void apply_rotation(CMatrix& rho, int i, int j, double angle, double phase) {
  check_pair(static_cast<int>(rho.rows()), i, j);
  const Block b = rotation_block(angle, phase);
  const Eigen::Index n = rho.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    const Complex ri = rho(i, c);
    const Complex rj = rho(j, c);
    rho(i, c) = b.ii * ri + b.ij * rj;
    rho(j, c) = b.ji * ri + b.jj * rj;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const Complex ci = rho(r, i);
    const Complex cj = rho(r, j);
    rho(r, i) = ci * std::conj(b.ii) + cj * std::conj(b.ij);
    rho(r, j) = ci * std::conj(b.ji) + cj * std::conj(b.jj);
  }
}

std::pair<int, int> pulse_indices(const Pulse& pulse, const LevelView& view) {
  const auto i = view.index_of(pulse.transition.lower);
  const auto j = view.index_of(pulse.transition.upper);
  if (!i || !j) {
    throw InvalidSequence("pulse '" + pulse.tag + "' addresses " +
                          to_string(pulse.transition.lower) + " <-> " +
                          to_string(pulse.transition.upper) + ", outside the active view");
  }
  return {static_cast<int>(*i), static_cast<int>(*j)};
}

CVector free_evolution_phases(const CVector& state, double tau_us, const Detunings& det,
                              const LevelView& view) {
  if (static_cast<std::size_t>(state.size()) != view.size()) {
    throw std::invalid_argument("free_evolution_phases: state size does not match view");
  }
  CVector out = state;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const double offset = det.level_offset_MHz(view[k]);
    if (offset != 0.0) {
      out(static_cast<Eigen::Index>(k)) *= std::polar(1.0, -kTwoPi * offset * tau_us);
    }
  }
  return out;
}

CVector apply_sequence(const CVector& state, const LevelView& view, const PulseSequence& seq,
                       const Detunings& det, const MarkerHook& hook) {
  if (static_cast<std::size_t>(state.size()) != view.size()) {
    throw std::invalid_argument("apply_sequence: state size does not match view");
  }
  seq.validate();
  CVector psi = state;
  const auto& events = seq.events();
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0 && !det.is_zero()) {
      const double dt = position_of(events[k]) - position_of(events[k - 1]);
      if (dt > 0.0) psi = free_evolution_phases(psi, dt, det, view);
    }
    if (const auto* p = std::get_if<Pulse>(&events[k])) {
      const auto [i, j] = pulse_indices(*p, view);
      apply_rotation(psi, i, j, p->angle, p->phase);
    } else if (hook) {
      hook(std::get<Marker>(events[k]).name, psi);
    }
  }
  return psi;
}

CMatrix apply_sequence_rho(const CMatrix& rho, const LevelView& view, const PulseSequence& seq,
                           const FreeEvolutionRho& free, const MarkerHookRho& hook) {
  if (static_cast<std::size_t>(rho.rows()) != view.size() || rho.rows() != rho.cols()) {
    throw std::invalid_argument("apply_sequence_rho: rho size does not match view");
  }
  seq.validate();
  CMatrix r = rho;
  const auto& events = seq.events();
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0 && free) {
      const double dt = position_of(events[k]) - position_of(events[k - 1]);
      if (dt > 0.0) free(dt, r);
    }
    if (const auto* p = std::get_if<Pulse>(&events[k])) {
      const auto [i, j] = pulse_indices(*p, view);
      apply_rotation(r, i, j, p->angle, p->phase);
    } else if (hook) {
      hook(std::get<Marker>(events[k]).name, r);
    }
  }
  return r;
}

CMatrix sequence_propagator(const PulseSequence& seq, const LevelView& view) {
  const int dim = static_cast<int>(view.size());
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const Pulse& p : seq.pulses()) {
    const auto [i, j] = pulse_indices(p, view);
    u = rotation_propagator(dim, i, j, p.angle, p.phase) * u;
  }
  return u;
}

bool PhaseCycle::is_balanced() const {
  int total = 0;
  for (const auto& s : steps) total += s.sign;
  return !steps.empty() && total == 0;
}

PulseSequence PhaseCycle::apply(const PulseSequence& seq, std::size_t step) const {
  const PhaseCycleStep& s = steps.at(step);
  PulseSequence out = seq;
  for (auto& e : out.mutable_events()) {
    auto* p = std::get_if<Pulse>(&e);
    if (!p) continue;
    if (auto it = s.phase_override.find(p->tag); it != s.phase_override.end()) {
      p->phase = it->second;
    }
    if (std::find(s.negate_angle.begin(), s.negate_angle.end(), p->tag) != s.negate_angle.end()) {
      p->angle = -p->angle;
    }
  }
  return out;
}

PhaseCycle PhaseCycle::single() { return PhaseCycle{{PhaseCycleStep{}}}; }

PhaseCycle PhaseCycle::four_step() {
  const std::vector<std::string> alternating{"6", "9", "10"};
  PhaseCycle c;
  c.steps.push_back({{{"mw_pi2", 0.0}}, {}, +1});
  c.steps.push_back({{{"mw_pi2", kPi}}, {}, -1});
  c.steps.push_back({{{"mw_pi2", 0.0}}, alternating, -1});
  c.steps.push_back({{{"mw_pi2", kPi}}, alternating, +1});
  return c;
}

Complex run_phase_cycle(const PulseSequence& seq, const PhaseCycle& cycle,
                        const std::function<Complex(const PulseSequence&)>& observable) {
  if (cycle.steps.empty()) throw std::invalid_argument("run_phase_cycle: empty cycle");
  Complex sum = 0.0;
  for (std::size_t k = 0; k < cycle.steps.size(); ++k) {
    sum += static_cast<double>(cycle.steps[k].sign) * observable(cycle.apply(seq, k));
  }
  return sum / static_cast<double>(cycle.steps.size());
}

}  // namespace qmem
