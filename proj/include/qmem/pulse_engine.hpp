#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmem/spin_core.hpp"
#include "qmem/types.hpp"

namespace qmem {

enum class PulseKind { MW, RF };

std::string to_string(PulseKind kind);

/// Instantaneous selective rotation on one two-level transition.
/// phase = 0 rotates about the rotating-frame y axis.
struct Pulse {
  TransitionLabel transition;
  double angle = 0.0;
  double phase = 0.0;
  double position_us = 0.0;
  PulseKind kind = PulseKind::RF;
  // Free-form name ("f2", "MW", table row number...). Phase cycles address
  // pulses through it.
  std::string tag;

  /// Throws InvalidSequence on a non-finite angle, |angle| > 4 pi or a
  /// transition outside |dm_S| <= 1, |dm_I| <= 2.
  void validate() const;
};

/// Named point in time; apply_sequence hands the state to a hook there.
struct Marker {
  std::string name;
  double position_us = 0.0;
};

using SequenceEvent = std::variant<Pulse, Marker>;

double position_of(const SequenceEvent& event);

class PulseSequence {
 public:
  PulseSequence() = default;
  explicit PulseSequence(double unit_delay_us) : unit_delay_us_(unit_delay_us) {}

  PulseSequence& add(Pulse pulse);
  PulseSequence& mark(std::string name, double position_us);

  const std::vector<SequenceEvent>& events() const { return events_; }
  std::vector<Pulse> pulses() const;
  std::size_t pulse_count() const;
  bool empty() const { return events_.empty(); }
  double unit_delay_us() const { return unit_delay_us_; }
  double duration_us() const;

  /// Gaps between consecutive events (size = events - 1).
  std::vector<double> free_intervals() const;

  /// Throws InvalidSequence if positions decrease or any pulse is invalid.
  void validate() const;

  /// Pulse order reversed and angles negated; markers dropped. Timing is
  /// mirrored so positions stay nondecreasing.
  PulseSequence inverse() const;

  /// Appends `next`, shifting its positions to start `gap_us` after the end.
  PulseSequence then(const PulseSequence& next, double gap_us = 0.0) const;

  /// Inserts a marker right after the pulse tagged `tag`, at its position.
  /// Throws std::invalid_argument if no such pulse exists.
  PulseSequence& mark_after(const std::string& tag, std::string name);

  /// Mutable access for phase cycling and ensemble sampling.
  std::vector<SequenceEvent>& mutable_events() { return events_; }

 private:
  double unit_delay_us_ = 0.0;
  std::vector<SequenceEvent> events_;
};

/// Offsets (MHz) of the three nuclear lines from their drive frequencies.
struct Detunings {
  double delta_f1_MHz = 0.0;
  double delta_f2_MHz = 0.0;
  double delta_f3_MHz = 0.0;

  /// Rotating-frame frequency of a level:
  /// m_S=-1/2: (d1+d2+d3, d1+d2, d1, 0) for m_I = -3/2, -1/2, +1/2, +3/2.
  /// Other levels sit at zero.
  double level_offset_MHz(const Level& level) const;
  bool is_zero() const { return delta_f1_MHz == 0.0 && delta_f2_MHz == 0.0 && delta_f3_MHz == 0.0; }
};

/// dim x dim identity with the {i, j} block
///   [[cos(a/2), -sin(a/2) e^{-i phase}], [sin(a/2) e^{i phase}, cos(a/2)]].
CMatrix rotation_propagator(int dim, int i, int j, double angle, double phase);

/// Same rotation applied in place, O(1).
void apply_rotation(CVector& state, int i, int j, double angle, double phase);
void apply_rotation(CMatrix& rho, int i, int j, double angle, double phase);

/// Resolves a pulse to (i, j) indices inside `view`; throws InvalidSequence.
std::pair<int, int> pulse_indices(const Pulse& pulse, const LevelView& view);

using MarkerHook = std::function<void(std::string_view, CVector&)>;

/// Applies pulses in time order with detuned free evolution between events.
/// Throws InvalidSequence for pulses outside `view` and std::invalid_argument
/// on a size mismatch.
CVector apply_sequence(const CVector& state, const LevelView& view, const PulseSequence& seq,
                       const Detunings& det = {}, const MarkerHook& hook = {});

using FreeEvolutionRho = std::function<void(double dt_us, CMatrix&)>;
using MarkerHookRho = std::function<void(std::string_view, CMatrix&)>;

/// Density-matrix counterpart: rho -> U rho U^dag per pulse, `free` called
/// for every positive gap between events.
CMatrix apply_sequence_rho(const CMatrix& rho, const LevelView& view, const PulseSequence& seq,
                           const FreeEvolutionRho& free = {}, const MarkerHookRho& hook = {});

/// Composite unitary of the pulses alone (no free evolution).
CMatrix sequence_propagator(const PulseSequence& seq, const LevelView& view);

/// exp(-i 2 pi offset(level) tau) on each amplitude.
CVector free_evolution_phases(const CVector& state, double tau_us, const Detunings& det,
                              const LevelView& view = LevelView::nuclear());

struct PhaseCycleStep {
  std::map<std::string, double> phase_override;  // tag -> phase (rad)
  std::vector<std::string> negate_angle;         // tags whose angle flips sign
  int sign = 1;
};

struct PhaseCycle {
  std::vector<PhaseCycleStep> steps;

  bool is_balanced() const;
  /// Copy of `seq` with the step's overrides applied.
  PulseSequence apply(const PulseSequence& seq, std::size_t step) const;

  static PhaseCycle single();
  /// Initial MW phase 0/pi times refocus alternation +/-, signs (+,-,-,+).
  /// Tags: "mw_pi2" for the first MW pulse, "6", "9", "10" for the
  /// alternating refocusing pulses.
  static PhaseCycle four_step();
};

/// Signed average of observable(step sequence) over the cycle.
/// Throws std::invalid_argument for an empty cycle.
Complex run_phase_cycle(const PulseSequence& seq, const PhaseCycle& cycle,
                        const std::function<Complex(const PulseSequence&)>& observable);

}  // namespace qmem
