#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmem/pulse_engine.hpp"

namespace qmem {

/// One row of a pulse table. Positions and amplitudes stay symbolic until
/// resolve() is given U and tau.
struct TableRow {
  std::string id;         // "1".."16" for table pulses, "mw_*" for MW pulses
  std::string frequency;  // f1 | f2 | f3 | f1+f2 | f2+f3 | MW
  std::string position;   // e.g. "9U + 2tau"
  std::string amplitude;  // e.g. "+pi/3", "±pi"
  std::string phase = "0";
  std::string group;      // rows in a disabled group are skipped
};

struct SequenceTable {
  std::vector<TableRow> rows;
};

/// Evaluates "aU + b tau + c" style expressions (tau may be written τ).
double evaluate_position(const std::string& expr, double unit_delay_us, double tau_us);

/// "+pi/3", "-pi", "5pi/3", "±pi", "+x", "0.25" (radians). A "±" prefix
/// takes `alternation` (+1 or -1). Throws std::invalid_argument.
double parse_angle(const std::string& text, int alternation = 1);

/// Transition for a frequency label on the five-level experiment basis.
/// The frequency is filled in when a system is given.
TransitionLabel transition_for(const std::string& label, const SpinSystem* sys = nullptr);

PulseKind kind_for(const std::string& label);

struct ResolveOptions {
  double unit_delay_us = 8.0;
  double tau_us = 100.0;
  int alternation = 1;
  std::vector<std::string> disabled_groups;
  const SpinSystem* system = nullptr;
};

/// Rows in table order. Throws InvalidSequence if resolved positions
/// decrease (the 16-pulse table needs tau >= 6U).
PulseSequence resolve(const SequenceTable& table, const ResolveOptions& options);

/// The 16 RF pulses of the error-correction experiment.
/// 1-4 encode, 5-12 refocus, 13-16 decode; 14 and 15 are in group "green".
SequenceTable qec_table();

/// qec_table() with the MW pulses inserted: "mw_pi2" (pi/2) and "mw_1",
/// "mw_2" around pulse 1, "mw_3", "mw_4" around pulse 16.
SequenceTable experiment_table();

/// Rows of `table` whose id is listed, in table order.
SequenceTable select_rows(const SequenceTable& table, const std::vector<std::string>& ids);

nlohmann::json to_json(const SequenceTable& table);
/// Throws std::invalid_argument naming the offending row and key.
SequenceTable table_from_json(const nlohmann::json& j);

}  // namespace qmem
