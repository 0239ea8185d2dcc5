#include "qmem/sequence_table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qmem {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string normalise(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  replace_all(s, "\xCF\x84", "tau");  // τ
  replace_all(s, "\xCF\x80", "pi");   // π
  replace_all(s, "\xC2\xB1", "~");    // ±
  replace_all(s, "+/-", "~");
  return s;
}

// Parses a leading decimal number; returns 1 when absent.
double coefficient(const std::string& s, const std::string& context) {
  if (s.empty()) return 1.0;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse '" + context + "'");
  }
  if (used != s.size()) throw std::invalid_argument("cannot parse '" + context + "'");
  return v;
}

}  // namespace

double evaluate_position(const std::string& expr, double unit_delay_us, double tau_us) {
  const std::string s = normalise(expr);
  if (s.empty()) throw std::invalid_argument("empty position expression");
  double total = 0.0;
  std::size_t k = 0;
  while (k < s.size()) {
    double sign = 1.0;
    if (s[k] == '+' || s[k] == '-') {
      sign = s[k] == '-' ? -1.0 : 1.0;
      ++k;
    }
    std::size_t end = s.find_first_of("+-", k);
    // Keep exponents like 1e-3 inside the term.
    while (end != std::string::npos && end > k && (s[end - 1] == 'e' || s[end - 1] == 'E')) {
      end = s.find_first_of("+-", end + 1);
    }
    std::string term = s.substr(k, end == std::string::npos ? std::string::npos : end - k);
    if (term.empty()) throw std::invalid_argument("malformed position '" + expr + "'");
    double value = 0.0;
    if (term.size() >= 3 && term.compare(term.size() - 3, 3, "tau") == 0) {
      value = coefficient(term.substr(0, term.size() - 3), expr) * tau_us;
    } else if (term.back() == 'U') {
      value = coefficient(term.substr(0, term.size() - 1), expr) * unit_delay_us;
    } else {
      value = coefficient(term, expr);
    }
    total += sign * value;
    k = end == std::string::npos ? s.size() : end;
  }
  return total;
}

double parse_angle(const std::string& text, int alternation) {
  std::string s = normalise(text);
  if (s.empty()) throw std::invalid_argument("empty angle");
  if (s == "+x" || s == "x") return 0.0;
  if (s == "-x") return kPi;
  if (s == "+y" || s == "y") return 0.5 * kPi;
  if (s == "-y") return 1.5 * kPi;
  double sign = 1.0;
  if (s[0] == '~') {
    sign = alternation < 0 ? -1.0 : 1.0;
    s.erase(0, 1);
  } else if (s[0] == '+' || s[0] == '-') {
    sign = s[0] == '-' ? -1.0 : 1.0;
    s.erase(0, 1);
  }
  const std::size_t pi = s.find("pi");
  if (pi == std::string::npos) return sign * coefficient(s, text);
  const double num = coefficient(s.substr(0, pi), text);
  std::string rest = s.substr(pi + 2);
  double den = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw std::invalid_argument("cannot parse angle '" + text + "'");
    den = coefficient(rest.substr(1), text);
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + text + "'");
  }
  return sign * num * kPi / den;
}

TransitionLabel transition_for(const std::string& label, const SpinSystem* sys) {
  TransitionLabel t;
  if (label == "f1") {
    t = {Level{-1, -3}, Level{-1, -1}};
  } else if (label == "f2") {
    t = {Level{-1, -1}, Level{-1, 1}};
  } else if (label == "f3") {
    t = {Level{-1, 1}, Level{-1, 3}};
  } else if (label == "f1+f2") {
    t = {Level{-1, -3}, Level{-1, 1}};
  } else if (label == "f2+f3") {
    t = {Level{-1, -1}, Level{-1, 3}};
  } else if (label == "MW") {
    t = {Level{-1, -1}, Level{1, -1}};
  } else {
    throw std::invalid_argument("unknown frequency label '" + label + "'");
  }
  if (sys) t.frequency_MHz = std::abs(sys->energy(t.upper) - sys->energy(t.lower));
  return t;
}

PulseKind kind_for(const std::string& label) {
  return label == "MW" ? PulseKind::MW : PulseKind::RF;
}

PulseSequence resolve(const SequenceTable& table, const ResolveOptions& options) {
  PulseSequence seq(options.unit_delay_us);
  for (const TableRow& row : table.rows) {
    if (!row.group.empty() &&
        std::find(options.disabled_groups.begin(), options.disabled_groups.end(), row.group) !=
            options.disabled_groups.end()) {
      continue;
    }
    Pulse p;
    p.transition = transition_for(row.frequency, options.system);
    p.kind = kind_for(row.frequency);
    p.angle = parse_angle(row.amplitude, options.alternation);
    p.phase = parse_angle(row.phase);
    p.position_us = evaluate_position(row.position, options.unit_delay_us, options.tau_us);
    p.tag = row.id;
    seq.add(std::move(p));
  }
  seq.validate();
  return seq;
}

SequenceTable qec_table() {
  SequenceTable t;
  t.rows = {
      {"1", "f2", "0", "+pi", "0", ""},
      {"2", "f1", "U", "+pi/3", "0", ""},
      {"3", "f3", "2U", "+pi/3", "0", ""},
      {"4", "f2", "3U", "-pi", "0", ""},
      {"5", "f2", "3U + tau", "+pi", "0", ""},
      {"6", "f1", "4U + tau", "±pi", "0", ""},
      {"7", "f3", "5U + tau", "+pi", "0", ""},
      {"8", "f2", "6U + tau", "+pi", "0", ""},
      {"9", "f1", "7U + tau", "±pi", "0", ""},
      {"10", "f3", "8U + tau", "±pi", "0", ""},
      {"11", "f2", "9U + tau", "-pi", "0", ""},
      {"12", "f2", "15U + tau", "+pi", "0", ""},
      {"13", "f2", "9U + 2tau", "+pi", "0", ""},
      {"14", "f1", "10U + 2tau", "+pi", "0", "green"},
      {"15", "f3", "11U + 2tau", "+pi", "0", "green"},
      {"16", "f2", "12U + 2tau", "+pi", "0", ""},
  };
  return t;
}

SequenceTable experiment_table() {
  const SequenceTable rf = qec_table();
  SequenceTable t;
  for (const TableRow& row : rf.rows) {
    if (row.id == "1") {
      t.rows.push_back({"mw_pi2", "MW", "0", "+pi/2", "0", ""});
      t.rows.push_back({"mw_1", "MW", "0", "+pi", "0", ""});
      t.rows.push_back(row);
      t.rows.push_back({"mw_2", "MW", "0", "+pi", "0", ""});
    } else if (row.id == "16") {
      t.rows.push_back({"mw_3", "MW", row.position, "+pi", "0", ""});
      t.rows.push_back(row);
      t.rows.push_back({"mw_4", "MW", row.position, "+pi", "0", ""});
    } else {
      t.rows.push_back(row);
    }
  }
  return t;
}

SequenceTable select_rows(const SequenceTable& table, const std::vector<std::string>& ids) {
  SequenceTable t;
  for (const TableRow& row : table.rows) {
    if (std::find(ids.begin(), ids.end(), row.id) != ids.end()) t.rows.push_back(row);
  }
  return t;
}

nlohmann::json to_json(const SequenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const TableRow& r : table.rows) {
    nlohmann::json j{{"pulse", r.id},
                     {"frequency", r.frequency},
                     {"position", r.position},
                     {"amplitude", r.amplitude},
                     {"phase", r.phase}};
    if (!r.group.empty()) j["group"] = r.group;
    rows.push_back(std::move(j));
  }
  return nlohmann::json{{"rows", rows}};
}

SequenceTable table_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
    throw std::invalid_argument("pulse table: expected an object with a 'rows' array");
  }
  SequenceTable t;
  std::size_t n = 0;
  for (const auto& row : j["rows"]) {
    const std::string where = "pulse table row " + std::to_string(n++);
    auto text = [&](const char* key, bool required) -> std::string {
      if (!row.contains(key)) {
        if (required) throw std::invalid_argument(where + ": missing key '" + key + "'");
        return {};
      }
      const auto& v = row[key];
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number()) return v.dump();
      throw std::invalid_argument(where + ": key '" + key + "' must be a string or number");
    };
    TableRow r;
    r.id = text("pulse", true);
    r.frequency = text("frequency", true);
    r.position = text("position", true);
    r.amplitude = text("amplitude", true);
    r.phase = text("phase", false);
    if (r.phase.empty()) r.phase = "0";
    r.group = text("group", false);
    try {
      transition_for(r.frequency);
      evaluate_position(r.position, 1.0, 1.0);
      parse_angle(r.amplitude);
      parse_angle(r.phase);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace qmem
