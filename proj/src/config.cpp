#include "qmem/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qmem {

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  if (points == 1) return {min};
  for (int k = 0; k < points; ++k) v.push_back(min + (max - min) * k / (points - 1));
  return v;
}

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_, "expected a JSON object");
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key), "expected a number, got " + kind(*v));
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(path(key), "must be finite");
    }
  }
  void number(const char* key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      double d = 0.0;
      number(key, d);
      out = d;
      (void)v;
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer, got " + kind(*v));
      out = v->get<int>();
    }
  }
  void unsigned_integer(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(path(key), "expected a nonnegative integer, got " + kind(*v));
      }
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false, got " + kind(*v));
      out = v->get<bool>();
    }
  }
  const json* object(const char* key) {
    const json* v = find(key);
    if (v && !v->is_object()) throw ConfigError(path(key), "expected an object, got " + kind(*v));
    return v;
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path(key.c_str()), "unknown key");
    }
  }
  std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  static std::string kind(const json& v) { return v.type_name(); }

  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_sweep(Reader& parent, const char* key, SweepSpec& spec, const char* lo, const char* hi) {
  if (const json* v = parent.object(key)) {
    Reader r(*v, parent.path(key));
    r.number(lo, spec.min);
    r.number(hi, spec.max);
    r.integer("points", spec.points);
    r.finish();
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Reader r(j, "");
  r.number("gamma_S_GHz_per_T", c.spin.gamma_S_GHz_per_T);
  r.number("gamma_I_MHz_per_T", c.spin.gamma_I_MHz_per_T);
  r.number("A_hf_MHz", c.spin.A_hf_MHz);
  r.number("D_MHz", c.spin.D_MHz);
  r.number("B_z_T", c.spin.B_z_T);
  r.number("T1e_ms", c.T1e_ms);
  r.number("T2e_us", c.T2e_us);
  r.number("T2n_ms", c.T2n_ms);
  r.number("fidelity_MW", c.fidelity_MW);
  r.number("fidelity_RF", c.fidelity_RF);
  r.number("sigma_MW", c.sigma_MW);
  r.number("sigma_RF", c.sigma_RF);
  r.number("detuning_sigma_MHz", c.detuning_sigma_MHz);
  r.number("tau_ms", c.tau_ms);
  r.number("unit_delay_us", c.unit_delay_us);
  r.integer("series_order", c.series_order);
  r.integer("shots", c.shots);
  r.unsigned_integer("seed", c.seed);
  r.boolean("refocus", c.refocus);
  r.boolean("green_pulses", c.green_pulses);
  r.boolean("ideal_pulses", c.ideal_pulses);
  r.boolean("phase_cycle", c.phase_cycle);
  read_sweep(r, "sweep_theta", c.theta, "min_rad", "max_rad");
  read_sweep(r, "sweep_storage", c.storage_ms, "min_ms", "max_ms");
  if (const json* f = r.object("fidelity")) {
    Reader fr(*f, "fidelity");
    fr.integer("batches", c.fidelity_batches);
    fr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig config_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " +
                              e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_text(text.str());
}

void ExperimentConfig::validate() const {
  try {
    spin.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("B_z_T", e.what());
  }
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  };
  positive("T1e_ms", T1e_ms);
  positive("T2e_us", T2e_us);
  positive("T2n_ms", T2n_ms);
  auto fidelity = [](const char* key, double v) {
    if (!(v > 0.5 && v <= 1.0)) throw ConfigError(key, "must lie in (0.5, 1]");
  };
  fidelity("fidelity_MW", fidelity_MW);
  fidelity("fidelity_RF", fidelity_RF);
  if (sigma_MW && *sigma_MW < 0.0) throw ConfigError("sigma_MW", "must be >= 0");
  if (sigma_RF && *sigma_RF < 0.0) throw ConfigError("sigma_RF", "must be >= 0");
  if (detuning_sigma_MHz < 0.0) throw ConfigError("detuning_sigma_MHz", "must be >= 0");
  if (tau_ms < 0.0) throw ConfigError("tau_ms", "must be >= 0");
  if (unit_delay_us < 0.0) throw ConfigError("unit_delay_us", "must be >= 0");
  if (refocus && tau_ms * 1e3 < 6.0 * unit_delay_us) {
    throw ConfigError("tau_ms", "pulse table ordering needs tau >= 6 U");
  }
  if (series_order < 1 || series_order > 12) throw ConfigError("series_order", "must be in 1..12");
  if (shots < 1) throw ConfigError("shots", "must be >= 1");
  if (theta.points < 1) throw ConfigError("sweep_theta.points", "must be >= 1");
  if (theta.points > 1 && !(theta.max > theta.min)) {
    throw ConfigError("sweep_theta.max_rad", "range is empty");
  }
  if (std::abs(theta.min) > kPi || std::abs(theta.max) > kPi) {
    throw ConfigError("sweep_theta", "range must lie within +-pi");
  }
  if (storage_ms.points < 1) throw ConfigError("sweep_storage.points", "must be >= 1");
  if (storage_ms.points > 1 && !(storage_ms.max > storage_ms.min)) {
    throw ConfigError("sweep_storage.max_ms", "range is empty");
  }
  if (storage_ms.min < 0.0) throw ConfigError("sweep_storage.min_ms", "must be >= 0");
  if (fidelity_batches < 2) throw ConfigError("fidelity.batches", "must be >= 2");
}

double ExperimentConfig::sigma_mw() const {
  return sigma_MW ? *sigma_MW : sigma_from_fidelity(fidelity_MW);
}

double ExperimentConfig::sigma_rf() const {
  return sigma_RF ? *sigma_RF : sigma_from_fidelity(fidelity_RF);
}

InhomogeneityModel ExperimentConfig::pulse_errors() const {
  return InhomogeneityModel{sigma_mw(), sigma_rf(), detuning_sigma_MHz};
}

InhomogeneityModel ExperimentConfig::inhomogeneity() const {
  if (ideal_pulses) return InhomogeneityModel{0.0, 0.0, detuning_sigma_MHz};
  return pulse_errors();
}

PipelineOptions ExperimentConfig::pipeline() const {
  PipelineOptions p;
  p.unit_delay_us = unit_delay_us;
  p.tau_us = tau_ms * 1e3;
  p.refocus = refocus;
  p.phase_cycle = phase_cycle;
  p.green = green_pulses;
  return p;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json j{{"gamma_S_GHz_per_T", c.spin.gamma_S_GHz_per_T},
         {"gamma_I_MHz_per_T", c.spin.gamma_I_MHz_per_T},
         {"A_hf_MHz", c.spin.A_hf_MHz},
         {"D_MHz", c.spin.D_MHz},
         {"B_z_T", c.spin.B_z_T},
         {"T1e_ms", c.T1e_ms},
         {"T2e_us", c.T2e_us},
         {"T2n_ms", c.T2n_ms},
         {"fidelity_MW", c.fidelity_MW},
         {"fidelity_RF", c.fidelity_RF},
         {"detuning_sigma_MHz", c.detuning_sigma_MHz},
         {"tau_ms", c.tau_ms},
         {"unit_delay_us", c.unit_delay_us},
         {"series_order", c.series_order},
         {"shots", c.shots},
         {"seed", c.seed},
         {"refocus", c.refocus},
         {"green_pulses", c.green_pulses},
         {"ideal_pulses", c.ideal_pulses},
         {"phase_cycle", c.phase_cycle},
         {"sweep_theta",
          {{"min_rad", c.theta.min}, {"max_rad", c.theta.max}, {"points", c.theta.points}}},
         {"sweep_storage",
          {{"min_ms", c.storage_ms.min},
           {"max_ms", c.storage_ms.max},
           {"points", c.storage_ms.points}}},
         {"fidelity", {{"batches", c.fidelity_batches}}}};
  if (c.sigma_MW) j["sigma_MW"] = *c.sigma_MW;
  if (c.sigma_RF) j["sigma_RF"] = *c.sigma_RF;
  return j;
}

}  // namespace qmem
