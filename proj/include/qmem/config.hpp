#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmem/error_dynamics.hpp"
#include "qmem/experiment.hpp"
#include "qmem/spin_core.hpp"

namespace qmem {

/// Configuration problem; `key` is the JSON path of the offending entry
/// (empty for syntax errors).
struct ConfigError : std::runtime_error {
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key(std::move(key)) {}
  std::string key;
};

struct SweepSpec {
  double min = 0.0;
  double max = 0.0;
  int points = 1;

  /// Evenly spaced, endpoints included (a single point sits at min).
  std::vector<double> values() const;
};

struct ExperimentConfig {
  SpinParams spin;
  double T1e_ms = 1.3;
  double T2e_us = 80.0;
  double T2n_ms = 1.05;
  double fidelity_MW = 0.995;
  double fidelity_RF = 0.935;
  std::optional<double> sigma_MW;  // override the fidelity-derived value
  std::optional<double> sigma_RF;
  double detuning_sigma_MHz = 0.0;
  double tau_ms = 0.1;
  double unit_delay_us = 8.0;
  int series_order = 5;
  int shots = 4096;
  std::uint64_t seed = 20190101;
  bool refocus = true;
  bool green_pulses = true;
  bool ideal_pulses = false;
  bool phase_cycle = true;
  SweepSpec theta{-1.5, 1.5, 61};
  SweepSpec storage_ms{0.2, 6.0, 30};
  int fidelity_batches = 8;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;

  double sigma_mw() const;
  double sigma_rf() const;
  /// All-zero when ideal_pulses is set.
  InhomogeneityModel inhomogeneity() const;
  /// The fidelity command always uses the configured sigmas.
  InhomogeneityModel pulse_errors() const;
  LindbladModel lindblad() const { return LindbladModel{T2n_ms}; }
  PipelineOptions pipeline() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
/// Parses text; syntax errors become ConfigError with the byte offset.
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace qmem
