#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmem/error_dynamics.hpp"
#include "qmem/fitting.hpp"
#include "qmem/kernels.hpp"
#include "qmem/readout.hpp"

namespace qmem {

struct PipelineOptions {
  double unit_delay_us = 8.0;
  double tau_us = 100.0;
  bool refocus = true;      // pulses 5-12
  bool phase_cycle = true;  // four-step cycle, else its first step only
  bool green = true;        // f1/f3 pulses of the three-half readout
  const SpinSystem* system = nullptr;
};

/// MW preparation, encoding, refocusing and readout on the experiment view,
/// with the "error" marker right after pulse 4. Alternation +1.
PulseSequence qec_sequence(EchoVariant variant, const PipelineOptions& options);

struct ErrorSpec {
  enum class Kind { None, Exact, Series };
  Kind kind = Kind::None;
  double theta = 0.0;
  SeriesModel series;

  static ErrorSpec none() { return {}; }
  static ErrorSpec exact(double theta) { return {Kind::Exact, theta, {}}; }
  static ErrorSpec with_series(double theta, SeriesModel m) { return {Kind::Series, theta, std::move(m)}; }
};

/// Cycled echo of one ensemble member, in reported quadrature.
Complex pipeline_echo(EchoVariant variant, const PipelineOptions& options, const ErrorSpec& error,
                      const ShotDraw& draw = {});

/// Both readout variants at one theta.
EchoRecord pipeline_record(double theta, const PipelineOptions& options, const ShotDraw& draw = {});

/// Density-matrix pipeline with L = sqrt(2/T2n) I_z acting during every free
/// interval. U is forced to 0 so each storage half is exactly tau.
Complex storage_echo(EchoVariant variant, double tau_us, const LindbladModel& lindblad,
                     const PipelineOptions& options, const ShotDraw& draw = {});
EchoRecord storage_record(double two_tau_ms, const LindbladModel& lindblad,
                          const PipelineOptions& options, const ShotDraw& draw = {});

/// Closed forms of the storage combinations for the minimal model.
double storage_model_uncorrupted(double t_ms, double T2n_ms);
double storage_model_corrupted_square(double t_ms, double T2n_ms);

struct EnsembleSettings {
  InhomogeneityModel model;
  int shots = 4096;
  std::uint64_t seed = 0;
  Exec exec = Exec::OpenMP;
};

/// Every theta reuses the same shot seeds. Ideal models run one shot.
std::vector<EchoRecord> sweep_theta(const std::vector<double>& thetas,
                                    const PipelineOptions& options,
                                    const EnsembleSettings& ensemble);

std::vector<EchoRecord> sweep_storage(const std::vector<double>& two_tau_ms,
                                      const LindbladModel& lindblad,
                                      const PipelineOptions& options,
                                      const EnsembleSettings& ensemble);

/// Population difference of a two-level line after a single pulse of
/// nominal angle n pi, ensemble-averaged. `line` is f1, f2, f3 or MW.
std::vector<double> nutation_signal(const std::string& line, const std::vector<int>& n,
                                    const EnsembleSettings& ensemble);

/// Coherence (|a> + |b>)/sqrt2 on `line` after n pi pulses of phase theta;
/// returns Re 2 conj(c_a) c_b per theta. theta = 0 is the CP condition.
std::vector<double> dd_signal(const std::string& line, int n, const std::vector<double>& theta,
                              const EnsembleSettings& ensemble);

struct FidelityLine {
  std::string name;        // e.g. "MW nutation", "f1 DD n=4"
  PulseKind kind = PulseKind::RF;
  double sigma_true = 0.0;
  double sigma_fit = 0.0;
  double fidelity = 1.0;   // from sigma_fit
  double fidelity_ci = 0.0;  // 95% half-width from batch means
};

/// Nutation on MW, DD n = 2, 4 on f1 and f2, each fitted for sigma.
std::vector<FidelityLine> fidelity_report(const EnsembleSettings& ensemble, int batches = 8);

}  // namespace qmem
