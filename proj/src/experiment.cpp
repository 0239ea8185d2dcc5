#include "qmem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmem/sequence_table.hpp"

namespace qmem {

namespace {

CVector pseudo_pure_start() {
  CVector psi = CVector::Zero(5);
  psi(4) = 1.0;
  return psi;
}

void apply_error(const ErrorSpec& error, CVector& psi) {
  const LevelView& view = LevelView::experiment();
  switch (error.kind) {
    case ErrorSpec::Kind::Exact:
      psi = z_error_exact(psi, error.theta, view);
      break;
    case ErrorSpec::Kind::Series:
      psi = z_error_series(psi, error.theta, error.series, view);
      break;
    case ErrorSpec::Kind::None:
      break;
  }
}

void dephase(CMatrix& rho, double dt_us, const LindbladModel& lindblad, const Detunings& det) {
  const LevelView& view = LevelView::experiment();
  const Eigen::Index n = rho.rows();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double dm = view[a].mi() - view[b].mi();
      const double df = det.level_offset_MHz(view[a]) - det.level_offset_MHz(view[b]);
      double decay = 1.0;
      if (dm != 0.0) decay = std::exp(-dm * dm * (dt_us * 1e-3) / lindblad.T2n_ms);
      rho(a, b) *= decay * std::polar(1.0, -kTwoPi * df * dt_us);
    }
  }
}

PhaseCycle cycle_for(const PipelineOptions& options) {
  return options.phase_cycle ? PhaseCycle::four_step() : PhaseCycle::single();
}

std::pair<int, int> line_indices(const std::string& line) {
  Pulse p;
  p.transition = transition_for(line);
  return pulse_indices(p, LevelView::experiment());
}

double draw_for(const std::string& line, const ShotDraw& draw) {
  return kind_for(line) == PulseKind::MW ? draw.g_MW : draw.g_RF;
}

}  // namespace

PulseSequence qec_sequence(EchoVariant variant, const PipelineOptions& options) {
  SequenceTable table = experiment_table();
  if (!options.refocus) {
    std::erase_if(table.rows, [](const TableRow& r) {
      static const std::vector<std::string> ref{"5", "6", "7", "8", "9", "10", "11", "12"};
      return std::find(ref.begin(), ref.end(), r.id) != ref.end();
    });
  }
  ResolveOptions ro;
  ro.unit_delay_us = options.unit_delay_us;
  ro.tau_us = options.tau_us;
  ro.system = options.system;
  if (variant == EchoVariant::Half || !options.green) ro.disabled_groups.push_back("green");
  PulseSequence seq = resolve(table, ro);
  seq.mark_after("4", "error");
  return seq;
}

namespace {

Complex echo_of(const PulseSequence& base, EchoVariant variant, const PipelineOptions& options,
                const ErrorSpec& error, const ShotDraw& draw) {
  const PulseSequence seq = scale_sequence(base, draw);
  const CVector start = pseudo_pure_start();
  const auto observable = [&](const PulseSequence& step) {
    const CVector out = apply_sequence(start, LevelView::experiment(), step, draw.detunings,
                                       [&](std::string_view name, CVector& psi) {
                                         if (name == "error") apply_error(error, psi);
                                       });
    return raw_echo(out);
  };
  return report_quadrature(run_phase_cycle(seq, cycle_for(options), observable), variant);
}

Complex storage_echo_of(const PulseSequence& base, EchoVariant variant,
                        const LindbladModel& lindblad, const PipelineOptions& options,
                        const ShotDraw& draw) {
  const PulseSequence seq = scale_sequence(base, draw);
  const CVector psi = pseudo_pure_start();
  const CMatrix rho0 = psi * psi.adjoint();
  const auto observable = [&](const PulseSequence& step) {
    const CMatrix rho = apply_sequence_rho(
        rho0, LevelView::experiment(), step,
        [&](double dt_us, CMatrix& r) { dephase(r, dt_us, lindblad, draw.detunings); });
    return 2.0 * rho(4, 1);
  };
  return report_quadrature(run_phase_cycle(seq, cycle_for(options), observable), variant);
}

PipelineOptions storage_options(const PipelineOptions& options, double tau_us) {
  PipelineOptions opt = options;
  opt.unit_delay_us = 0.0;
  opt.tau_us = tau_us;
  return opt;
}

}  // namespace

Complex pipeline_echo(EchoVariant variant, const PipelineOptions& options, const ErrorSpec& error,
                      const ShotDraw& draw) {
  return echo_of(qec_sequence(variant, options), variant, options, error, draw);
}

EchoRecord pipeline_record(double theta, const PipelineOptions& options, const ShotDraw& draw) {
  const ErrorSpec error = ErrorSpec::exact(theta);
  const Complex half = pipeline_echo(EchoVariant::Half, options, error, draw);
  const Complex three = pipeline_echo(EchoVariant::ThreeHalf, options, error, draw);
  return EchoRecord{theta, half.real(), half.imag(), three.real(), three.imag()};
}

Complex storage_echo(EchoVariant variant, double tau_us, const LindbladModel& lindblad,
                     const PipelineOptions& options, const ShotDraw& draw) {
  lindblad.validate();
  const PipelineOptions opt = storage_options(options, tau_us);
  return storage_echo_of(qec_sequence(variant, opt), variant, lindblad, opt, draw);
}

EchoRecord storage_record(double two_tau_ms, const LindbladModel& lindblad,
                          const PipelineOptions& options, const ShotDraw& draw) {
  if (!(two_tau_ms >= 0.0)) throw std::invalid_argument("storage time must be >= 0");
  const double tau_us = 0.5 * two_tau_ms * 1e3;
  const Complex half = storage_echo(EchoVariant::Half, tau_us, lindblad, options, draw);
  const Complex three = storage_echo(EchoVariant::ThreeHalf, tau_us, lindblad, options, draw);
  return EchoRecord{two_tau_ms, half.real(), half.imag(), three.real(), three.imag()};
}

double storage_model_uncorrupted(double t_ms, double T2n_ms) {
  return 9.0 / 8.0 * std::exp(-t_ms / T2n_ms) - 1.0 / 8.0 * std::exp(-9.0 * t_ms / T2n_ms);
}

double storage_model_corrupted_square(double t_ms, double T2n_ms) {
  return 0.5 * (std::exp(-t_ms / T2n_ms) - std::exp(-9.0 * t_ms / T2n_ms));
}

namespace {

template <class PointFn>
std::vector<EchoRecord> sweep(const std::vector<double>& xs, const EnsembleSettings& ensemble,
                              PointFn point) {
  ensemble.model.validate();
  std::vector<EchoRecord> out(xs.size());
  const bool ideal = ensemble.model.is_ideal();
  const int n = static_cast<int>(xs.size());
  // Points in parallel when there are several; otherwise shots in parallel.
  const Exec outer = n > 1 ? ensemble.exec : Exec::Serial;
  const Exec inner = n > 1 ? Exec::Serial : ensemble.exec;
  for_each_index(outer, n, [&](int k) {
    if (ideal) {
      out[k] = point(k, ShotDraw{});
      return;
    }
    const auto mean = ensemble_mean(inner, ensemble.model, ensemble.shots, ensemble.seed, 2,
                                    [&](const ShotDraw& draw, Complex* acc) {
                                      const EchoRecord r = point(k, draw);
                                      acc[0] = Complex(r.I_half_x, r.I_half_y);
                                      acc[1] = Complex(r.I_threehalf_x, r.I_threehalf_y);
                                    });
    out[k] = EchoRecord{xs[k], mean[0].real(), mean[0].imag(), mean[1].real(), mean[1].imag()};
  });
  return out;
}

}  // namespace

std::vector<EchoRecord> sweep_theta(const std::vector<double>& thetas,
                                    const PipelineOptions& options,
                                    const EnsembleSettings& ensemble) {
  const PulseSequence half = qec_sequence(EchoVariant::Half, options);
  const PulseSequence three = qec_sequence(EchoVariant::ThreeHalf, options);
  return sweep(thetas, ensemble, [&](int k, const ShotDraw& draw) {
    const double theta = thetas[static_cast<std::size_t>(k)];
    const ErrorSpec error = ErrorSpec::exact(theta);
    const Complex h = echo_of(half, EchoVariant::Half, options, error, draw);
    const Complex t = echo_of(three, EchoVariant::ThreeHalf, options, error, draw);
    return EchoRecord{theta, h.real(), h.imag(), t.real(), t.imag()};
  });
}

std::vector<EchoRecord> sweep_storage(const std::vector<double>& two_tau_ms,
                                      const LindbladModel& lindblad,
                                      const PipelineOptions& options,
                                      const EnsembleSettings& ensemble) {
  lindblad.validate();
  std::vector<std::pair<PulseSequence, PulseSequence>> seqs;
  for (double t : two_tau_ms) {
    if (!(t >= 0.0)) throw std::invalid_argument("storage time must be >= 0");
    const PipelineOptions opt = storage_options(options, 0.5 * t * 1e3);
    seqs.emplace_back(qec_sequence(EchoVariant::Half, opt),
                      qec_sequence(EchoVariant::ThreeHalf, opt));
  }
  return sweep(two_tau_ms, ensemble, [&](int k, const ShotDraw& draw) {
    const double t = two_tau_ms[static_cast<std::size_t>(k)];
    const auto& [half, three] = seqs[static_cast<std::size_t>(k)];
    const PipelineOptions opt = storage_options(options, 0.5 * t * 1e3);
    const Complex h = storage_echo_of(half, EchoVariant::Half, lindblad, opt, draw);
    const Complex th = storage_echo_of(three, EchoVariant::ThreeHalf, lindblad, opt, draw);
    return EchoRecord{t, h.real(), h.imag(), th.real(), th.imag()};
  });
}

std::vector<double> nutation_signal(const std::string& line, const std::vector<int>& n,
                                    const EnsembleSettings& ensemble) {
  ensemble.model.validate();
  const auto [i, j] = line_indices(line);
  const int width = static_cast<int>(n.size());
  const auto mean = ensemble_mean(
      ensemble.exec, ensemble.model, ensemble.shots, ensemble.seed, width,
      [&, i = i, j = j](const ShotDraw& draw, Complex* acc) {
        const double scale = 1.0 + draw_for(line, draw);
        for (int k = 0; k < width; ++k) {
          CVector psi = CVector::Zero(5);
          psi(i) = 1.0;
          apply_rotation(psi, i, j, n[k] * kPi * scale, 0.0);
          acc[k] = std::norm(psi(i)) - std::norm(psi(j));
        }
      });
  std::vector<double> out;
  for (const Complex& c : mean) out.push_back(c.real());
  return out;
}

std::vector<double> dd_signal(const std::string& line, int n, const std::vector<double>& theta,
                              const EnsembleSettings& ensemble) {
  ensemble.model.validate();
  if (n < 1) throw std::invalid_argument("dd_signal: n must be >= 1");
  const auto [i, j] = line_indices(line);
  const int width = static_cast<int>(theta.size());
  const auto mean = ensemble_mean(
      ensemble.exec, ensemble.model, ensemble.shots, ensemble.seed, width,
      [&, i = i, j = j](const ShotDraw& draw, Complex* acc) {
        const double angle = kPi * (1.0 + draw_for(line, draw));
        for (int k = 0; k < width; ++k) {
          CVector psi = CVector::Zero(5);
          psi(i) = psi(j) = 1.0 / std::sqrt(2.0);
          for (int p = 0; p < n; ++p) apply_rotation(psi, i, j, angle, theta[k]);
          acc[k] = 2.0 * std::conj(psi(i)) * psi(j);
        }
      });
  std::vector<double> out;
  for (const Complex& c : mean) out.push_back(c.real());
  return out;
}

namespace {

std::vector<int> nutation_grid(double sigma) {
  int n_max = 12;
  if (sigma > 0.0) n_max = std::clamp(static_cast<int>(std::sqrt(2.5) / sigma), 3, 12);
  std::vector<int> n(static_cast<std::size_t>(n_max));
  std::iota(n.begin(), n.end(), 1);
  return n;
}

std::vector<double> dd_grid() {
  std::vector<double> theta;
  for (int k = 0; k <= 16; ++k) theta.push_back(kPi * k / 16.0);
  return theta;
}

}  // namespace

std::vector<FidelityLine> fidelity_report(const EnsembleSettings& ensemble, int batches) {
  ensemble.model.validate();
  if (batches < 2) throw std::invalid_argument("fidelity_report: need >= 2 batches");
  if (ensemble.shots < batches) throw std::invalid_argument("fidelity_report: too few shots");

  struct Job {
    std::string name;
    std::string line;
    int pulses;  // 0 = nutation
  };
  const std::vector<Job> jobs{{"MW nutation", "MW", 0},  {"f2 nutation", "f2", 0},
                              {"f1 DD n=2", "f1", 2},    {"f1 DD n=4", "f1", 4},
                              {"f2 DD n=2", "f2", 2},    {"f2 DD n=4", "f2", 4}};
  const std::vector<double> theta = dd_grid();
  std::vector<FidelityLine> out;
  for (std::size_t jdx = 0; jdx < jobs.size(); ++jdx) {
    const Job& job = jobs[jdx];
    FidelityLine line;
    line.name = job.name;
    line.kind = kind_for(job.line);
    line.sigma_true = line.kind == PulseKind::MW ? ensemble.model.sigma_MW : ensemble.model.sigma_RF;
    const std::vector<int> n = nutation_grid(line.sigma_true);

    const std::size_t width = job.pulses == 0 ? n.size() : theta.size();
    std::vector<double> total(width, 0.0);
    std::vector<double> batch_fidelity;
    for (int b = 0; b < batches; ++b) {
      EnsembleSettings sub = ensemble;
      sub.shots = ensemble.shots / batches;
      sub.seed = block_seed(ensemble.seed, 1000003ULL * (jdx + 1) + static_cast<std::uint64_t>(b));
      const std::vector<double> s = job.pulses == 0 ? nutation_signal(job.line, n, sub)
                                                    : dd_signal(job.line, job.pulses, theta, sub);
      for (std::size_t k = 0; k < width; ++k) total[k] += s[k] / batches;
      const SigmaEstimate e =
          job.pulses == 0 ? fit_nutation_envelope(n, s) : fit_dd_fidelity(theta, s, job.pulses);
      batch_fidelity.push_back(e.fidelity);
    }
    const SigmaEstimate e = job.pulses == 0 ? fit_nutation_envelope(n, total)
                                            : fit_dd_fidelity(theta, total, job.pulses);
    line.sigma_fit = e.sigma;
    line.fidelity = e.fidelity;
    const double mean = std::accumulate(batch_fidelity.begin(), batch_fidelity.end(), 0.0) / batches;
    double var = 0.0;
    for (double f : batch_fidelity) var += (f - mean) * (f - mean);
    var /= (batches - 1);
    line.fidelity_ci = 1.96 * std::sqrt(var / batches);
    out.push_back(line);
  }
  return out;
}

}  // namespace qmem
