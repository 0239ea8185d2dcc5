#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmem/config.hpp"
#include "qmem/experiment.hpp"
#include "qmem/output.hpp"
#include "qmem/spin_core.hpp"

using namespace qmem;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  bool ideal_pulses = false;
  bool no_refocus = false;
  std::optional<int> jobs;
  std::string csv;  // fit
};

struct Run {
  ExperimentConfig config;
  std::string command;
  fs::path dir;
  std::string id;
  std::vector<std::string> outputs;

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }

  // Every JSON artifact points back at the manifest.
  void json_out(const std::string& name, json j) {
    j["manifest"] = "manifest.json";
    j["run_id"] = id;
    write_json(path(name), j);
  }

  void finish() {
    write_manifest((dir / "manifest.json").string(),
                   Manifest{to_json(config), config.seed, command, outputs});
  }
};

Run start(const Flags& f, const std::string& command) {
  Run r;
  r.config = f.config.empty() ? config_from_json(json::object()) : load_config(f.config);
  if (f.seed) r.config.seed = *f.seed;
  if (f.shots) r.config.shots = *f.shots;
  if (f.ideal_pulses) r.config.ideal_pulses = true;
  if (f.no_refocus) r.config.refocus = false;
  r.config.validate();
  if (f.jobs) set_worker_threads(*f.jobs);
  r.command = command;
  r.dir = f.out;
  fs::create_directories(r.dir);
  r.id = run_id(command + "\n" + to_json(r.config).dump());
  return r;
}

EnsembleSettings ensemble_of(const ExperimentConfig& c, const InhomogeneityModel& m) {
  return EnsembleSettings{m, c.shots, c.seed, Exec::OpenMP};
}

void frequencies(const Flags& f) {
  Run r = start(f, "frequencies");
  const SpinSystem sys = build_hamiltonian(r.config.spin);
  struct Row {
    std::string name;
    Level lower, upper;
    double f = 0;
    bool degenerate = false;
  };
  std::vector<Row> rows;
  for (int two_mi = -5; two_mi <= 5; two_mi += 2) {
    const TransitionLabel t = esr_transition(sys, 0.5 * two_mi);
    rows.push_back({"ESR", t.lower, t.upper, t.frequency_MHz});
  }
  const char* nmr_names[5] = {"nmr", "f1", "f2", "f3", "nmr"};
  for (int k = 0; k < 5; ++k) {
    const Level a = Level::of(-0.5, -2.5 + k), b = Level::of(-0.5, -1.5 + k);
    rows.push_back({nmr_names[k], a, b, std::abs(sys.energy(b) - sys.energy(a))});
  }
  for (auto& x : rows)
    for (const auto& y : rows)
      if (&x != &y && (x.name == "ESR") == (y.name == "ESR") && std::abs(x.f - y.f) < 1e-3)
        x.degenerate = true;

  std::ofstream out(r.path("frequencies.csv"));
  out << "# manifest=manifest.json run_id=" << r.id << "\n";
  out << "name,lower_ms,lower_mi,upper_ms,upper_mi,frequency_MHz,degenerate\n";
  std::printf("%-5s %-14s %-14s %14s\n", "line", "lower", "upper", "MHz");
  for (const auto& x : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%g,%g,%g,%g,%.17g,%d\n", x.name.c_str(), x.lower.ms(),
                  x.lower.mi(), x.upper.ms(), x.upper.mi(), x.f, x.degenerate ? 1 : 0);
    out << buf;
    std::printf("%-5s %-14s %-14s %14.5f%s\n", x.name.c_str(), to_string(x.lower).c_str(),
                to_string(x.upper).c_str(), x.f, x.degenerate ? "  degenerate" : "");
  }
  if (!out) throw std::runtime_error("write failed for frequencies.csv");
  out.close();
  r.finish();
}

void report_fit(const FitResult& fit) {
  std::printf("fit %s (%d iterations)%s%s\n", fit.converged ? "converged" : "NOT converged",
              fit.iterations, fit.diagnostics.empty() ? "" : ": ", fit.diagnostics.c_str());
  for (std::size_t k = 0; k < fit.params.size(); ++k) {
    std::printf("  %s = %.6g", fit.names[k].c_str(), fit.params[k]);
    if (k < fit.sigmas.size()) std::printf(" +- %.2g", fit.sigmas[k]);
    std::printf("  (A/A0 = %.4f)\n", fit.params[k] / fit.params[0]);
  }
}

void sweep_theta_cmd(const Flags& f) {
  Run r = start(f, "sweep-theta");
  const auto& c = r.config;
  const auto recs = sweep_theta(c.theta.values(), c.pipeline(), ensemble_of(c, c.inhomogeneity()));
  write_echo_csv(r.path("theta.csv"), r.id, recs);
  // Too few points for the series is reported, not fatal.
  FitResult fit;
  try {
    fit = fit_series(recs, c.series_order);
  } catch (const std::invalid_argument& e) {
    fit.diagnostics = e.what();
  }
  r.json_out("fit.json", fit_to_json(fit, c.seed));
  report_fit(fit);
  r.finish();
}

void sweep_storage_cmd(const Flags& f) {
  Run r = start(f, "sweep-storage");
  const auto& c = r.config;
  const auto ts = c.storage_ms.values();
  const auto recs = sweep_storage(ts, c.lindblad(), c.pipeline(), ensemble_of(c, c.inhomogeneity()));
  std::vector<double> u, s, mu, ms;
  for (const auto& rec : recs) {
    u.push_back(combine_uncorrupted(rec));
    s.push_back(combine_corrupted_square(rec));
    mu.push_back(storage_model_uncorrupted(rec.sweep, c.T2n_ms));
    ms.push_back(storage_model_corrupted_square(rec.sweep, c.T2n_ms));
  }
  // one vertical scale shared by both model curves
  std::vector<double> y = u, m = mu;
  y.insert(y.end(), s.begin(), s.end());
  m.insert(m.end(), ms.begin(), ms.end());
  const double scale = fit_vertical_scale(y, m);
  for (double& v : mu) v *= scale;
  for (double& v : ms) v *= scale;
  write_echo_csv(r.path("storage.csv"), r.id, recs,
                 {{"uncorrupted", u}, {"corrupted_square", s}, {"model_uncorrupted", mu},
                  {"model_corrupted_square", ms}});
  r.json_out("storage_fit.json", {{"T2n_ms", c.T2n_ms}, {"vertical_scale", scale}, {"seed", c.seed}});
  std::printf("vertical scale %.6g over %zu storage times\n", scale, ts.size());
  r.finish();
}

void fidelity_cmd(const Flags& f) {
  Run r = start(f, "fidelity");
  const auto& c = r.config;
  const auto lines = fidelity_report(ensemble_of(c, c.pulse_errors()), c.fidelity_batches);
  json arr = json::array();
  for (const auto& l : lines) {
    arr.push_back({{"name", l.name},
                   {"kind", to_string(l.kind)},
                   {"sigma_true", l.sigma_true},
                   {"sigma_fit", l.sigma_fit},
                   {"fidelity", l.fidelity},
                   {"fidelity_ci95", l.fidelity_ci}});
    std::printf("%-12s sigma %.4f (true %.4f)  F = %.2f +- %.2f %%\n", l.name.c_str(), l.sigma_fit,
                l.sigma_true, 100 * l.fidelity, 100 * l.fidelity_ci);
  }
  r.json_out("fidelity.json", {{"lines", arr}, {"shots", c.shots}, {"batches", c.fidelity_batches},
                               {"seed", c.seed}});
  r.finish();
}

void fit_cmd(const Flags& f) {
  Run r = start(f, "fit");
  const auto recs = read_echo_csv(f.csv);
  const FitResult fit = fit_series(recs, r.config.series_order);
  json j = fit_to_json(fit, r.config.seed);
  j["input"] = f.csv;
  r.json_out("fit.json", j);
  report_fit(fit);
  r.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qudit memory simulator"};
  app.set_version_flag("--version", QMEM_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "output directory")->capture_default_str();
  app.add_option("--seed", flags.seed, "override config seed");
  app.add_option("--shots", flags.shots, "override config shots")->check(CLI::PositiveNumber);
  app.add_flag("--ideal-pulses", flags.ideal_pulses, "no pulse-angle errors");
  app.add_flag("--no-refocus", flags.no_refocus, "drop the refocusing block");
  app.add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* freq = app.add_subcommand("frequencies", "ESR and NMR transition table");
  auto* theta = app.add_subcommand("sweep-theta", "echoes vs error angle, with series fit");
  auto* storage = app.add_subcommand("sweep-storage", "echo combinations vs storage time");
  auto* fid = app.add_subcommand("fidelity", "pulse fidelity from nutation and DD");
  auto* fit = app.add_subcommand("fit", "series fit of an existing theta CSV");
  fit->add_option("csv", flags.csv, "theta CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (freq->parsed()) frequencies(flags);
    else if (theta->parsed()) sweep_theta_cmd(flags);
    else if (storage->parsed()) sweep_storage_cmd(flags);
    else if (fid->parsed()) fidelity_cmd(flags);
    else if (fit->parsed()) fit_cmd(flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "qmem: config error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qmem: %s\n", e.what());
    return 1;
  }
  return 0;
}
