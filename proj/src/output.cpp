#include "qmem/output.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmem {

std::string run_id(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_echo_csv(const std::string& path, const std::string& id,
                    const std::vector<EchoRecord>& records,
                    const std::vector<ExtraColumn>& extra) {
  for (const auto& col : extra) {
    if (col.values.size() != records.size()) {
      throw std::invalid_argument("column '" + col.name + "' has " +
                                  std::to_string(col.values.size()) + " values for " +
                                  std::to_string(records.size()) + " records");
    }
  }
  auto out = open_out(path);
  out << "# manifest=manifest.json run_id=" << id << "\n";
  out << "sweep_var,I_half_x,I_half_y,I_threehalf_x,I_threehalf_y";
  for (const auto& col : extra) out << "," << col.name;
  out << "\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    out << fmt(r.sweep) << "," << fmt(r.I_half_x) << "," << fmt(r.I_half_y) << ","
        << fmt(r.I_threehalf_x) << "," << fmt(r.I_threehalf_y);
    for (const auto& col : extra) out << "," << fmt(col.values[k]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<EchoRecord> read_echo_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<EchoRecord> records;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("sweep_var,I_half_x,I_half_y,I_threehalf_x,I_threehalf_y", 0) != 0) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unexpected header");
      }
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    double v[5];
    for (int c = 0; c < 5; ++c) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 5 columns");
      }
      char* end = nullptr;
      v[c] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell +
                                 "'");
      }
    }
    records.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  if (!header) throw std::runtime_error(path + ": no header line");
  return records;
}

nlohmann::json fit_to_json(const FitResult& fit, std::uint64_t seed) {
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json sigmas = nlohmann::json::object();
  for (std::size_t k = 0; k < fit.params.size(); ++k) {
    const std::string name = k < fit.names.size() ? fit.names[k] : "p" + std::to_string(k);
    params[name] = fit.params[k];
    if (k < fit.sigmas.size()) sigmas[name] = fit.sigmas[k];
    else sigmas[name] = nullptr;
  }
  return {{"params", params},
          {"sigmas", sigmas},
          {"residual", fit.residual},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"seed", seed},
          {"diagnostics", fit.diagnostics}};
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (epoch && *epoch) {
    char* end = nullptr;
    t = static_cast<std::time_t>(std::strtoll(epoch, &end, 10));
    if (*end != '\0') throw std::runtime_error("SOURCE_DATE_EPOCH is not an integer");
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_manifest(const std::string& path, const Manifest& m) {
  write_json(path, {{"version", QMEM_VERSION},
                    {"command", m.command},
                    {"seed", m.seed},
                    {"timestamp", manifest_timestamp()},
                    {"config", m.config},
                    {"outputs", m.outputs}});
}

}  // namespace qmem
