#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmem/config.hpp"
#include "qmem/fitting.hpp"
#include "qmem/readout.hpp"

namespace qmem {

struct ExtraColumn {
  std::string name;
  std::vector<double> values;  // one per record
};

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string run_id(const std::string& text);

/// First line `# manifest=manifest.json run_id=<id>`, then a header and one
/// row per record, %.17g.
void write_echo_csv(const std::string& path, const std::string& id,
                    const std::vector<EchoRecord>& records,
                    const std::vector<ExtraColumn>& extra = {});

/// Reads the five echo columns back; comment lines and extra columns are
/// skipped. Throws std::runtime_error naming the line on bad input.
std::vector<EchoRecord> read_echo_csv(const std::string& path);

nlohmann::json fit_to_json(const FitResult& fit, std::uint64_t seed);

struct Manifest {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string command;
  std::vector<std::string> outputs;
};

/// RFC 3339 UTC. SOURCE_DATE_EPOCH wins over the wall clock.
std::string manifest_timestamp();

void write_manifest(const std::string& path, const Manifest& manifest);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace qmem
