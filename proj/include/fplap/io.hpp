#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fplap/energy.hpp"
#include "fplap/solver.hpp"
#include "fplap/verify.hpp"

namespace fplap {

/// Stamped at the top of every output file: artifact version, a hash of the
/// config text, and the effective seed, so outputs are attributable and
/// reruns are byte-comparable.
struct Provenance {
  std::string config_hash = "none";
  std::uint64_t seed = 0;

  std::string header_line() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// Field file: provenance/comment header, then the vertex count, then one
/// value per line. This is also the format violation witnesses are persisted
/// in for replay.
void write_field(const DiscreteField& u, const std::string& path,
                 const std::string& note = "",
                 const Provenance* prov = nullptr);
std::vector<double> read_field(const std::string& path);

void write_trace_csv(const std::vector<TracePoint>& trace,
                     const std::string& path, const Provenance& prov);

/// Study CSV. The wall-time column is the one documented exception to the
/// byte-identical rerun contract.
void write_study_csv(const StudyTable& table, const std::string& path,
                     const Provenance& prov);

void ensure_directory(const std::string& path);

}
