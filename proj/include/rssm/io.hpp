#pragma once

#include <string>

#include "rssm/problems.hpp"
#include "rssm/solvers.hpp"

namespace rssm {

/// Writes a trace as CSV with header `iter,flops,seconds,f,err,proxy,step`,
/// one row per telemetry record, 17 significant digits so doubles round-trip
/// bit-exactly.
void emit_csv(const RunTrace& trace, const std::string& path);

/// Parses a file written by emit_csv (records only; the final point is not
/// part of the CSV).
RunTrace parse_csv(const std::string& path);

/// Self-describing binary instance bundle: 8-byte magic, a kind tag, integer
/// dims, then each matrix as (rows, cols, column-major doubles). Replaying a
/// saved instance reproduces runs without regeneration.
enum class InstanceKind : std::uint32_t { Rsr = 1, Odl = 2 };

void save_rsr(const RsrInstance& inst, const std::string& path);
RsrInstance load_rsr(const std::string& path);
void save_odl(const OdlInstance& inst, const std::string& path);
OdlInstance load_odl(const std::string& path);

/// Reads just the kind tag.
InstanceKind peek_instance_kind(const std::string& path);

}  // namespace rssm
