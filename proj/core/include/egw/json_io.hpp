#pragma once

#include <cstdint>
#include <string>

#include "egw/prob.hpp"
#include "egw/quantities.hpp"
#include "egw/region.hpp"

namespace egw {

inline constexpr const char* k_tool_version = "1.0.0";

// Snapshot of everything that determines a run's output; embedded verbatim
// in every output document. Identical manifests produce bit-identical
// output, so wall-clock timings are reported on stderr instead.
struct RunManifest {
  std::string command;
  std::string input;
  std::uint64_t seed = 1;
  int restarts = 64;
  int u_size = 0;
  int threads = 1;
  double constraint_tol = 1e-6;
  std::string direction_set_version;  // empty for commands that sample nothing
  std::string tool_version = k_tool_version;
};

// ============================================================
// Parsing
// ============================================================

// Input schema: {"x_alphabet": [...], "y_alphabet": [...], "pmf": [[...]]}.
// Malformed JSON or a structurally wrong document raises ParseError; bad
// numeric content (negative entries, mass deviation, oversized alphabets)
// raises the corresponding validation error.
JointPmf pmf_from_json_text(const std::string& text);
JointPmf pmf_from_file(const std::string& path);

// Channel schema: {"nx": n, "ny": n, "u_size": n, "rows": [[...]]} with one
// row of length u_size per (x,y) cell, row-major in (x,y).
Channel channel_from_json_text(const std::string& text);

// ============================================================
// Serialization (two-space indent, trailing newline, fixed key order)
// ============================================================

std::string pmf_to_json(const JointPmf& p);
std::string channel_to_json(const Channel& c);
std::string manifest_to_json(const RunManifest& m);
std::string quantity_to_json(const QuantityResult& q, bool include_witness = true);
std::string curve_to_json(const CurveResult& c, bool include_witnesses = false);
std::string curve_to_csv(const CurveResult& c);
std::string bounds_to_json(const BoundsReport& b, bool include_witnesses = false);
std::string region_to_json(const RegionApprox& approx);
std::string membership_to_json(const MembershipVerdict& mv);
std::string rate_verdict_to_json(const RateVerdict& rv);
std::string projection_to_json(const ProjectedRegion& reg);
std::string consistency_to_json(const ClConsistencyReport& rep);
std::string error_to_json(const Error& e);

}  // namespace egw
