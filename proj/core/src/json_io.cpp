#include "egw/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "egw/errors.hpp"
#include "json.hpp"

namespace egw {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json vec3_json(const Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

ordered_json mi_json(const MiPoint& v) {
  return ordered_json{{"vx", v.vx}, {"vy", v.vy}, {"vxy", v.vxy}};
}

ordered_json channel_json(const Channel& c) {
  ordered_json rows = ordered_json::array();
  for (int x = 0; x < c.nx; ++x)
    for (int y = 0; y < c.ny; ++y) {
      ordered_json row = ordered_json::array();
      for (int u = 0; u < c.u_size; ++u) row.push_back(c.at(x, y, u));
      rows.push_back(std::move(row));
    }
  return ordered_json{{"nx", c.nx}, {"ny", c.ny}, {"u_size", c.u_size}, {"rows", rows}};
}

ordered_json quantity_json(const QuantityResult& q, bool include_witness) {
  ordered_json j{{"name", q.name},
                 {"value_bits", q.value},
                 {"method", q.method},
                 {"table1_form", q.table1_form}};
  ordered_json res = ordered_json::object();
  for (const auto& [k, v] : q.residuals) res[k] = v;
  j["residuals"] = res;
  if (include_witness) j["witness"] = channel_json(q.witness);
  return j;
}

ordered_json curve_json(const CurveResult& c, bool include_witnesses) {
  ordered_json points = ordered_json::array();
  for (const CurvePoint& pt : c.points) {
    ordered_json row{{"t", pt.t},
                     {"value_bits", pt.value},
                     {"raw_value_bits", pt.raw_value},
                     {"feasible", pt.feasible}};
    if (include_witnesses && pt.feasible) row["witness"] = channel_json(pt.witness);
    points.push_back(std::move(row));
  }
  return ordered_json{{"quantity", c.quantity},
                      {"max_cleanup_delta", c.max_cleanup_delta},
                      {"points", points}};
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::inside: return "inside";
    case Verdict::outside: return "outside";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

// Structural access with parse-level errors for missing or mistyped fields.
const ordered_json& field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(errc::parse_error, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::vector<std::string> string_list(const ordered_json& j, const char* key) {
  const ordered_json& a = field(j, key);
  if (!a.is_array()) fail(errc::parse_error, std::string(key) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : a) {
    if (!e.is_string()) fail(errc::parse_error, std::string(key) + " must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

ordered_json parse_text(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, e.what());
  }
}

}  // namespace

// ============================================================
// Parsing
// ============================================================

JointPmf pmf_from_json_text(const std::string& text) {
  const ordered_json j = parse_text(text);
  const std::vector<std::string> xs = string_list(j, "x_alphabet");
  const std::vector<std::string> ys = string_list(j, "y_alphabet");
  const ordered_json& rows = field(j, "pmf");
  if (!rows.is_array() || rows.size() != xs.size())
    fail(errc::parse_error, "pmf must have one row per x symbol");
  std::vector<double> entries;
  entries.reserve(xs.size() * ys.size());
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != ys.size())
      fail(errc::parse_error, "pmf rows must have one entry per y symbol");
    for (const auto& e : row) {
      if (!e.is_number()) fail(errc::parse_error, "pmf entries must be numbers");
      entries.push_back(e.get<double>());
    }
  }
  return validate_pmf(xs, ys, entries);
}

JointPmf pmf_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open input file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return pmf_from_json_text(buf.str());
}

Channel channel_from_json_text(const std::string& text) {
  const ordered_json j = parse_text(text);
  const ordered_json& jx = field(j, "nx");
  const ordered_json& jy = field(j, "ny");
  const ordered_json& ju = field(j, "u_size");
  if (!jx.is_number_integer() || !jy.is_number_integer() || !ju.is_number_integer())
    fail(errc::parse_error, "channel dimensions must be integers");
  const int nx = jx.get<int>(), ny = jy.get<int>(), nu = ju.get<int>();
  if (nx <= 0 || ny <= 0 || nu <= 0)
    fail(errc::parse_error, "channel dimensions must be positive");
  const ordered_json& rows = field(j, "rows");
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(nx) * ny)
    fail(errc::parse_error, "channel needs one row per (x,y) cell");
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(nx) * ny * nu);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(nu))
      fail(errc::parse_error, "channel rows must have u_size entries");
    for (const auto& e : row) {
      if (!e.is_number()) fail(errc::parse_error, "channel entries must be numbers");
      entries.push_back(e.get<double>());
    }
  }
  return validate_channel(nx, ny, nu, entries, nu > nx * ny + 2);
}

// ============================================================
// Serialization
// ============================================================

std::string pmf_to_json(const JointPmf& p) {
  ordered_json rows = ordered_json::array();
  for (int x = 0; x < p.nx(); ++x) {
    ordered_json row = ordered_json::array();
    for (int y = 0; y < p.ny(); ++y) row.push_back(p.at(x, y));
    rows.push_back(std::move(row));
  }
  return dump(ordered_json{
      {"x_alphabet", p.x_labels}, {"y_alphabet", p.y_labels}, {"pmf", rows}});
}

std::string channel_to_json(const Channel& c) { return dump(channel_json(c)); }

std::string manifest_to_json(const RunManifest& m) {
  return dump(ordered_json{{"tool_version", m.tool_version},
                           {"command", m.command},
                           {"input", m.input},
                           {"seed", m.seed},
                           {"restarts", m.restarts},
                           {"u_size", m.u_size},
                           {"threads", m.threads},
                           {"constraint_tol", m.constraint_tol},
                           {"direction_set_version", m.direction_set_version}});
}

std::string quantity_to_json(const QuantityResult& q, bool include_witness) {
  return dump(quantity_json(q, include_witness));
}

std::string curve_to_json(const CurveResult& c, bool include_witnesses) {
  return dump(curve_json(c, include_witnesses));
}

std::string curve_to_csv(const CurveResult& c) {
  std::ostringstream out;
  out << "t,value_bits,raw_value_bits,cleanup,feasible\n";
  out.precision(17);
  for (const CurvePoint& pt : c.points)
    out << pt.t << ',' << pt.value << ',' << pt.raw_value << ','
        << std::abs(pt.value - pt.raw_value) << ',' << (pt.feasible ? 1 : 0)
        << '\n';
  return out.str();
}

std::string bounds_to_json(const BoundsReport& b, bool include_witnesses) {
  return dump(ordered_json{{"upper_bound", b.upper},
                           {"chain_ok", b.chain_ok},
                           {"worst_violation", b.worst_violation},
                           {"ppi", quantity_json(b.ppi, include_witnesses)},
                           {"pni", quantity_json(b.pni, include_witnesses)},
                           {"nni", quantity_json(b.nni, include_witnesses)}});
}

std::string region_to_json(const RegionApprox& approx) {
  ordered_json inner = ordered_json::array();
  for (const InnerPoint& pt : approx.inner)
    inner.push_back(ordered_json{{"tag", pt.tag}, {"v", mi_json(pt.v)}});
  ordered_json outer = ordered_json::array();
  for (const HalfSpace& h : approx.outer)
    outer.push_back(ordered_json{{"b", vec3_json(h.b)}, {"psi_hat", h.psi_hat}});
  double max_gap = 0.0;
  for (double g : approx.sandwich_gap) max_gap = std::max(max_gap, g);
  ordered_json corners = ordered_json::array();
  for (const Vec3& c : io_corners(approx.p)) corners.push_back(vec3_json(c));
  return dump(ordered_json{
      {"direction_set_version", approx.direction_version},
      {"degenerate", approx.degenerate},
      {"inner", inner},
      {"hull",
       ordered_json{{"dim", approx.hull.dim},
                    {"vertex_count", static_cast<int>(approx.hull.vertices.size())},
                    {"volume", approx.hull.volume}}},
      {"outer", outer},
      {"sandwich_gap", ordered_json{{"max", max_gap}, {"per_direction", approx.sandwich_gap}}},
      {"outer_corners", corners}});
}

std::string membership_to_json(const MembershipVerdict& mv) {
  ordered_json j{{"verdict", verdict_name(mv.verdict)}};
  if (mv.verdict == Verdict::inside) {
    ordered_json comb = ordered_json::array();
    for (const auto& [idx, w] : mv.combination)
      comb.push_back(ordered_json{{"index", idx}, {"weight", w}});
    j["combination"] = comb;
    if (mv.witness) j["witness"] = channel_json(*mv.witness);
  } else if (mv.verdict == Verdict::outside) {
    j["violated"] = mv.violated;
    j["violation"] = mv.violation;
  } else {
    j["inner_gap"] = mv.inner_gap;
    j["outer_gap"] = mv.outer_gap;
  }
  return dump(j);
}

std::string rate_verdict_to_json(const RateVerdict& rv) {
  ordered_json j{{"verdict", verdict_name(rv.verdict)}};
  if (rv.verdict == Verdict::inside) {
    j["witness_point"] = mi_json(rv.witness_point);
    j["witness_violation"] = rv.witness_violation;
    if (rv.witness) j["witness"] = channel_json(*rv.witness);
  } else if (rv.verdict == Verdict::outside) {
    j["violated"] = rv.violated;
    j["violation"] = rv.violation;
  } else {
    j["gap"] = rv.gap;
  }
  return dump(j);
}

std::string projection_to_json(const ProjectedRegion& reg) {
  ordered_json pts = ordered_json::array();
  for (const Vec3& v : reg.points) pts.push_back(vec3_json(v));
  return dump(ordered_json{{"name", reg.name},
                           {"increasing", reg.increasing},
                           {"points", pts},
                           {"tags", reg.tags}});
}

std::string consistency_to_json(const ClConsistencyReport& rep) {
  ordered_json cases = ordered_json::array();
  for (const ClConsistencyCase& c : rep.disagreement_cases)
    cases.push_back(ordered_json{
        {"q", vec3_json(c.q)},
        {"verdicts", ordered_json::array({c.verdicts[0], c.verdicts[1], c.verdicts[2],
                                          c.verdicts[3]})},
        {"margin", c.margin}});
  return dump(ordered_json{{"queries", rep.queries},
                           {"band", rep.band},
                           {"band_excluded", rep.band_excluded},
                           {"agreements", rep.agreements},
                           {"disagreements", rep.disagreements},
                           {"disagreement_cases", cases}});
}

std::string error_to_json(const Error& e) {
  return dump(ordered_json{
      {"error", ordered_json{{"code", e.name()}, {"message", e.message()}}}});
}

}  // namespace egw
