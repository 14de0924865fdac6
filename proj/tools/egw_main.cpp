#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "egw/errors.hpp"
#include "egw/graph.hpp"
#include "egw/json_io.hpp"
#include "egw/prob.hpp"
#include "egw/quantities.hpp"
#include "egw/region.hpp"

namespace {

using egw::errc;
using ordered_json = nlohmann::ordered_json;

// ============================================================
// Shared options, config, manifest
// ============================================================

struct GlobalOpts {
  std::string input;
  std::uint64_t seed = 1;
  int restarts = 64;
  int u_size = 0;
  int threads = 1;
  double constraint_tol = 1e-9;
  bool csv = false;
};

void add_common(CLI::App* sub, GlobalOpts& g) {
  sub->add_option("input", g.input, "pmf JSON file")->required();
  sub->add_option("--seed", g.seed, "optimizer RNG seed");
  sub->add_option("--restarts", g.restarts, "optimizer restarts");
  sub->add_option("--usize", g.u_size, "auxiliary alphabet size (0: cardinality bound)");
  sub->add_option("--threads", g.threads, "restart-level parallelism");
  sub->add_option("--ctol", g.constraint_tol, "constraint feasibility tolerance");
}

egw::OptimizerConfig config_of(const GlobalOpts& g) {
  egw::OptimizerConfig cfg;
  cfg.seed = g.seed;
  cfg.restarts = g.restarts;
  cfg.u_size = g.u_size;
  cfg.threads = g.threads;
  cfg.constraint_tol = g.constraint_tol;
  return cfg;
}

egw::RunManifest manifest_of(const GlobalOpts& g, const std::string& command,
                             bool sampled_directions) {
  egw::RunManifest m;
  m.command = command;
  m.input = g.input;
  m.seed = g.seed;
  m.restarts = g.restarts;
  m.u_size = g.u_size;
  m.threads = g.threads;
  m.constraint_tol = g.constraint_tol;
  if (sampled_directions) m.direction_set_version = egw::k_direction_set_version;
  return m;
}

ordered_json parse_fragment(const std::string& text) {
  return ordered_json::parse(text);
}

void emit(const ordered_json& doc) { std::cout << doc.dump(2) << "\n"; }

// Timings go to stderr so that identical manifests yield byte-identical
// stdout documents.
struct StageClock {
  using clock = std::chrono::steady_clock;
  clock::time_point t0 = clock::now();
  double take_ms() {
    auto t1 = clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    t0 = t1;
    return ms;
  }
};

void report_timings(double load_ms, double compute_ms) {
  std::fprintf(stderr, "{\"timings_ms\":{\"load\":%.3f,\"compute\":%.3f}}\n",
               load_ms, compute_ms);
}

// ============================================================
// Flag parsing helpers
// ============================================================

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_doubles(const std::string& s, size_t n,
                                  const std::string& what) {
  std::vector<std::string> parts = split(s, ',');
  if (parts.size() != n)
    egw::fail(errc::invalid_argument,
              what + " expects " + std::to_string(n) + " comma-separated numbers, got '" + s + "'");
  std::vector<double> out;
  for (const std::string& part : parts) {
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      egw::fail(errc::invalid_argument, what + ": cannot parse '" + part + "'");
    }
    if (used != part.size())
      egw::fail(errc::invalid_argument, what + ": trailing characters in '" + part + "'");
    out.push_back(v);
  }
  return out;
}

// Grid spec: either "start:step:stop" (inclusive) or a comma list of values.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<std::string> colon = split(s, ':');
  if (colon.size() == 3) {
    double start = parse_doubles(colon[0], 1, "grid start")[0];
    double step = parse_doubles(colon[1], 1, "grid step")[0];
    double stop = parse_doubles(colon[2], 1, "grid stop")[0];
    if (step <= 0 || stop < start - 1e-12)
      egw::fail(errc::invalid_argument, "grid requires step > 0 and stop >= start");
    std::vector<double> grid;
    int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) grid.push_back(start + step * i);
    return grid;
  }
  if (colon.size() != 1)
    egw::fail(errc::invalid_argument, "grid spec must be start:step:stop or a comma list");
  std::vector<std::string> parts = split(s, ',');
  std::vector<double> grid;
  for (const std::string& part : parts)
    grid.push_back(parse_doubles(part, 1, "grid value")[0]);
  return grid;
}

// CSV outputs carry the manifest as a comment line ahead of the header row.
void emit_csv(const egw::RunManifest& man, const std::string& csv_body) {
  ordered_json m = parse_fragment(egw::manifest_to_json(man));
  std::cout << "# manifest " << m.dump() << "\n" << csv_body;
}

// ============================================================
// quantities
// ============================================================

const std::vector<std::string> k_quantity_names = {
    "wyner_ci",      "gacs_korner_ci",  "korner_graph_entropy",
    "necessary_cond_entropy", "s_star", "v_star",
    "g_rstar",       "excess_functional_info",
    "g_nni",         "g_pni",           "g_ppi",
    "indep_lower_bound", "achieved_indep_value"};

ordered_json quantity_error_entry(const std::string& name, const egw::Error& e) {
  ordered_json entry;
  entry["name"] = name;
  entry["error"] = parse_fragment(egw::error_to_json(e))["error"];
  return entry;
}

int do_quantities(const GlobalOpts& g, const std::string& only) {
  std::set<std::string> wanted;
  if (!only.empty()) {
    for (const std::string& name : split(only, ',')) {
      bool known = false;
      for (const std::string& k : k_quantity_names) known |= (k == name);
      if (!known) egw::fail(errc::invalid_argument, "unknown quantity '" + name + "'");
      wanted.insert(name);
    }
  }
  auto want = [&](const std::string& name) {
    return wanted.empty() || wanted.count(name) > 0;
  };

  StageClock clock;
  egw::JointPmf p = egw::pmf_from_file(g.input);
  double load_ms = clock.take_ms();
  egw::OptimizerConfig cfg = config_of(g);

  ordered_json entries = ordered_json::array();
  auto run_one = [&](const std::string& name,
                     const std::function<egw::QuantityResult()>& fn) {
    if (!want(name)) return;
    try {
      entries.push_back(parse_fragment(egw::quantity_to_json(fn())));
    } catch (const egw::Error& e) {
      entries.push_back(quantity_error_entry(name, e));
    }
  };

  run_one("wyner_ci", [&] { return egw::wyner_ci(p, cfg); });
  run_one("gacs_korner_ci", [&] { return egw::gacs_korner_ci(p, cfg); });
  run_one("korner_graph_entropy", [&] { return egw::korner_graph_entropy(p, cfg); });
  run_one("necessary_cond_entropy", [&] { return egw::necessary_cond_entropy(p, cfg); });
  run_one("s_star", [&] { return egw::s_star(p, cfg); });
  run_one("v_star", [&] { return egw::v_star(p, cfg); });
  run_one("g_rstar", [&] { return egw::g_rstar(p, cfg); });
  run_one("excess_functional_info", [&] { return egw::excess_functional_info(p, cfg); });

  // The three interaction quantities are produced through the chained bounds
  // report so the chain check shares their witnesses.
  bool want_chain = want("g_nni") || want("g_pni") || want("g_ppi");
  ordered_json chain;
  if (want_chain) {
    try {
      egw::BoundsReport rep = egw::bounds_report(p, cfg);
      if (want("g_nni"))
        entries.push_back(parse_fragment(egw::quantity_to_json(rep.nni)));
      if (want("g_pni"))
        entries.push_back(parse_fragment(egw::quantity_to_json(rep.pni)));
      if (want("g_ppi"))
        entries.push_back(parse_fragment(egw::quantity_to_json(rep.ppi)));
      chain = parse_fragment(egw::bounds_to_json(rep, false));
    } catch (const egw::Error& e) {
      chain = quantity_error_entry("bounds_report", e);
    }
  }

  // Closed forms for independent sources; reported as an error entry when the
  // independence precondition fails.
  auto run_scalar = [&](const std::string& name,
                        const std::function<double()>& fn) {
    if (!want(name)) return;
    try {
      ordered_json entry;
      entry["name"] = name;
      entry["value_bits"] = fn();
      entry["method"] = "closed-form";
      entries.push_back(entry);
    } catch (const egw::Error& e) {
      entries.push_back(quantity_error_entry(name, e));
    }
  };
  run_scalar("indep_lower_bound", [&] { return egw::indep_lower_bound(p); });
  run_scalar("achieved_indep_value", [&] { return egw::achieved_indep_value(p); });

  double compute_ms = clock.take_ms();

  ordered_json doc;
  std::string command = "quantities";
  if (!only.empty()) command += " --only " + only;
  doc["manifest"] = parse_fragment(egw::manifest_to_json(manifest_of(g, command, false)));
  doc["quantities"] = entries;
  if (want_chain) doc["chain"] = chain;
  emit(doc);
  report_timings(load_ms, compute_ms);
  return 0;
}

// ============================================================
// region
// ============================================================

int do_region(const GlobalOpts& g, bool samples, const std::string& support,
              const std::string& member) {
  int modes = (samples ? 1 : 0) + (support.empty() ? 0 : 1) + (member.empty() ? 0 : 1);
  if (modes != 1)
    egw::fail(errc::invalid_argument,
              "choose exactly one of --samples, --support, --member");

  StageClock clock;
  egw::JointPmf p = egw::pmf_from_file(g.input);
  double load_ms = clock.take_ms();
  egw::OptimizerConfig cfg = config_of(g);

  if (!member.empty()) {
    std::vector<double> v = parse_doubles(member, 3, "--member");
    egw::MembershipVerdict mv = egw::membership(p, {v[0], v[1], v[2]}, cfg);
    double compute_ms = clock.take_ms();
    ordered_json doc;
    doc["manifest"] = parse_fragment(
        egw::manifest_to_json(manifest_of(g, "region --member " + member, true)));
    doc["query"] = {{"vx", v[0]}, {"vy", v[1]}, {"vxy", v[2]}};
    doc["membership"] = parse_fragment(egw::membership_to_json(mv));
    emit(doc);
    report_timings(load_ms, compute_ms);
    return 0;
  }

  if (!support.empty()) {
    std::vector<double> b = parse_doubles(support, 3, "--support");
    egw::SolveResult res = egw::support_function(p, {b[0], b[1], b[2]}, cfg);
    double compute_ms = clock.take_ms();
    ordered_json doc;
    doc["manifest"] = parse_fragment(
        egw::manifest_to_json(manifest_of(g, "region --support " + support, false)));
    doc["support"] = {{"b", {b[0], b[1], b[2]}},
                      {"psi_bits", res.value},
                      {"v", {{"vx", res.v.vx}, {"vy", res.v.vy}, {"vxy", res.v.vxy}}},
                      {"converged", res.converged},
                      {"restarts_at_best", res.restarts_at_best},
                      {"witness", parse_fragment(egw::channel_to_json(res.witness))}};
    emit(doc);
    report_timings(load_ms, compute_ms);
    return 0;
  }

  egw::RegionApprox approx = egw::sample_region(p, egw::default_directions(), cfg);
  double compute_ms = clock.take_ms();
  egw::RunManifest man = manifest_of(g, "region --samples", true);
  if (g.csv) {
    std::string body = "tag,vx,vy,vxy\n";
    char line[160];
    for (const egw::InnerPoint& pt : approx.inner) {
      std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g\n", pt.tag.c_str(),
                    pt.v.vx, pt.v.vy, pt.v.vxy);
      body += line;
    }
    emit_csv(man, body);
  } else {
    ordered_json doc;
    doc["manifest"] = parse_fragment(egw::manifest_to_json(man));
    doc["region"] = parse_fragment(egw::region_to_json(approx));
    emit(doc);
  }
  report_timings(load_ms, compute_ms);
  return 0;
}

// ============================================================
// rates
// ============================================================

int do_rates(const GlobalOpts& g, const std::string& tuple, bool noncausal) {
  std::vector<double> r = parse_doubles(tuple, 5, "--tuple");
  for (double ri : r)
    if (ri < 0)
      egw::fail(errc::invalid_argument, "rates must be nonnegative");

  StageClock clock;
  egw::JointPmf p = egw::pmf_from_file(g.input);
  double load_ms = clock.take_ms();
  egw::OptimizerConfig cfg = config_of(g);

  egw::RateTuple rt;
  for (int i = 0; i < 5; ++i) rt[i] = r[static_cast<size_t>(i)];
  egw::RateVerdict verdict = noncausal
                                 ? egw::noncausal_rate_membership(p, rt, cfg)
                                 : egw::rate_membership(p, rt, cfg);
  double compute_ms = clock.take_ms();

  std::string command = "rates --tuple " + tuple + (noncausal ? " --noncausal" : "");
  ordered_json doc;
  doc["manifest"] = parse_fragment(egw::manifest_to_json(manifest_of(g, command, true)));
  doc["tuple"] = r;
  doc["noncausal"] = noncausal;
  doc["verdict"] = parse_fragment(egw::rate_verdict_to_json(verdict));
  emit(doc);
  report_timings(load_ms, compute_ms);
  return 0;
}

// ============================================================
// curve
// ============================================================

int do_curve(const GlobalOpts& g, const std::string& kind, const std::string& grid_spec,
             bool witnesses) {
  std::vector<double> grid = parse_grid(grid_spec);

  StageClock clock;
  egw::JointPmf p = egw::pmf_from_file(g.input);
  double load_ms = clock.take_ms();
  egw::OptimizerConfig cfg = config_of(g);

  egw::CurveResult curve;
  if (kind == "ib") {
    curve = egw::ib_curve(p, grid, cfg);
  } else if (kind == "pf") {
    curve = egw::pf_curve(p, grid, cfg);
  } else if (kind == "synth") {
    curve = egw::synthesis_curve(p, grid, cfg);
  } else {
    egw::fail(errc::invalid_argument, "--kind must be ib, pf, or synth");
  }
  double compute_ms = clock.take_ms();

  std::string command = "curve --kind " + kind + " --t-grid " + grid_spec;
  egw::RunManifest man = manifest_of(g, command, false);
  if (g.csv) {
    emit_csv(man, egw::curve_to_csv(curve));
  } else {
    ordered_json doc;
    doc["manifest"] = parse_fragment(egw::manifest_to_json(man));
    doc["curve"] = parse_fragment(egw::curve_to_json(curve, witnesses));
    emit(doc);
  }
  report_timings(load_ms, compute_ms);
  return 0;
}

// ============================================================
// witness
// ============================================================

double marginal_u_entropy(const egw::JointPmf& p, const egw::Channel& c) {
  std::vector<double> pu(static_cast<size_t>(c.u_size), 0.0);
  for (int x = 0; x < p.nx(); ++x)
    for (int y = 0; y < p.ny(); ++y)
      for (int u = 0; u < c.u_size; ++u)
        pu[static_cast<size_t>(u)] += p.at(x, y) * c.at(x, y, u);
  double h = 0;
  for (double v : pu) h += egw::nlog2n(v);
  return h;
}

int do_witness(const GlobalOpts& g, const std::string& kind, double epsilon, int m,
               const std::string& frl_dir) {
  StageClock clock;
  egw::JointPmf p = egw::pmf_from_file(g.input);
  double load_ms = clock.take_ms();

  egw::WitnessConfig wc;
  wc.epsilon = epsilon;
  wc.m = m;

  egw::Channel ch;
  ordered_json residuals;
  if (kind == "path") {
    std::optional<egw::PathWitness> pw = egw::has_path_length_3(p);
    if (!pw)
      egw::fail(errc::condition_not_met,
                "has_path_length_3: no length-3 path in the support graph");
    ch = egw::path_witness_channel(p, *pw, wc);
  } else if (kind == "cycle") {
    std::optional<egw::CycleWitness> cw = egw::find_cycle(p);
    if (!cw)
      egw::fail(errc::condition_not_met,
                "find_cycle: no alternating cycle in the support graph");
    ch = egw::cycle_witness_channel(p, *cw, wc);
  } else if (kind == "bvn") {
    ch = egw::bvn_channel(p);
  } else if (kind == "frl") {
    if (frl_dir != "x" && frl_dir != "y")
      egw::fail(errc::invalid_argument, "--direction must be x or y");
    ch = egw::frl_channel(p, frl_dir == "x" ? egw::FrlDirection::x_to_y
                                            : egw::FrlDirection::y_to_x);
  } else if (kind == "gk") {
    egw::GacsKornerResult gk = egw::gacs_korner(p);
    ch = gk.witness;
    residuals["value_bits"] = gk.value_bits;
    residuals["component_count"] = gk.components.count;
  } else if (kind == "indep") {
    ch = egw::indep_witness_channel(p, m);
    residuals["continuous_value_bits"] = egw::achieved_indep_value(p);
    residuals["lower_bound_bits"] = egw::indep_lower_bound(p);
  } else {
    egw::fail(errc::invalid_argument,
              "--kind must be path, cycle, bvn, frl, gk, or indep");
  }

  egw::MiPoint v = egw::mi_point(p, ch);
  residuals["interaction_bits"] = v.vxy - v.vx - v.vy;
  if (kind == "path" || kind == "cycle" || kind == "bvn" || kind == "frl" ||
      kind == "indep")
    residuals["i_x_u"] = v.vx;
  if (kind == "cycle" || kind == "bvn" || kind == "indep")
    residuals["i_y_u"] = v.vy;
  if (kind == "bvn" || kind == "frl")
    residuals["h_y_given_xu"] = p.hy_given_x() - (v.vxy - v.vx);
  if (kind == "bvn")
    residuals["h_x_given_yu"] = p.hx_given_y() - (v.vxy - v.vy);
  if (kind == "gk") {
    double hu = marginal_u_entropy(p, ch);
    residuals["h_u_given_x"] = hu - v.vx;
    residuals["h_u_given_y"] = hu - v.vy;
  }
  double compute_ms = clock.take_ms();

  std::string command = "witness --kind " + kind;
  ordered_json doc;
  doc["manifest"] = parse_fragment(egw::manifest_to_json(manifest_of(g, command, false)));
  doc["kind"] = kind;
  doc["mi_point"] = {{"vx", v.vx}, {"vy", v.vy}, {"vxy", v.vxy}};
  doc["residuals"] = residuals;
  doc["channel"] = parse_fragment(egw::channel_to_json(ch));
  emit(doc);
  report_timings(load_ms, compute_ms);
  return 0;
}

// ============================================================
// graph
// ============================================================

int do_graph(const GlobalOpts& g) {
  StageClock clock;
  egw::JointPmf p = egw::pmf_from_file(g.input);
  double load_ms = clock.take_ms();

  egw::ComponentLabeling comp = egw::support_components(p);
  egw::MaxConditionResult mc = egw::max_condition_check(p);
  std::optional<egw::PathWitness> pw = egw::has_path_length_3(p);
  std::optional<egw::CycleWitness> cw = egw::find_cycle(p);
  egw::ConfusabilityGraph cg = egw::confusability_graph(p);
  egw::GacsKornerResult gk = egw::gacs_korner(p);

  int edges = 0;
  for (int i = 0; i < cg.n; ++i)
    for (int j = i + 1; j < cg.n; ++j)
      if (cg.adj[static_cast<size_t>(i)][static_cast<size_t>(j)]) ++edges;

  ordered_json graph;
  graph["components"] = {{"count", comp.count}, {"mass", comp.mass}};
  graph["max_condition"] = {{"holds", mc.holds},
                            {"entropy_gap", mc.entropy_gap},
                            {"worst_pair_gap", mc.worst_pair_gap}};
  if (pw) {
    graph["path3"] = {{"exists", true},
                      {"x1", pw->x1},
                      {"y1", pw->y1},
                      {"x2", pw->x2},
                      {"y2", pw->y2}};
  } else {
    graph["path3"] = {{"exists", false}};
  }
  if (cw) {
    graph["cycle"] = {{"exists", true}, {"xs", cw->xs}, {"ys", cw->ys}};
  } else {
    graph["cycle"] = {{"exists", false}};
  }
  graph["confusability"] = {{"n", cg.n}, {"edges", edges}};
  graph["gacs_korner_bits"] = gk.value_bits;
  double compute_ms = clock.take_ms();

  ordered_json doc;
  doc["manifest"] = parse_fragment(egw::manifest_to_json(manifest_of(g, "graph", false)));
  doc["graph"] = graph;
  emit(doc);
  report_timings(load_ms, compute_ms);
  return 0;
}

// ============================================================
// Error mapping and dispatch
// ============================================================

int exit_code_of(errc c) {
  switch (c) {
    case errc::parse_error:
      return 2;
    case errc::infeasible:
    case errc::infeasible_t:
    case errc::condition_not_met:
    case errc::degenerate_ratio:
    case errc::not_independent:
      return 4;
    default:
      return 3;
  }
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const egw::Error& e) {
    std::cerr << egw::error_to_json(e);
    return exit_code_of(e.code());
  } catch (const std::exception& e) {
    egw::Error wrapped(errc::invalid_argument, e.what());
    std::cerr << egw::error_to_json(wrapped);
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutual-information region toolbox for finite 2-source pmfs"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::string only, support, member, tuple, kind, grid_spec, frl_dir = "x";
  bool samples = false, noncausal = false, witnesses = false;
  double epsilon = 0.0;
  int m_levels = 2;

  CLI::App* quant = app.add_subcommand(
      "quantities", "evaluate the scalar quantities with witnesses and chain check");
  add_common(quant, g);
  quant->add_option("--only", only, "comma-separated subset of quantity names");

  CLI::App* region = app.add_subcommand(
      "region", "sample the region, query a support value, or decide membership");
  add_common(region, g);
  region->add_flag("--samples", samples, "export the sandwich approximation");
  region->add_option("--support", support, "direction bx,by,bz: print psi(b) and witness");
  region->add_option("--member", member, "point vx,vy,vxy: membership verdict");
  region->add_flag("--csv", g.csv, "CSV export of the inner points");

  CLI::App* rates = app.add_subcommand(
      "rates", "decide membership of a 5-rate tuple in the causal or noncausal region");
  add_common(rates, g);
  rates->add_option("--tuple", tuple, "R0,R1,R2,R3,R4")->required();
  rates->add_flag("--noncausal", noncausal, "use the noncausal region");

  CLI::App* curve = app.add_subcommand(
      "curve", "sweep a tradeoff curve over a t-grid");
  add_common(curve, g);
  curve->add_option("--kind", kind, "ib | pf | synth")->required();
  curve->add_option("--t-grid", grid_spec, "start:step:stop or comma list")->required();
  curve->add_flag("--csv", g.csv, "CSV rows instead of JSON");
  curve->add_flag("--witnesses", witnesses, "include per-point witness channels");

  CLI::App* witness = app.add_subcommand(
      "witness", "construct an explicit channel and verify its residuals");
  add_common(witness, g);
  witness->add_option("--kind", kind, "path | cycle | bvn | frl | gk | indep")->required();
  witness->add_option("--epsilon", epsilon, "perturbation size (<= 0: quarter of min cell)");
  witness->add_option("--m", m_levels, "quantization levels for the indep witness");
  witness->add_option("--direction", frl_dir, "frl direction: x (V indep X) or y");

  CLI::App* graph = app.add_subcommand(
      "graph", "support-graph diagnostics: components, paths, cycles, max condition");
  add_common(graph, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    egw::Error err(errc::parse_error, e.what());
    std::cerr << egw::error_to_json(err);
    return 2;
  }

  if (quant->parsed()) return run_guarded([&] { return do_quantities(g, only); });
  if (region->parsed())
    return run_guarded([&] { return do_region(g, samples, support, member); });
  if (rates->parsed()) return run_guarded([&] { return do_rates(g, tuple, noncausal); });
  if (curve->parsed())
    return run_guarded([&] { return do_curve(g, kind, grid_spec, witnesses); });
  if (witness->parsed())
    return run_guarded([&] { return do_witness(g, kind, epsilon, m_levels, frl_dir); });
  if (graph->parsed()) return run_guarded([&] { return do_graph(g); });
  return 0;
}
