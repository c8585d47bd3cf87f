#include "fhnkit/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

namespace fhnkit {

namespace fs = std::filesystem;
using fhn::Error;
using fhn::ErrorCode;

namespace {

const std::set<std::string> kAnalyses = {"synchrony", "canard",       "mmo",
                                         "relaxation", "oscillations", "residual"};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

std::string analysis_name(const Json& a) {
  if (a.is_string()) return a.get<std::string>();
  if (a.is_object() && a.contains("name") && a.at("name").is_string()) return a.at("name").get<std::string>();
  config_error("analysis entries must be names or objects with a \"name\"");
}

Json analysis_options(const Json& a) { return a.is_object() ? a : Json::object(); }

double opt_num(const Json& o, const char* key, double fallback) {
  if (!o.contains(key) || o.at(key).is_null()) return fallback;
  if (!o.at(key).is_number()) config_error(std::string("analysis option '") + key + "' must be a number");
  return o.at(key).get<double>();
}

// Default transient cut: 10% of the run or t = 50, whichever is later, kept
// inside the run.
double default_transient(const fhn::Trajectory& traj) {
  const double span = traj.t_end() - traj.t_begin();
  double t0 = traj.t_begin() + std::max(0.1 * span, 50.0);
  if (t0 >= traj.t_end()) t0 = traj.t_begin() + 0.5 * span;
  return t0;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) config_error("cannot write " + path.string());
  os << content;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int report(const std::exception& e, std::ostream& err) {
  err << "fhnkit: " << e.what() << "\n";
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    switch (fe->code()) {
      case ErrorCode::StepSizeUnderflow:
      case ErrorCode::MaxStepsExceeded:
      case ErrorCode::NonFiniteState: return kExitIntegrator;
      default: return kExitConfig;
    }
  }
  return kExitConfig;
}

fhn::Params params_from_config(const GlobalOptions& g) {
  if (g.config.empty()) config_error("--config is required");
  const Json j = load_json(g.config);
  return fhn::params_from_json(j.contains("params") ? j.at("params") : j);
}

}  // namespace

Json load_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) config_error("run config must be a JSON object");
  if (!j.contains("params")) config_error("run config needs \"params\"");
  if (!j.contains("initial_state")) config_error("run config needs \"initial_state\"");
  RunConfig rc;
  rc.params = fhn::params_from_json(j.at("params"));
  rc.initial_state = fhn::state_from_json(j.at("initial_state"));
  if (j.contains("integrator")) rc.integrator = fhn::integrator_from_json(j.at("integrator"));
  if (j.contains("analyses")) {
    if (!j.at("analyses").is_array()) config_error("\"analyses\" must be an array");
    for (const auto& a : j.at("analyses")) {
      const auto name = analysis_name(a);
      if (!kAnalyses.count(name)) config_error("unknown analysis '" + name + "'");
    }
    rc.analyses = j.at("analyses");
  }
  if (j.contains("output_dir")) rc.output_dir = j.at("output_dir").get<std::string>();
  return rc;
}

Json run_analyses(const fhn::Trajectory& traj, const fhn::Params& p, const Json& analyses) {
  Json out = Json::object();
  for (const auto& a : analyses) {
    const auto name = analysis_name(a);
    const Json o = analysis_options(a);
    try {
      if (name == "synchrony") {
        const double t0 = opt_num(o, "t0", default_transient(traj));
        Json r = fhn::to_json(fhn::synchrony_precision(traj, t0));
        r["t0"] = t0;
        out[name] = r;
      } else if (name == "canard") {
        const auto r = fhn::detect_canard(traj, p, opt_num(o, "dwell_min", fhn::kDefaultDwellMin),
                                          opt_num(o, "prox_factor", fhn::kDefaultProxFactor),
                                          opt_num(o, "t_from", traj.t_begin()),
                                          opt_num(o, "t_to", traj.t_end()));
        out[name] = fhn::to_json(r);
      } else if (name == "mmo") {
        const auto var = fhn::variable_from_string(o.value("variable", std::string("x1")));
        fhn::SegmentOptions so;
        so.large_threshold = opt_num(o, "large_threshold", so.large_threshold);
        const auto events = fhn::segment_oscillations(traj, var, so);
        const double from = opt_num(o, "t_from", default_transient(traj));
        const double to = opt_num(o, "t_to", traj.t_end());
        Json r = fhn::to_json(fhn::mmo_signature(events, from, to));
        r["variable"] = fhn::to_string(var);
        const int windows = static_cast<int>(opt_num(o, "windows", 0));
        if (windows > 0) {
          Json ws = Json::array();
          std::set<std::string> distinct;
          bool all_stationary = true;
          const double w = (to - from) / windows;
          for (int i = 0; i < windows; ++i) {
            try {
              const auto s = fhn::mmo_signature(events, from + i * w, from + (i + 1) * w);
              distinct.insert(s.str());
              all_stationary = all_stationary && s.stationary;
              ws.push_back(fhn::to_json(s));
            } catch (const Error& e) {
              all_stationary = false;
              distinct.insert("");
              ws.push_back({{"error", e.what()}});
            }
          }
          r["windows"] = ws;
          r["non_stationary"] = distinct.size() > 1 || !all_stationary;
        }
        out[name] = r;
      } else if (name == "relaxation") {
        fhn::RelaxationOptions ro;
        ro.transient_fraction = opt_num(o, "transient_fraction", ro.transient_fraction);
        ro.transient_min = opt_num(o, "transient_min", ro.transient_min);
        ro.recurrence_tol = opt_num(o, "recurrence_tol", ro.recurrence_tol);
        ro.sync_tol = opt_num(o, "sync_tol", ro.sync_tol);
        const auto r = fhn::detect_relaxation_oscillation(traj, ro);
        Json j = r ? fhn::to_json(*r) : Json::object();
        j["detected"] = r.has_value();
        out[name] = j;
      } else if (name == "oscillations") {
        const auto var = fhn::variable_from_string(o.value("variable", std::string("x1")));
        const auto events = fhn::segment_oscillations(traj, var);
        const auto large = std::count_if(events.begin(), events.end(), [](const auto& e) {
          return e.kind == fhn::OscillationKind::Large;
        });
        out[name] = {{"variable", fhn::to_string(var)},
                     {"large", large},
                     {"small", static_cast<long>(events.size()) - large}};
      } else if (name == "residual") {
        const double settle = opt_num(o, "settle_time", 0.5);
        const double margin = opt_num(o, "fold_margin", 0.1);
        out[name] = {{"settle_time", settle},
                     {"fold_margin", margin},
                     {"max_attracting_residual", fhn::attracting_residual_max(traj, settle, margin)}};
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidConfig && name != "synchrony") throw;
      out[name] = {{"error", e.what()}};
    }
  }
  return out;
}

Json folds_report(const fhn::Params& p) {
  if (p.k == 0.0) throw Error(ErrorCode::ZeroCoupling, "folded equilibria need k != 0");
  if (!p.symmetric()) config_error("folds are defined for the symmetric coupling only");
  Json j;
  j["params"] = fhn::to_json(p);
  Json fes = Json::array();
  for (int sigma : {1, -1}) {
    for (auto var : {fhn::FoldedVariable::Second, fhn::FoldedVariable::First}) {
      Json roots = Json::array();
      for (const auto& fe : fhn::find_folded_equilibria(p, sigma, var)) {
        std::optional<fhn::FoldedConditionMatch> match;
        bool no_row = false;
        if (!fe.outside_A() && !fe.at_double_fold) {
          try {
            match = fhn::classify_folded_conditions(p, fe);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NoRowMatches) throw;
            no_row = true;
          }
        }
        Json r = fhn::to_json(fe, match);
        if (no_row) r["condition_verdict"] = "NoRowMatches";
        roots.push_back(r);
      }
      fes.push_back({{"sigma", sigma}, {"folded_variable", fhn::to_string(var)}, {"roots", roots}});
    }
  }
  j["folded_equilibria"] = fes;
  Json dfs = Json::array();
  for (bool same : {true, false}) {
    for (int sigma : {1, -1}) dfs.push_back(fhn::to_json(fhn::double_fold_jacobian(p, same, sigma)));
  }
  j["double_folds"] = dfs;
  if (p.b == 0.0) {
    j["folded_node_check"] = {{"sigma_plus", fhn::folded_node_check(p, 1)},
                              {"sigma_minus", fhn::folded_node_check(p, -1)}};
  }
  return j;
}

Json equilibria_report(const fhn::Params& p) {
  Json j;
  j["params"] = fhn::to_json(p);
  Json eqs = Json::array();
  for (const auto& e : fhn::find_equilibria(p)) eqs.push_back(fhn::to_json(e));
  j["equilibria"] = eqs;
  if (p.symmetric()) {
    j["synchrony_plane_equilibria"] = fhn::synchrony_plane_equilibria(p);
    j["synchrony_attracting"] = fhn::synchrony_attracting(p);
    const auto anti = fhn::antisynchrony_attracting(p);
    j["antisynchrony_attracting"] = anti.attracting;
    j["antisynchrony_exact"] = anti.exact;
  }
  return j;
}

double SweepAxis::value(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }

namespace {

SweepAxis axis_from(const Json& grid, const char* key, double base) {
  if (!grid.contains(key)) return {base, base, 1};
  const Json& a = grid.at(key);
  if (a.is_number()) return {a.get<double>(), a.get<double>(), 1};
  if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number_integer()) {
    config_error(std::string("grid axis '") + key + "' must be a number or [lo, hi, n]");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<int>()};
}

std::string folded_classes(const fhn::Params& p, int sigma, fhn::FoldedVariable var) {
  if (p.k == 0.0 || !p.symmetric()) return "n/a";
  std::string s;
  for (const auto& fe : fhn::find_folded_equilibria(p, sigma, var)) {
    if (fe.outside_A()) continue;
    if (!s.empty()) s += ';';
    s += fhn::to_string(fe.cls);
  }
  return s.empty() ? "-" : s;
}

struct SweepRow {
  std::vector<std::string> cells;
};

}  // namespace

void sweep(const Json& spec, int threads, std::ostream& csv) {
  if (!spec.is_object()) config_error("sweep spec must be a JSON object");
  const fhn::Params base = fhn::params_from_json(spec.value("params", Json::object()));
  const Json grid = spec.value("grid", Json::object());
  const SweepAxis ab = axis_from(grid, "b", base.b);
  const SweepAxis ac = axis_from(grid, "c", base.c);
  const SweepAxis ak = axis_from(grid, "k", base.k);
  const SweepAxis ae = axis_from(grid, "epsilon", base.epsilon);
  for (const auto* a : {&ab, &ac, &ak, &ae}) {
    if (a->n <= 0) config_error("empty grid");
  }
  const bool with_mmo = spec.contains("mmo_run");
  fhn::State mmo_ic{};
  fhn::IntegratorConfig mmo_cfg;
  double mmo_from = 0.0;
  fhn::Variable mmo_var = fhn::Variable::X1;
  if (with_mmo) {
    const Json& m = spec.at("mmo_run");
    mmo_ic = fhn::state_from_json(m.value("initial_state", Json::array({-1.5, 2.0})));
    mmo_cfg = fhn::integrator_from_json(m.value("integrator", Json::object()));
    mmo_from = m.value("t_from", 0.0);
    mmo_var = fhn::variable_from_string(m.value("variable", std::string("x1")));
  }

  const long total = static_cast<long>(ab.n) * ac.n * ak.n * ae.n;
  std::vector<SweepRow> rows(total);
  auto compute = [&](long idx) {
    long r = idx;
    const int ie = r % ae.n; r /= ae.n;
    const int ik = r % ak.n; r /= ak.n;
    const int ic = r % ac.n; r /= ac.n;
    const int ib = static_cast<int>(r);
    fhn::Params p = base;
    p.b = ab.value(ib);
    p.c = ac.value(ic);
    p.k = ak.value(ik);
    p.epsilon = ae.value(ie);
    std::vector<std::string> cells = {fhn::format_real(p.b), fhn::format_real(p.c), fhn::format_real(p.k),
                                      fhn::format_real(p.epsilon)};
    cells.push_back(fhn::synchrony_attracting(p) ? "1" : "0");
    cells.push_back(fhn::antisynchrony_attracting(p).attracting ? "1" : "0");
    for (int sigma : {1, -1}) {
      for (auto var : {fhn::FoldedVariable::Second, fhn::FoldedVariable::First}) {
        cells.push_back(folded_classes(p, sigma, var));
      }
    }
    for (bool same : {true, false}) {
      for (int sigma : {1, -1}) {
        cells.push_back(fhn::to_string(fhn::double_fold_jacobian(p, same, sigma).verdict));
      }
    }
    if (with_mmo) {
      try {
        const auto traj = fhn::integrate(p, mmo_ic, mmo_cfg);
        const auto sig = fhn::mmo_signature(traj, mmo_var, mmo_from, traj.t_end());
        cells.push_back(sig.str());
        cells.push_back(sig.stationary ? "1" : "0");
      } catch (const Error& e) {
        cells.push_back(std::string("error:") + fhn::to_string(e.code()));
        cells.push_back("0");
      }
    }
    rows[idx].cells = std::move(cells);
  };

  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(std::min<long>(total, 64))));
  if (nt == 1) {
    for (long i = 0; i < total; ++i) compute(i);
  } else {
    std::atomic<long> next{0};
    std::vector<std::exception_ptr> errors(nt);
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long i = next++; i < total; i = next++) compute(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  csv << "b,c,k,epsilon,synchrony_attracting,antisynchrony_attracting,"
         "folded_x2_sigma_plus,folded_x1_sigma_plus,folded_x2_sigma_minus,folded_x1_sigma_minus,"
         "double_fold_same_plus,double_fold_same_minus,double_fold_opposite_plus,double_fold_opposite_minus";
  if (with_mmo) csv << ",mmo_signature,mmo_stationary";
  csv << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) csv << (i ? "," : "") << row.cells[i];
    csv << "\n";
  }
}

std::vector<std::string> figure_ids() {
  return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"};
}

namespace {

std::string symmetry_of(const fhn::State& s, double tol = 1e-6) {
  if (std::abs(s.x1 - s.x2) < tol && std::abs(s.y1 - s.y2) < tol) return "Fix(gamma)";
  if (std::abs(s.x1 + s.x2) < tol && std::abs(s.y1 + s.y2) < tol) return "Fix(delta)";
  return "none";
}

double state_dist(const fhn::State& a, const fhn::State& b) {
  return std::max({std::abs(a.x1 - b.x1), std::abs(a.x2 - b.x2), std::abs(a.y1 - b.y1), std::abs(a.y2 - b.y2)});
}

Json reproduce_singular(const Json& recipe, const fhn::Params& p, const fs::path& out, const std::string& fig) {
  const int arcs = recipe.value("arcs", 6);
  Json orbits = Json::array();
  int idx = 0;
  for (const auto& ic : recipe.at("initial_points")) {
    const std::array<double, 2> x0 = ic.get<std::array<double, 2>>();
    const auto orbit = fhn::singular_orbit(p, x0, arcs);
    std::ostringstream csv;
    csv << "arc,t,x1,x2,y1,y2\n";
    for (std::size_t a = 0; a < orbit.arcs.size(); ++a) {
      const auto& arc = orbit.arcs[a];
      for (std::size_t i = 0; i < arc.times.size(); ++i) {
        const auto& s = arc.states[i];
        csv << a << ',' << fhn::format_real(arc.times[i]) << ',' << fhn::format_real(s.x1) << ','
            << fhn::format_real(s.x2) << ',' << fhn::format_real(s.y1) << ',' << fhn::format_real(s.y2) << '\n';
      }
    }
    write_file(out / (fig + "_orbit" + std::to_string(idx) + ".csv"), csv.str());

    double target_err = 0.0;
    double y_jump = 0.0;
    Json jumps = Json::array();
    std::string jump_symmetry;
    for (std::size_t i = 0; i < orbit.jumps.size(); ++i) {
      const auto& jp = orbit.jumps[i];
      if (jp.cell != 2) target_err = std::max(target_err, std::abs(jp.to.x1 + 2.0 * jp.from.x1));
      if (jp.cell != 1) target_err = std::max(target_err, std::abs(jp.to.x2 + 2.0 * jp.from.x2));
      // y must not move across a jump, and the next arc starts where the jump lands.
      y_jump = std::max({y_jump, std::abs(jp.to.y1 - jp.from.y1), std::abs(jp.to.y2 - jp.from.y2)});
      if (i + 1 < orbit.arcs.size() && !orbit.arcs[i + 1].states.empty()) {
        y_jump = std::max(y_jump, state_dist(orbit.arcs[i + 1].states.front(), jp.to));
      }
      jumps.push_back({{"t", jp.t}, {"cell", jp.cell}, {"from", {jp.from.x1, jp.from.x2}}, {"to", {jp.to.x1, jp.to.x2}}});
    }
    const auto& last_arc = orbit.arcs.back();
    const fhn::State end = last_arc.states.empty() ? fhn::lift(x0[0], x0[1]).state() : last_arc.states.back();
    Json o;
    o["initial_point"] = x0;
    o["termination"] = fhn::to_string(orbit.termination);
    o["arcs"] = orbit.arcs.size();
    o["jumps"] = jumps;
    o["max_jump_target_error"] = target_err;
    o["max_y_discontinuity"] = y_jump;
    o["final_state"] = {end.x1, end.x2};
    o["final_region"] = fhn::to_string(fhn::classify_region(end.x1, end.x2));
    o["final_symmetry"] = symmetry_of(end);
    // After the first jump the orbit is on its limit set for cycles; compare
    // arc starts four arcs apart.
    if (orbit.termination == fhn::OrbitTermination::ArcLimit && orbit.arcs.size() >= 6) {
      const auto& a = orbit.arcs[1];
      const auto& b = orbit.arcs[5];
      o["closure_after_4_arcs"] = state_dist(a.states.front(), b.states.front());
      o["cycle_time_4_arcs"] = b.times.front() - a.times.front();
      o["cycle_symmetry"] = symmetry_of(a.states.front());
    }
    orbits.push_back(o);
    ++idx;
  }
  Json eq = Json::array();
  for (const auto& e : fhn::find_equilibria(p)) {
    eq.push_back({{"state", {e.state.x1, e.state.x2}}, {"stability", fhn::to_string(e.stability)}});
  }
  return {{"figure", fig}, {"kind", "singular"}, {"params", fhn::to_json(p)}, {"orbits", orbits}, {"equilibria", eq}};
}

Json reproduce_folded_flow(const Json& recipe, const fhn::Params& p, const fs::path& out, const std::string& fig) {
  const double s_end = recipe.value("s_end", 2.0);
  const auto center = recipe.value("center", std::array<double, 2>{fhn::kFold, fhn::kFold});
  const double radius = recipe.value("radius", 0.3);
  const int n = recipe.value("orbits", 12);
  std::ostringstream csv;
  csv << "orbit,s,x1,x2,region,orientation\n";
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * (i + 0.5) / n;
    const std::array<double, 2> x0{center[0] + radius * std::cos(a), center[1] + radius * std::sin(a)};
    for (double dir : {1.0, -1.0}) {
      for (const auto& s : fhn::desingularized_orbit(p, x0, dir * s_end)) {
        const double orient = fhn::rescaling_sign_F(s.x1, s.x2);
        csv << i << ',' << fhn::format_real(s.s) << ',' << fhn::format_real(s.x1) << ','
            << fhn::format_real(s.x2) << ',' << fhn::to_string(fhn::classify_region(s.x1, s.x2)) << ','
            << (orient > 0 ? 1 : (orient < 0 ? -1 : 0)) << '\n';
      }
    }
  }
  write_file(out / (fig + "_folded_flow.csv"), csv.str());
  const bool same = std::signbit(center[0]) == std::signbit(center[1]);
  const int sigma = center[0] > 0 ? 1 : -1;
  return {{"figure", fig},
          {"kind", "folded_flow"},
          {"params", fhn::to_json(p)},
          {"double_fold", fhn::to_json(fhn::double_fold_jacobian(p, same, sigma))}};
}

Json reproduce_trajectory(const Json& recipe, const fhn::Params& p, const fs::path& out, const std::string& fig) {
  Json rc_json = recipe;
  rc_json["params"] = fhn::to_json(p);
  const RunConfig rc = run_config_from_json(rc_json);
  const auto traj = fhn::integrate(rc.params, rc.initial_state, rc.integrator);
  std::ostringstream csv;
  fhn::write_trajectory_csv(csv, traj);
  write_file(out / (fig + "_trajectory.csv"), csv.str());
  return {{"figure", fig},
          {"kind", "trajectory"},
          {"params", fhn::to_json(p)},
          {"initial_state", fhn::to_json(rc.initial_state)},
          {"analyses", run_analyses(traj, rc.params, rc.analyses)}};
}

}  // namespace

int cmd_simulate(const GlobalOptions& g, std::ostream& err) {
  try {
    if (g.config.empty()) config_error("--config is required");
    const RunConfig rc = run_config_from_json(load_json(g.config));
    const fs::path out = g.out.empty() ? rc.output_dir : g.out;
    const auto traj = fhn::integrate(rc.params, rc.initial_state, rc.integrator);
    std::ostringstream csv;
    fhn::write_trajectory_csv(csv, traj);
    write_file(out / "trajectory.csv", csv.str());
    if (!rc.integrator.events.empty()) write_file(out / "events.json", dump(fhn::to_json(traj.events)));
    for (const auto& a : rc.analyses) {
      if (analysis_name(a) != "oscillations") continue;
      const auto var = fhn::variable_from_string(analysis_options(a).value("variable", std::string("x1")));
      try {
        std::ostringstream os;
        fhn::write_oscillations_csv(os, fhn::segment_oscillations(traj, var));
        write_file(out / "oscillations.csv", os.str());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooShort) throw;
      }
    }
    Json analysis = {{"params", fhn::to_json(rc.params)},
                     {"initial_state", fhn::to_json(rc.initial_state)},
                     {"integrator", fhn::to_json(rc.integrator)},
                     {"accepted_steps", traj.accepted_steps},
                     {"analyses", run_analyses(traj, rc.params, rc.analyses)}};
    write_file(out / "analysis.json", dump(analysis));
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_folds(const GlobalOptions& g, const fhn::Params& p, std::ostream& out, std::ostream& err) {
  try {
    const Json j = folds_report(p);
    out << dump(j);
    if (!g.out.empty() && g.out != ".") write_file(g.out / "folds.json", dump(j));
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_equilibria(const GlobalOptions& g, const fhn::Params& p, std::ostream& out, std::ostream& err) {
  try {
    const Json j = equilibria_report(p);
    out << dump(j);
    if (!g.out.empty() && g.out != ".") write_file(g.out / "equilibria.json", dump(j));
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_sweep(const GlobalOptions& g, std::ostream& err) {
  try {
    if (g.config.empty()) config_error("--config is required");
    const Json spec = load_json(g.config);
    std::ostringstream csv;
    sweep(spec, g.threads, csv);
    write_file(g.out / "sweep.csv", csv.str());
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_reproduce(const GlobalOptions& g, const std::string& figure, const fs::path& recipe_dir,
                  std::ostream& err) {
  try {
    const auto ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), figure) == ids.end()) config_error("unknown figure '" + figure + "'");
    const Json recipe = load_json(recipe_dir / (figure + ".json"));
    const fhn::Params p = fhn::params_from_json(recipe.at("params"));
    const auto kind = recipe.value("kind", std::string("trajectory"));
    Json analysis;
    if (kind == "singular") analysis = reproduce_singular(recipe, p, g.out, figure);
    else if (kind == "folded_flow") analysis = reproduce_folded_flow(recipe, p, g.out, figure);
    else if (kind == "trajectory") analysis = reproduce_trajectory(recipe, p, g.out, figure);
    else config_error("unknown recipe kind '" + kind + "'");
    write_file(g.out / (figure + "_analysis.json"), dump(analysis));
    return kExitOk;
  } catch (const nlohmann::json::exception& e) {
    err << "fhnkit: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

#ifndef FHNKIT_RECIPE_DIR
#define FHNKIT_RECIPE_DIR "recipes"
#endif

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fhnkit: coupled fast-slow oscillator toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::string config;
  std::string out_dir = ".";
  app.add_option("--config", config, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "reserved; the pipeline is deterministic");

  auto* sim = app.add_subcommand("simulate", "integrate a run config and analyse it");

  fhn::Params cli_params;
  auto add_param_flags = [&cli_params](CLI::App* sc) {
    sc->add_option("--b", cli_params.b);
    sc->add_option("--c", cli_params.c);
    sc->add_option("--k", cli_params.k);
    sc->add_option("--epsilon", cli_params.epsilon);
  };
  auto* folds = app.add_subcommand("folds", "folded equilibria and double folds");
  add_param_flags(folds);
  auto* eq = app.add_subcommand("equilibria", "equilibria of the full system");
  add_param_flags(eq);
  auto* sw = app.add_subcommand("sweep", "parameter grid to CSV");
  auto* rep = app.add_subcommand("reproduce", "regenerate a figure's data");
  std::string figure;
  std::string recipe_dir = FHNKIT_RECIPE_DIR;
  rep->add_option("figure", figure, "fig3 ... fig11")->required();
  rep->add_option("--recipes", recipe_dir, "recipe directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  g.config = config;
  g.out = out_dir;

  // Flags override --config, which overrides the defaults.
  auto resolve = [&](CLI::App* sc, fhn::Params& p) {
    if (!config.empty()) p = params_from_config(g);
    for (const auto& [flag, field] : {std::pair{"--b", &fhn::Params::b}, std::pair{"--c", &fhn::Params::c},
                                      std::pair{"--k", &fhn::Params::k},
                                      std::pair{"--epsilon", &fhn::Params::epsilon}}) {
      if (sc->count(flag) > 0) p.*field = cli_params.*field;
    }
    p.validate();
  };
  if (sim->parsed()) return cmd_simulate(g, err);
  for (auto* sc : {folds, eq}) {
    if (!sc->parsed()) continue;
    fhn::Params p;
    try {
      resolve(sc, p);
    } catch (const std::exception& e) {
      return report(e, err);
    }
    return sc == folds ? cmd_folds(g, p, out, err) : cmd_equilibria(g, p, out, err);
  }
  if (sw->parsed()) return cmd_sweep(g, err);
  if (rep->parsed()) return cmd_reproduce(g, figure, recipe_dir, err);
  return kExitConfig;
}

}  // namespace fhnkit
