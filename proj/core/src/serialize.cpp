#include "fhn/serialize.hpp"

namespace fhn {

namespace {

double num(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Json nan_safe(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string crossing_name(Crossing c) {
  switch (c) {
    case Crossing::Any: return "any";
    case Crossing::Rising: return "rising";
    case Crossing::Falling: return "falling";
  }
  return "?";
}

Crossing crossing_from(const std::string& s) {
  if (s == "any") return Crossing::Any;
  if (s == "rising") return Crossing::Rising;
  if (s == "falling") return Crossing::Falling;
  throw Error(ErrorCode::InvalidConfig, "unknown crossing direction '" + s + "'");
}

}  // namespace

Json to_json(const Params& p) {
  Json j;
  j["b"] = p.b;
  j["c"] = p.c;
  j["k"] = p.k;
  j["epsilon"] = p.epsilon;
  if (const auto* m = std::get_if<PerturbedSecondCell>(&p.mode)) {
    j["mode"] = {{"PerturbedSecondCell", {{"b2", m->b2}, {"c2", m->c2}, {"k2", m->k2}}}};
  } else {
    j["mode"] = mode_name(p.mode);
  }
  return j;
}

Params params_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "params must be a JSON object");
  Params p;
  p.b = num(j, "b", p.b);
  p.c = num(j, "c", p.c);
  p.k = num(j, "k", p.k);
  p.epsilon = num(j, "epsilon", p.epsilon);
  if (j.contains("mode")) {
    const Json& m = j.at("mode");
    if (m.is_string()) {
      const auto s = m.get<std::string>();
      if (s == "SymmetricBidirectional") p.mode = SymmetricBidirectional{};
      else if (s == "AsymmetricForcing") p.mode = AsymmetricForcing{};
      else throw Error(ErrorCode::InvalidConfig, "unknown coupling mode '" + s + "'");
    } else if (m.is_object() && m.contains("PerturbedSecondCell")) {
      const Json& q = m.at("PerturbedSecondCell");
      p.mode = PerturbedSecondCell{num(q, "b2", p.b), num(q, "c2", p.c), num(q, "k2", p.k)};
    } else {
      throw Error(ErrorCode::InvalidConfig, "mode must be a string or {\"PerturbedSecondCell\": {...}}");
    }
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return p;
}

Json to_json(const State& s) { return {{"x1", s.x1}, {"x2", s.x2}, {"y1", s.y1}, {"y2", s.y2}}; }

State state_from_json(const Json& j) {
  auto need = [](bool ok) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, "initial state must be [x1,x2], [x1,x2,y1,y2] or an object");
  };
  if (j.is_array()) {
    need(j.size() == 2 || j.size() == 4);
    for (const auto& v : j) need(v.is_number());
    if (j.size() == 2) {
      const double x1 = j[0].get<double>();
      const double x2 = j[1].get<double>();
      return {x1, x2, phi(x1), phi(x2)};
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  }
  need(j.is_object() && j.contains("x1") && j.contains("x2"));
  const double x1 = num(j, "x1", 0.0);
  const double x2 = num(j, "x2", 0.0);
  return {x1, x2, num(j, "y1", phi(x1)), num(j, "y2", phi(x2))};
}

Json to_json(const IntegratorConfig& cfg) {
  Json j;
  j["rtol"] = cfg.rtol;
  j["atol"] = cfg.atol;
  j["t_end"] = cfg.t_end;
  j["max_steps"] = cfg.max_steps;
  j["initial_step"] = cfg.initial_step;
  j["max_step"] = nan_safe(cfg.max_step);
  j["method"] = cfg.method == Method::Rosenbrock ? "rosenbrock" : "dormand_prince";
  Json ev = Json::array();
  for (const auto& e : cfg.events) {
    ev.push_back({{"id", e.id},
                  {"normal", e.normal},
                  {"level", e.level},
                  {"direction", crossing_name(e.direction)},
                  {"terminal", e.terminal}});
  }
  j["events"] = ev;
  return j;
}

IntegratorConfig integrator_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "integrator must be a JSON object");
  IntegratorConfig cfg;
  try {
    cfg.rtol = num(j, "rtol", cfg.rtol);
    cfg.atol = num(j, "atol", cfg.atol);
    cfg.t_end = num(j, "t_end", cfg.t_end);
    if (j.contains("max_steps")) cfg.max_steps = j.at("max_steps").get<long>();
    cfg.initial_step = num(j, "initial_step", cfg.initial_step);
    if (j.contains("max_step") && !j.at("max_step").is_null()) cfg.max_step = num(j, "max_step", cfg.max_step);
    if (j.contains("method")) {
      const auto m = j.at("method").get<std::string>();
      if (m == "rosenbrock") cfg.method = Method::Rosenbrock;
      else if (m == "dormand_prince") cfg.method = Method::DormandPrince;
      else throw Error(ErrorCode::InvalidConfig, "unknown method '" + m + "'");
    }
    if (j.contains("events")) {
      for (const auto& e : j.at("events")) {
        const Crossing dir = crossing_from(e.value("direction", std::string("any")));
        if (e.contains("fold")) {
          EventSpec s = EventSpec::fold_crossing(e.at("fold").at("cell").get<int>(),
                                                 e.at("fold").at("sign").get<int>(), dir);
          s.terminal = e.value("terminal", false);
          cfg.events.push_back(s);
        } else {
          EventSpec s = EventSpec::plane(e.at("id").get<std::string>(),
                                         e.at("normal").get<std::array<double, 4>>(),
                                         e.value("level", 0.0), dir);
          s.terminal = e.value("terminal", false);
          cfg.events.push_back(s);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

Json to_json(const std::vector<EventRecord>& events) {
  Json a = Json::array();
  for (const auto& e : events) a.push_back({{"t", e.t}, {"id", e.id}, {"state", to_json(e.state)}});
  return a;
}

CanardVerdict folded_canard_verdict(const FoldedEquilibrium& fe) {
  switch (fe.cls) {
    case StabilityClass::Saddle:
    case StabilityClass::UnstableNode: return CanardVerdict::CanardPossible;
    case StabilityClass::UnstableFocus: return CanardVerdict::NoCanard;
    default: return CanardVerdict::Inconclusive;
  }
}

Json to_json(const FoldedEquilibrium& fe, const std::optional<FoldedConditionMatch>& match) {
  Json j;
  j["x1_star"] = fe.x1_star;
  j["x2_star"] = fe.x2_star;
  j["sigma"] = fe.sigma;
  j["folded_variable"] = to_string(fe.folded_variable);
  j["det"] = fe.det;
  j["trace"] = fe.trace;
  j["class"] = to_string(fe.cls);
  j["boundary"] = fe.boundary ? Json(to_string(*fe.boundary)) : Json(nullptr);
  j["at_double_fold"] = fe.at_double_fold;
  j["condition_row"] = match && match->row ? Json(*match->row) : Json(nullptr);
  j["condition_verdict"] = match ? Json(to_string(match->verdict)) : Json(nullptr);
  j["canard_verdict"] = to_string(folded_canard_verdict(fe));
  return j;
}

Json to_json(const DoubleFoldReport& r) {
  return {{"x1", r.x1},
          {"x2", r.x2},
          {"same_sign", r.same_sign},
          {"sigma", r.sigma},
          {"matrix", {{r.matrix(0, 0), r.matrix(0, 1)}, {r.matrix(1, 0), r.matrix(1, 1)}}},
          {"det", r.det},
          {"trace", r.trace},
          {"class", to_string(r.cls)},
          {"condition", to_string(r.condition)},
          {"canard_verdict", to_string(r.verdict)}};
}

Json to_json(const TransverseReport& r) {
  return {{"det", r.det},
          {"trace", r.trace},
          {"attracting", r.attracting},
          {"normally_hyperbolic", r.normally_hyperbolic}};
}

Json to_json(const Equilibrium& e) {
  Json ev = Json::array();
  for (const auto& l : e.eigenvalues) ev.push_back({l.real(), l.imag()});
  return {{"state", to_json(e.state)},
          {"eigenvalues", ev},
          {"stability", to_string(e.stability)},
          {"residual", e.residual}};
}

Json to_json(const CanardReport& r) {
  Json segs = Json::array();
  for (const auto& s : r.segments) {
    Json path = Json::array();
    for (auto l : s.region_path) path.push_back(to_string(l));
    segs.push_back({{"t_start", s.t_start},
                    {"t_end", s.t_end},
                    {"max_residual", s.max_residual},
                    {"region_path", path}});
  }
  return {{"verdict", r.verdict}, {"dwell", r.dwell}, {"segments", segs}};
}

Json to_json(const MmoSignature& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks) blocks.push_back({b.large, b.small});
  return {{"blocks", blocks},
          {"signature", s.str()},
          {"t_from", s.t_from},
          {"t_to", s.t_to},
          {"stationary", s.stationary},
          {"period", s.period},
          {"has_large", s.has_large()},
          {"has_small", s.has_small()}};
}

Json to_json(const RelaxationReport& r) {
  return {{"period", r.period},
          {"amplitude", r.amplitude},
          {"synchronous", r.synchronous},
          {"delta_sync", r.delta_sync},
          {"delta_anti", r.delta_anti},
          {"t_start", r.t_start},
          {"t_end", r.t_end}};
}

Json to_json(const SynchronyPrecision& s) {
  return {{"delta_sync", s.delta_sync}, {"delta_anti", s.delta_anti}};
}

Json to_json(const SingularOrbit& o) {
  Json arcs = Json::array();
  for (const auto& a : o.arcs) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      const State& s = a.states[i];
      pts.push_back({a.times[i], s.x1, s.x2, s.y1, s.y2});
    }
    arcs.push_back({{"points", pts}});
  }
  Json jumps = Json::array();
  for (const auto& jp : o.jumps) {
    jumps.push_back({{"t", jp.t}, {"cell", jp.cell}, {"from", to_json(jp.from)}, {"to", to_json(jp.to)}});
  }
  return {{"termination", to_string(o.termination)}, {"arcs", arcs}, {"jumps", jumps}};
}

}  // namespace fhn
