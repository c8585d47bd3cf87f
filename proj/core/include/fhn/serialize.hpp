#pragma once

// JSON encodings of parameters and reports.

#include <nlohmann/json.hpp>
#include <optional>

#include "fhn/analysis.hpp"
#include "fhn/integrator.hpp"
#include "fhn/model.hpp"
#include "fhn/reduced_flow.hpp"
#include "fhn/stability.hpp"

namespace fhn {

using Json = nlohmann::ordered_json;

/// {"b","c","k","epsilon","mode"}; mode is "SymmetricBidirectional",
/// "AsymmetricForcing" or {"PerturbedSecondCell": {"b2","c2","k2"}}.
Json to_json(const Params& p);
/// Missing fields take defaults; throws InvalidConfig on wrong types or unknown modes.
Params params_from_json(const Json& j);

Json to_json(const State& s);
/// Accepts {"x1","x2","y1","y2"}, [x1,x2,y1,y2], or a lifted [x1,x2] / {"x1","x2"}.
State state_from_json(const Json& j);

Json to_json(const IntegratorConfig& cfg);
/// Reads rtol, atol, t_end, max_steps, initial_step, max_step, method and
/// events ([{"id","normal","level","direction","terminal"}] or fold shorthands
/// {"fold": {"cell", "sign"}}).
IntegratorConfig integrator_from_json(const Json& j);

Json to_json(const std::vector<EventRecord>& events);

/// Canard possibility implied by a folded equilibrium's type: saddles and
/// nodes admit canards, foci do not.
CanardVerdict folded_canard_verdict(const FoldedEquilibrium& fe);

Json to_json(const FoldedEquilibrium& fe, const std::optional<FoldedConditionMatch>& match);
Json to_json(const DoubleFoldReport& r);
Json to_json(const TransverseReport& r);
Json to_json(const Equilibrium& e);
Json to_json(const CanardReport& r);
Json to_json(const MmoSignature& s);
Json to_json(const RelaxationReport& r);
Json to_json(const SynchronyPrecision& s);
Json to_json(const SingularOrbit& o);

}  // namespace fhn
