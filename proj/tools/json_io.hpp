#pragma once

// JSON (de)serialization for the CLI: scenario files in, reports and
// structured results out.  Rationals travel as strings ("a/b", or just "a"
// when integral) so nothing is ever rounded.

#include "btlf/scenario.hpp"
#include "json.hpp"

namespace btlf {

using Json = nlohmann::ordered_json;

Json rat_json(const Rat& q);
Rat rat_from_json(const Json& j);  // accepts "a/b", "a", or a JSON integer

Json fn_json(const LatticeFunction& lf);  // canonical {basis, offsets}
Json point_json(const BetaDecomposition& D, const CentralBuildingPoint& x);
Json decomposition_json(const BetaDecomposition& D);
Json report_json(const Report& rep);

Scenario scenario_from_json(const Json& j);
Json scenario_json(const Scenario& sc);

}  // namespace btlf
