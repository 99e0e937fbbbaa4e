#pragma once

#include <json.hpp>

#include "girg/harness.hpp"
#include "girg/model.hpp"
#include "girg/protocol.hpp"
#include "girg/regimes.hpp"
#include "girg/structure.hpp"

namespace girg {

// JSON views of the library's result types, as emitted by the command-line tool.

[[nodiscard]] nlohmann::json to_json(const ModelParams& p);
[[nodiscard]] nlohmann::json graph_summary(const Graph& g);
[[nodiscard]] nlohmann::json spread_summary(const SpreadTrace& t);
[[nodiscard]] nlohmann::json to_json(const RegimeReport& r);
[[nodiscard]] nlohmann::json to_json(const CensusReport& r);
[[nodiscard]] nlohmann::json to_json(const PathResult& r);
[[nodiscard]] nlohmann::json to_json(const Hierarchy& h);
[[nodiscard]] nlohmann::json to_json(const Verdict& v);
[[nodiscard]] nlohmann::json to_json(const FitReport& f);

} // namespace girg
