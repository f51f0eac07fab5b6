#pragma once
// JSON encodings of games and theories.
//
// game:    {"strategies":[..], "consequences":[..], "utility":{y:u},
//           "situations":[{"id":G, "kernel":{"ai|aj":{y:p}}}], "q":[..]}
// theory:  {"name":..., "models":[{"label":..., "kernel":{...}}]}
// extended theory: as theory, each model may carry "conj_a"/"conj_b" labels;
//           "conjectures":"all" expands every model over all conjecture pairs.

#include "ez/game.hpp"

#include <json.hpp>

namespace ez {

using json = nlohmann::json;

json game_to_json(const StageGame& game);
StageGame game_from_json(const json& j);

json theory_to_json(const Theory& theory, const StageGame& game);
Theory theory_from_json(const json& j, const StageGame& game);

json extended_theory_to_json(const ExtendedTheory& theory, const StageGame& game);
ExtendedTheory extended_theory_from_json(const json& j, const StageGame& game);

json read_json_file(const std::string& path);

}  // namespace ez
