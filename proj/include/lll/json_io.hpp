// File formats. All serialization is deterministic (ordered fields, exact
// "num/den" rationals) so identical runs produce byte-identical artifacts.
//
//   instance.json   {"rank_cap": R, "variables": [...], "events": [...]}
//   assignment.json {"assignment": [{"var": id, "value": label}, ...]} in fix order
//   trace.jsonl     one step per line: variable, value, per-event Inc,
//                   ledger writes (edge, node, before, after), check flag
//   rounds.jsonl    one round per line plus a trailing summary line
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lll/fixer.hpp"
#include "lll/instance.hpp"
#include "lll/local_sim.hpp"

namespace lll {

nlohmann::ordered_json instance_to_json(const LllInstance& inst);
// context names the source (file path) for error messages.
LllInstance instance_from_json(const nlohmann::json& j, const std::string& context);

LllInstance load_instance(const std::string& path);
void save_instance(const LllInstance& inst, const std::string& path);

void save_assignment(const LllInstance& inst, const PartialAssignment& pa,
                     const std::string& path);
// (var, value) pairs in file order; entries validated against the instance.
std::vector<std::pair<int, int>> load_assignment(const LllInstance& inst,
                                                 const std::string& path);

void save_trace(const LllInstance& inst, const FixTrace& trace,
                const std::string& path);
FixTrace load_trace(const LllInstance& inst, const std::string& path);

void save_round_log(const LllInstance& inst, const RoundLog& log,
                    const std::string& path);

}  // namespace lll
