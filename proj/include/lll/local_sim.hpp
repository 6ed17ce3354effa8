// Centralized simulation of the distributed fixing schedule.
//
// Nodes are events. A proper edge coloring (rank-2 case) or distance-2
// vertex coloring (rank-3 case) partitions the fixing work into rounds whose
// members touch pairwise disjoint neighborhoods, so any execution order
// within a round is equivalent. The simulator runs rounds sequentially,
// asserts the disjointness it relies on, and records the schedule; replaying
// the induced variable order through the sequential engine must reproduce
// the exact same trace, ledger and assignment.
//
// The coloring itself uses a centralized greedy stand-in; its distributed
// round cost is a separate line item in the log, not simulated.
#pragma once

#include <string>
#include <vector>

#include "lll/fixer.hpp"
#include "lll/instance.hpp"

namespace lll {

enum class ColoringKind { edge, distance2_vertex };

struct Coloring {
  ColoringKind kind = ColoringKind::edge;
  std::vector<int> color;  // per edge index / per node index
  int palette = 0;         // number of colors used
};

// Greedy proper edge coloring; palette <= 2d - 1.
Coloring greedy_edge_coloring(const DependencyGraph& graph);

// Greedy coloring proper on the square graph (distinct within distance 2);
// palette <= d^2 + 1.
Coloring greedy_distance2_coloring(const DependencyGraph& graph);

bool edge_coloring_proper(const DependencyGraph& graph, const Coloring& col);
bool distance2_coloring_proper(const DependencyGraph& graph,
                               const Coloring& col);

struct RoundRecord {
  int round = 0;
  int color = 0;
  std::vector<int> nodes;  // event nodes active this round
  std::vector<int> vars;   // variables fixed this round, in execution order
  bool pstar_ok = true;
};

struct RoundLog {
  int palette = 0;
  std::string coloring_note;  // cost of the coloring phase, reported not simulated
  std::vector<RoundRecord> rounds;
};

struct ParallelResult {
  PartialAssignment assignment;
  FixTrace trace;
  PhiLedger ledger;
  RoundLog log;
  std::vector<int> induced_order;  // concatenated variable order
};

// Rank <= 2 schedule: one round per edge color; a round fixes all variables
// of its color's edges (plus each endpoint's rank-1 variables, attached to
// the endpoint's first scheduled round; isolated nodes run in round 1).
// Total fixing rounds = palette size. DomainError on rank-3 variables.
ParallelResult run_parallel_r2(const LllInstance& inst, FixOptions options = {});

// General schedule: one round per distance-2 color; each variable is owned
// by its lexicographically least affected event, and a round's nodes fix
// their owned variables. DisjointnessViolation if two same-round nodes ever
// touch a common event. node_order (a permutation of all nodes) only changes
// the execution order inside rounds; results must be invariant under it.
ParallelResult run_parallel_r3(const LllInstance& inst, FixOptions options = {},
                               const std::vector<int>* node_order = nullptr);

}  // namespace lll
