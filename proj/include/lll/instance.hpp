// Instance model: mutually independent finite random variables, bad events
// given by explicit truth tables, and the derived dependency structures.
//
// Internally everything is index-based; string identifiers survive for file
// formats and error messages. An instance is immutable once built.
#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lll/rational.hpp"

namespace lll {

struct Variable {
  std::string id;
  std::vector<std::string> domain;  // value labels, order is significant
  std::vector<Rat> probs;           // parallel to domain, sums to exactly 1
};

struct BadEvent {
  std::string id;
  std::vector<int> vars;                 // variable indices, order fixes table columns
  std::vector<std::vector<int>> occurs; // occurring joint value tuples (value indices)
};

// Events are adjacent when they share a variable.
struct DependencyGraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;            // u < v, lexicographic
  std::vector<std::vector<std::pair<int, int>>> adj; // node -> (neighbor, edge index)
  int max_degree = 0;

  int edge_index(int u, int v) const;  // -1 when not adjacent
};

// One hyperedge per variable: the set of events it affects (size 1..rank_cap).
struct VariableHypergraph {
  std::vector<std::vector<int>> events_of_var;  // sorted event indices
};

class LllInstance {
 public:
  std::vector<Variable> variables;
  std::vector<BadEvent> events;
  int rank_cap = 3;

  DependencyGraph dep;
  VariableHypergraph hyper;
  std::vector<Rat> event_prob;  // exact unconditioned probabilities

  int var_index(const std::string& id) const;    // -1 when unknown
  int event_index(const std::string& id) const;  // -1 when unknown
  int var_rank(int var) const { return static_cast<int>(hyper.events_of_var[var].size()); }

  std::unordered_map<std::string, int> var_by_id;
  std::unordered_map<std::string, int> event_by_id;
};

// Id-referencing input forms (what files and generators produce).
struct VariableSpec {
  std::string id;
  std::vector<std::string> domain;
  std::vector<std::string> probs;  // "num/den" strings
};

struct EventSpec {
  std::string id;
  std::vector<std::string> vars;
  std::vector<std::vector<std::string>> occurs;  // rows of value labels
};

// Validates and compiles an instance:
//   - identifiers unique, references resolvable, probabilities strictly
//     positive summing to exactly 1, truth tables well-formed, duplicate-free;
//   - every variable affects between 1 and rank_cap events (RankExceeded
//     beyond the cap, MalformedTable for unused variables);
//   - every event satisfies Pr[event] < 2^-d exactly, where d is the maximum
//     dependency degree (CriterionViolated otherwise, naming the event).
LllInstance build(const std::vector<VariableSpec>& variables,
                  const std::vector<EventSpec>& events, int rank_cap);

int dependency_degree(const LllInstance& inst);

// Optional normalization: variables with identical hyperedges merge into one
// product variable (joint domain, product probabilities, tables rewritten).
// Dependency structure and all event probabilities are preserved.
LllInstance merge_shared_variables(const LllInstance& inst);

// Structural equality on the declared content (ids, domains, probabilities,
// tables, rank cap); derived structures are deterministic functions of it.
bool same_instance(const LllInstance& a, const LllInstance& b);

// Truth-table lookup on a fully assigned event: values[i] is the value index
// chosen for variable i.
bool event_occurs_on(const LllInstance& inst, int event,
                     const std::vector<int>& values);

}  // namespace lll
