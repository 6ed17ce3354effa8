// Exact conditional probabilities over partial assignments, and the relative
// increase Inc(event, value) = Pr[event | fixed, X=y] / Pr[event | fixed]
// that drives every fixing decision.
#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "lll/instance.hpp"

namespace lll {

// Insertion-ordered partial assignment of value indices to variables.
class PartialAssignment {
 public:
  PartialAssignment() = default;
  explicit PartialAssignment(int var_count) : value_(var_count, -1) {}

  bool assigned(int var) const { return value_[var] >= 0; }
  int value(int var) const { return value_[var]; }
  int var_count() const { return static_cast<int>(value_.size()); }
  int assigned_count() const { return static_cast<int>(order_.size()); }
  bool complete() const { return assigned_count() == var_count(); }

  void assign(int var, int value);  // throws Internal on double assignment

  // (variable, value) pairs in assignment order.
  const std::vector<std::pair<int, int>>& order() const { return order_; }

 private:
  std::vector<int> value_;
  std::vector<std::pair<int, int>> order_;
};

bool operator==(const PartialAssignment& a, const PartialAssignment& b);

class ProbEngine {
 public:
  explicit ProbEngine(const LllInstance& inst) : inst_(inst) {}

  // Pr[event | partial], exact. Variables outside the event's scope never
  // matter; results are memoized on the event-local restriction.
  Rat cond_prob(int event, const PartialAssignment& partial);

  // Inc(event, var=value) relative to partial. Zero when the conditional
  // probability is already zero. Requires var unassigned and affecting event
  // (VarDoesNotAffect otherwise).
  Rat inc(int event, const PartialAssignment& partial, int var, int value);

  // Exact check of sum_y Pr[var=y] * Inc(event, var=y) == 1; requires
  // Pr[event | partial] > 0.
  bool expectation_identity_check(int event, const PartialAssignment& partial,
                                  int var);

  const LllInstance& instance() const { return inst_; }

 private:
  // restriction[i] = value index for the event's i-th variable, or -1.
  Rat cond_restricted(int event, const std::vector<int>& restriction);

  struct KeyHash {
    std::size_t operator()(const std::pair<int, std::vector<int>>& k) const;
  };

  const LllInstance& inst_;
  std::unordered_map<std::pair<int, std::vector<int>>, Rat, KeyHash> cache_;
};

}  // namespace lll
