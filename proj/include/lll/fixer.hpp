// The deterministic fixing engine.
//
// State is a pair (partial assignment, edge weight ledger phi). The ledger
// assigns each dependency edge two sides phi_e^u, phi_e^v in [0, 2] with
// phi_e^u + phi_e^v <= 2, all-ones initially, and the running invariant is:
// for every event v,
//   Pr[v | fixed vars] <= p_v * prod_{e at v} phi_e^v         (exactness gate)
// where p_v is the event's unconditioned probability. Because p_v < 2^-d and
// each product has at most d factors bounded by 2, no event can reach
// conditional probability 1, so the final full assignment avoids them all.
//
// Fixing a variable multiplies the conditional probabilities of its (at most
// three) events by Inc(event, y); the chosen value's increases are absorbed
// into the ledger by decomposing a representable target triple into fresh
// pairwise weights. Rank-2 and rank-1 variables take the degenerate forms of
// the same rule (virtual hyperedge slots carry weight 1 and are discarded).
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lll/instance.hpp"
#include "lll/prob_engine.hpp"
#include "lll/representable.hpp"

namespace lll {

class PhiLedger {
 public:
  explicit PhiLedger(const DependencyGraph& graph);

  const Rat& get(int edge, int node) const;
  void set(int edge, int node, const Rat& value);

  // prod_{e at node} phi_e^node; empty product is 1.
  Rat node_product(int node) const;

  // nullopt when every entry is in [0, 2] and every edge sum is <= 2;
  // otherwise a description of the first violation.
  std::optional<std::string> subproperty_violation() const;

  const DependencyGraph& graph() const { return *graph_; }

 private:
  int side(int edge, int node) const;  // 0 = smaller endpoint, 1 = larger

  const DependencyGraph* graph_;
  std::vector<std::array<Rat, 2>> phi_;
};

bool operator==(const PhiLedger& a, const PhiLedger& b);

struct LedgerWrite {
  int edge = -1;
  int node = -1;
  Rat before, after;
};

struct TraceStep {
  int var = -1;
  int value = -1;
  std::vector<std::pair<int, Rat>> inc;  // (event, Inc) over the real hyperedge
  std::vector<LedgerWrite> writes;
  bool pstar_checked = false;
};

struct FixTrace {
  std::vector<TraceStep> steps;
};

enum class CheckLevel {
  every_step,  // re-verify the running invariant after every fixing
  sampled,     // every step for the first 1000 fixings, then every 100th
};

// Full invariant audit: ledger subproperty plus, for every event,
// Pr[event | partial] <= p_event * node_product(event). Exact; nullopt when
// everything holds.
std::optional<std::string> pstar_violation(const LllInstance& inst,
                                           ProbEngine& prob,
                                           const PhiLedger& ledger,
                                           const PartialAssignment& partial);

constexpr int kVirtualNode = -1;

// A variable's hyperedge padded to three slots with virtual events (which
// have Inc identically 1 and no ledger presence).
struct LiftedHyperedge {
  std::array<int, 3> nodes;  // real event indices first, then kVirtualNode
  int real_count = 0;
};

LiftedHyperedge embed_rank_lift(const LllInstance& inst, int var);

// Values whose scaled triple (Inc(u,y)*a, Inc(v,y)*b, Inc(w,y)*c) leaves the
// representable region, with virtual slots scaling by 1. The triple must be
// representable (DomainError otherwise); AllValuesEvil when nothing survives.
std::vector<int> find_evil_values(const LllInstance& inst, ProbEngine& prob,
                                  int var, const PartialAssignment& partial,
                                  const Triple& triple);

struct FixOptions {
  CheckLevel check = CheckLevel::every_step;
  // Round chosen target triples up to 32-bit dyadics before decomposing
  // (exactness-preserving; keeps ledger entries short-lived in bit length).
  bool simplify_ledger = true;
};

class FixSession {
 public:
  explicit FixSession(const LllInstance& inst, FixOptions options = {});

  // Fixes one unassigned variable (any rank) and returns the chosen value
  // index. Dispatches to the rank-3 triple machinery or its rank-2/rank-1
  // degenerate forms.
  int fix_step(int var);

  // The rank-2 rule made explicit: choose y minimizing
  // phi_e^u * Inc(u,y) + phi_e^v * Inc(v,y) (the minimum is always <= 2) and
  // write both sides of e. Requires rank(var) == 2.
  int fix_r2(int var);

  // The full triple rule on the lifted hyperedge. Requires rank(var) == 3.
  int fix_r3(int var);

  void final_checks();  // end-of-run gate; FinalEventOccurred is the sentinel

  const LllInstance& instance() const { return inst_; }
  const PartialAssignment& partial() const { return partial_; }
  const PhiLedger& ledger() const { return ledger_; }
  const FixTrace& trace() const { return trace_; }
  ProbEngine& prob() { return prob_; }

  std::size_t steps_done() const { return trace_.steps.size(); }
  std::size_t pstar_checks() const { return pstar_checks_; }
  std::size_t identity_checks() const { return identity_checks_; }
  // Largest rank-2 weighted sum ever accepted (diagnostic; must stay <= 2).
  const std::optional<Rat>& max_r2_weighted_sum() const { return max_r2_sum_; }

 private:
  void precheck();
  void postcheck();
  bool check_due() const;
  void apply_triple_writes(int var, int value,
                           const std::vector<std::pair<int, Rat>>& incs,
                           const Triple& target);
  int fix_rank1(int var);

  const LllInstance& inst_;
  FixOptions options_;
  ProbEngine prob_;
  PartialAssignment partial_;
  PhiLedger ledger_;
  FixTrace trace_;
  std::size_t pstar_checks_ = 0;
  std::size_t identity_checks_ = 0;
  std::optional<Rat> max_r2_sum_;
};

struct RunResult {
  PartialAssignment assignment;
  FixTrace trace;
  PhiLedger ledger;
  std::size_t pstar_checks = 0;
  std::size_t identity_checks = 0;
  std::optional<Rat> max_r2_weighted_sum;
};

enum class OrderPolicy {
  declaration,
  reverse,
  seeded_shuffle,
  adaptive_adversary,  // always attacks the currently most endangered spot
};

const char* to_string(OrderPolicy p);
std::optional<OrderPolicy> order_policy_from(const std::string& name);

// Next-variable callback; must return an unassigned variable index.
using NextVarFn = std::function<int(const FixSession&)>;

RunResult run_sequential(const LllInstance& inst, const std::vector<int>& order,
                         FixOptions options = {});
RunResult run_sequential(const LllInstance& inst, OrderPolicy policy,
                         std::uint64_t seed, FixOptions options = {});
RunResult run_sequential(const LllInstance& inst, const NextVarFn& next_var,
                         FixOptions options = {});

// The static orders (declaration, reverse, seeded shuffle). The adaptive
// adversary has no static order; ask run_sequential for it instead.
std::vector<int> make_order(const LllInstance& inst, OrderPolicy policy,
                            std::uint64_t seed);

// Applies a trace's recorded writes and assignments to fresh state, checking
// each step's recorded "before" values; the reconstruction other components
// (and the verifier) compare against.
std::pair<PartialAssignment, PhiLedger> replay_trace(const LllInstance& inst,
                                                     const FixTrace& trace);

bool operator==(const FixTrace& a, const FixTrace& b);

}  // namespace lll
