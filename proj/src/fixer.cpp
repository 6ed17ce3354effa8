#include "lll/fixer.hpp"

#include <algorithm>

#include "lll/errors.hpp"
#include "lll/log.hpp"
#include "lll/rng.hpp"

namespace lll {

// ---------------------------------------------------------------------------
// PhiLedger

PhiLedger::PhiLedger(const DependencyGraph& graph) : graph_(&graph) {
  phi_.assign(graph.edges.size(), {Rat(1), Rat(1)});
}

int PhiLedger::side(int edge, int node) const {
  auto [u, v] = graph_->edges[edge];
  require(node == u || node == v, ErrorKind::Internal,
          "ledger access for a node not on the edge");
  return node == u ? 0 : 1;
}

const Rat& PhiLedger::get(int edge, int node) const {
  return phi_[edge][side(edge, node)];
}

void PhiLedger::set(int edge, int node, const Rat& value) {
  require(sgn(value) >= 0 && value <= 2, ErrorKind::Internal,
          "ledger entry out of [0, 2]");
  phi_[edge][side(edge, node)] = value;
}

Rat PhiLedger::node_product(int node) const {
  Rat prod(1);
  for (const auto& [nbr, e] : graph_->adj[node]) {
    prod *= phi_[e][side(e, node)];
  }
  return prod;
}

std::optional<std::string> PhiLedger::subproperty_violation() const {
  for (std::size_t e = 0; e < phi_.size(); ++e) {
    const auto& pair = phi_[e];
    if (sgn(pair[0]) < 0 || pair[0] > 2 || sgn(pair[1]) < 0 || pair[1] > 2) {
      return "edge " + std::to_string(e) + " has an entry outside [0, 2]";
    }
    if (pair[0] + pair[1] > 2) {
      return "edge " + std::to_string(e) + " sides sum to " +
             rat_str(pair[0] + pair[1]) + " > 2";
    }
  }
  return std::nullopt;
}

bool operator==(const PhiLedger& a, const PhiLedger& b) {
  const auto& edges = a.graph().edges;
  if (edges.size() != b.graph().edges.size()) return false;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    int ei = static_cast<int>(e);
    if (a.get(ei, u) != b.get(ei, u) || a.get(ei, v) != b.get(ei, v)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Invariant audit

std::optional<std::string> pstar_violation(const LllInstance& inst,
                                           ProbEngine& prob,
                                           const PhiLedger& ledger,
                                           const PartialAssignment& partial) {
  if (auto v = ledger.subproperty_violation()) return v;
  for (std::size_t t = 0; t < inst.events.size(); ++t) {
    Rat lhs = prob.cond_prob(static_cast<int>(t), partial);
    Rat rhs = inst.event_prob[t] * ledger.node_product(static_cast<int>(t));
    if (lhs > rhs) {
      return "event \"" + inst.events[t].id + "\": conditional probability " +
             rat_str(lhs) + " exceeds its running bound " + rat_str(rhs);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lift and evil values

LiftedHyperedge embed_rank_lift(const LllInstance& inst, int var) {
  const auto& evs = inst.hyper.events_of_var[var];
  require(!evs.empty() && evs.size() <= 3, ErrorKind::Internal,
          "variable hyperedge must have 1 to 3 events");
  LiftedHyperedge lift;
  lift.nodes = {kVirtualNode, kVirtualNode, kVirtualNode};
  lift.real_count = static_cast<int>(evs.size());
  for (std::size_t i = 0; i < evs.size(); ++i) lift.nodes[i] = evs[i];
  return lift;
}

std::vector<int> find_evil_values(const LllInstance& inst, ProbEngine& prob,
                                  int var, const PartialAssignment& partial,
                                  const Triple& triple) {
  if (!is_representable(triple)) {
    fail(ErrorKind::DomainError,
         "find_evil_values needs a representable reference triple",
         {{"a", rat_str(triple.a)},
          {"b", rat_str(triple.b)},
          {"c", rat_str(triple.c)}});
  }
  LiftedHyperedge lift = embed_rank_lift(inst, var);
  const Variable& v = inst.variables[var];

  std::vector<int> evil;
  nlohmann::json dump = nlohmann::json::array();
  for (std::size_t y = 0; y < v.domain.size(); ++y) {
    auto scale = [&](int slot, const Rat& base) -> Rat {
      int node = lift.nodes[slot];
      if (node == kVirtualNode) return base;  // virtual events never move
      return base * prob.inc(node, partial, var, static_cast<int>(y));
    };
    Triple scaled{scale(0, triple.a), scale(1, triple.b), scale(2, triple.c)};
    bool ok = is_representable(scaled);
    dump.push_back({{"value", v.domain[y]},
                    {"scaled",
                     {rat_str(scaled.a), rat_str(scaled.b), rat_str(scaled.c)}},
                    {"evil", !ok}});
    if (!ok) evil.push_back(static_cast<int>(y));
  }
  if (evil.size() == v.domain.size()) {
    fail(ErrorKind::AllValuesEvil,
         "every value of variable \"" + v.id + "\" scales the triple outside "
         "the representable region",
         {{"variable", v.id}, {"values", dump}});
  }
  return evil;
}

// ---------------------------------------------------------------------------
// FixSession

FixSession::FixSession(const LllInstance& inst, FixOptions options)
    : inst_(inst),
      options_(options),
      prob_(inst),
      partial_(static_cast<int>(inst.variables.size())),
      ledger_(inst.dep) {}

bool FixSession::check_due() const {
  if (options_.check == CheckLevel::every_step) return true;
  std::size_t n = steps_done();
  return n <= 1000 || n % 100 == 0;
}

void FixSession::precheck() {
  // The post-step audit of the previous step already certified this exact
  // state; only re-audit across unchecked gaps of the sampling schedule.
  if (trace_.steps.empty() || trace_.steps.back().pstar_checked) return;
  if (options_.check == CheckLevel::every_step) return;
  std::size_t n = steps_done() + 1;
  if (n > 1000 && n % 100 != 0) return;
  if (auto v = pstar_violation(inst_, prob_, ledger_, partial_)) {
    fail(ErrorKind::PStarViolatedPre, *v);
  }
  ++pstar_checks_;
}

void FixSession::postcheck() {
  if (!check_due()) return;
  if (auto v = pstar_violation(inst_, prob_, ledger_, partial_)) {
    fail(ErrorKind::Internal, "fixing step broke the running invariant: " + *v);
  }
  ++pstar_checks_;
  trace_.steps.back().pstar_checked = true;
}

int FixSession::fix_step(int var) {
  require(var >= 0 && var < partial_.var_count(), ErrorKind::Internal,
          "fix_step: variable index out of range");
  require(!partial_.assigned(var), ErrorKind::Internal,
          "fix_step: variable already fixed");
  switch (inst_.var_rank(var)) {
    case 1: return fix_rank1(var);
    case 2: return fix_r2(var);
    default: return fix_r3(var);
  }
}

namespace {

// For events still possible, sum_y Pr[y] * Inc(event, y) == 1 exactly.
void audit_identity(const Variable& v, std::size_t event_count,
                    const std::vector<std::vector<Rat>>& incs,
                    const std::vector<bool>& alive, std::size_t& counter) {
  for (std::size_t s = 0; s < event_count; ++s) {
    if (!alive[s]) continue;
    Rat sum(0);
    for (std::size_t y = 0; y < v.domain.size(); ++y) {
      sum += v.probs[y] * incs[y][s];
    }
    require(sum == 1, ErrorKind::Internal,
            "per-value increases do not average to 1");
    ++counter;
  }
}

}  // namespace

int FixSession::fix_rank1(int var) {
  precheck();
  const Variable& v = inst_.variables[var];
  int t = inst_.hyper.events_of_var[var][0];

  std::vector<std::vector<Rat>> incs(v.domain.size());
  std::vector<bool> alive{sgn(prob_.cond_prob(t, partial_)) > 0};
  int best = -1;
  Rat best_inc;
  for (std::size_t y = 0; y < v.domain.size(); ++y) {
    Rat iy = prob_.inc(t, partial_, var, static_cast<int>(y));
    if (best < 0 || iy < best_inc) {
      best = static_cast<int>(y);
      best_inc = iy;
    }
    incs[y] = {std::move(iy)};
  }
  audit_identity(v, 1, incs, alive, identity_checks_);
  // The increases average to 1 under the value distribution, so the smallest
  // one is at most 1 and the event's conditional probability cannot grow.
  require(best_inc <= 1, ErrorKind::NoGoodValue,
          "no value keeps a rank-1 event's conditional probability bounded");

  TraceStep step;
  step.var = var;
  step.value = best;
  step.inc = {{t, incs[best][0]}};
  partial_.assign(var, best);
  trace_.steps.push_back(std::move(step));
  postcheck();
  return best;
}

int FixSession::fix_r2(int var) {
  require(inst_.var_rank(var) == 2, ErrorKind::Internal,
          "fix_r2 needs a rank-2 variable");
  require(!partial_.assigned(var), ErrorKind::Internal,
          "fix_r2: variable already fixed");
  precheck();
  const Variable& v = inst_.variables[var];
  int u = inst_.hyper.events_of_var[var][0];
  int w = inst_.hyper.events_of_var[var][1];
  int e = inst_.dep.edge_index(u, w);
  require(e >= 0, ErrorKind::Internal, "rank-2 variable without its edge");
  const Rat phi_u = ledger_.get(e, u);
  const Rat phi_w = ledger_.get(e, w);

  std::vector<std::vector<Rat>> incs(v.domain.size());
  std::vector<bool> alive{sgn(prob_.cond_prob(u, partial_)) > 0,
                          sgn(prob_.cond_prob(w, partial_)) > 0};
  int best = -1;
  Rat best_sum;
  for (std::size_t y = 0; y < v.domain.size(); ++y) {
    Rat iu = prob_.inc(u, partial_, var, static_cast<int>(y));
    Rat iw = prob_.inc(w, partial_, var, static_cast<int>(y));
    Rat sum = phi_u * iu + phi_w * iw;
    if (best < 0 || sum < best_sum) {
      best = static_cast<int>(y);
      best_sum = sum;
    }
    incs[y] = {std::move(iu), std::move(iw)};
  }
  audit_identity(v, 2, incs, alive, identity_checks_);
  // The weighted sum averages to phi_u + phi_w <= 2 under the value
  // distribution, so its minimum is admissible.
  if (best_sum > 2) {
    fail(ErrorKind::NoGoodValue,
         "no value keeps the rank-2 weighted increase within 2",
         {{"variable", v.id}, {"min_sum", rat_str(best_sum)}});
  }
  if (!max_r2_sum_ || best_sum > *max_r2_sum_) max_r2_sum_ = best_sum;

  TraceStep step;
  step.var = var;
  step.value = best;
  step.inc = {{u, incs[best][0]}, {w, incs[best][1]}};
  Rat psi_u = phi_u * incs[best][0];
  Rat psi_w = phi_w * incs[best][1];
  step.writes.push_back({e, u, phi_u, psi_u});
  step.writes.push_back({e, w, phi_w, psi_w});
  ledger_.set(e, u, psi_u);
  ledger_.set(e, w, psi_w);
  partial_.assign(var, best);
  trace_.steps.push_back(std::move(step));
  postcheck();
  return best;
}

void FixSession::apply_triple_writes(
    int var, int value, const std::vector<std::pair<int, Rat>>& incs,
    const Triple& target) {
  const auto& evs = inst_.hyper.events_of_var[var];
  int u = evs[0], v = evs[1], w = evs[2];
  int e_uv = inst_.dep.edge_index(u, v);
  int e_uw = inst_.dep.edge_index(u, w);
  int e_vw = inst_.dep.edge_index(v, w);
  require(e_uv >= 0 && e_uw >= 0 && e_vw >= 0, ErrorKind::Internal,
          "rank-3 variable without its triangle of edges");

  EdgeSplit split = decompose(target);

  TraceStep step;
  step.var = var;
  step.value = value;
  step.inc = incs;
  auto write = [&](int edge, int node, const Rat& after) {
    step.writes.push_back({edge, node, ledger_.get(edge, node), after});
    ledger_.set(edge, node, after);
  };
  write(e_uv, u, split.a1);
  write(e_uw, u, split.a2);
  write(e_uv, v, split.b1);
  write(e_vw, v, split.b3);
  write(e_uw, w, split.c2);
  write(e_vw, w, split.c3);
  partial_.assign(var, value);
  trace_.steps.push_back(std::move(step));
}

int FixSession::fix_r3(int var) {
  require(inst_.var_rank(var) == 3, ErrorKind::Internal,
          "fix_r3 needs a rank-3 variable");
  require(!partial_.assigned(var), ErrorKind::Internal,
          "fix_r3: variable already fixed");
  precheck();
  const Variable& v = inst_.variables[var];
  const auto& evs = inst_.hyper.events_of_var[var];
  int nu = evs[0], nv = evs[1], nw = evs[2];
  int e_uv = inst_.dep.edge_index(nu, nv);
  int e_uw = inst_.dep.edge_index(nu, nw);
  int e_vw = inst_.dep.edge_index(nv, nw);
  require(e_uv >= 0 && e_uw >= 0 && e_vw >= 0, ErrorKind::Internal,
          "rank-3 variable without its triangle of edges");

  // Current per-node products of this variable's own edge pair.
  Triple base{ledger_.get(e_uv, nu) * ledger_.get(e_uw, nu),
              ledger_.get(e_uv, nv) * ledger_.get(e_vw, nv),
              ledger_.get(e_uw, nw) * ledger_.get(e_vw, nw)};

  std::vector<std::vector<Rat>> incs(v.domain.size());
  std::vector<bool> alive{sgn(prob_.cond_prob(nu, partial_)) > 0,
                          sgn(prob_.cond_prob(nv, partial_)) > 0,
                          sgn(prob_.cond_prob(nw, partial_)) > 0};
  int best = -1;
  Rat best_slack;
  Triple best_triple;
  nlohmann::json dump = nlohmann::json::array();
  for (std::size_t y = 0; y < v.domain.size(); ++y) {
    Rat iu = prob_.inc(nu, partial_, var, static_cast<int>(y));
    Rat iv = prob_.inc(nv, partial_, var, static_cast<int>(y));
    Rat iw = prob_.inc(nw, partial_, var, static_cast<int>(y));
    Triple scaled{base.a * iu, base.b * iv, base.c * iw};
    if (is_representable(scaled)) {
      Rat slack = representable_slack(scaled);
      if (best < 0 || slack > best_slack) {
        best = static_cast<int>(y);
        best_slack = slack;
        best_triple = scaled;
      }
    } else {
      dump.push_back({{"value", v.domain[y]},
                      {"scaled", {rat_str(scaled.a), rat_str(scaled.b),
                                  rat_str(scaled.c)}}});
    }
    incs[y] = {std::move(iu), std::move(iv), std::move(iw)};
  }
  audit_identity(v, 3, incs, alive, identity_checks_);
  if (best < 0) {
    fail(ErrorKind::NoGoodValue,
         "every value of variable \"" + v.id + "\" scales its weight triple "
         "outside the representable region",
         {{"variable", v.id},
          {"base", {rat_str(base.a), rat_str(base.b), rat_str(base.c)}},
          {"evil_values", dump}});
  }

  // Round the target up to short dyadics when that stays representable;
  // dominating the exact target preserves the invariant and keeps ledger
  // entries from compounding in bit length across steps.
  Triple target = best_triple;
  if (options_.simplify_ledger) {
    Triple rounded{ceil_dyadic(best_triple.a, 32), ceil_dyadic(best_triple.b, 32),
                   ceil_dyadic(best_triple.c, 32)};
    if (is_representable(rounded)) target = rounded;
  }

  std::vector<std::pair<int, Rat>> inc_rec{
      {nu, incs[best][0]}, {nv, incs[best][1]}, {nw, incs[best][2]}};
  apply_triple_writes(var, best, inc_rec, target);
  postcheck();
  return best;
}

void FixSession::final_checks() {
  require(partial_.complete(), ErrorKind::Internal,
          "final checks need a complete assignment");
  if (auto v = pstar_violation(inst_, prob_, ledger_, partial_)) {
    fail(ErrorKind::Internal, "final state violates the invariant: " + *v);
  }
  ++pstar_checks_;
  std::vector<int> values(partial_.var_count());
  for (int i = 0; i < partial_.var_count(); ++i) values[i] = partial_.value(i);
  for (std::size_t t = 0; t < inst_.events.size(); ++t) {
    // p < 2^-d and at most d ledger factors of at most 2 each keep every
    // final bound below 1, so an occurring event means a broken engine.
    require(inst_.event_prob[t] * ledger_.node_product(static_cast<int>(t)) < 1,
            ErrorKind::Internal, "final bound reached 1");
    if (event_occurs_on(inst_, static_cast<int>(t), values)) {
      fail(ErrorKind::FinalEventOccurred,
           "event \"" + inst_.events[t].id + "\" occurs under the final "
           "assignment",
           {{"event", inst_.events[t].id}});
    }
  }
}

// ---------------------------------------------------------------------------
// Sequential driver

namespace {

RunResult finish(FixSession&& session) {
  session.final_checks();
  RunResult result{session.partial(), session.trace(), session.ledger(),
                   session.pstar_checks(), session.identity_checks(),
                   session.max_r2_weighted_sum()};
  return result;
}

}  // namespace

RunResult run_sequential(const LllInstance& inst, const std::vector<int>& order,
                         FixOptions options) {
  std::vector<bool> seen(inst.variables.size(), false);
  require(order.size() == inst.variables.size(), ErrorKind::Internal,
          "order must cover every variable exactly once");
  for (int var : order) {
    require(var >= 0 && var < static_cast<int>(seen.size()) && !seen[var],
            ErrorKind::Internal, "order must cover every variable exactly once");
    seen[var] = true;
  }
  FixSession session(inst, options);
  for (int var : order) session.fix_step(var);
  return finish(std::move(session));
}

RunResult run_sequential(const LllInstance& inst, const NextVarFn& next_var,
                         FixOptions options) {
  FixSession session(inst, options);
  while (!session.partial().complete()) {
    int var = next_var(session);
    session.fix_step(var);
  }
  return finish(std::move(session));
}

namespace {

// The adaptive adversary always attacks the most endangered neighborhood:
// the unfixed variable whose events carry the largest total running bound.
int adversary_pick(const FixSession& s) {
  const LllInstance& inst = s.instance();
  int best = -1;
  Rat best_score;
  for (int var = 0; var < s.partial().var_count(); ++var) {
    if (s.partial().assigned(var)) continue;
    Rat score(0);
    for (int t : inst.hyper.events_of_var[var]) {
      score += inst.event_prob[t] * s.ledger().node_product(t);
    }
    if (best < 0 || score > best_score) {
      best = var;
      best_score = score;
    }
  }
  require(best >= 0, ErrorKind::Internal, "adversary found no unfixed variable");
  return best;
}

}  // namespace

RunResult run_sequential(const LllInstance& inst, OrderPolicy policy,
                         std::uint64_t seed, FixOptions options) {
  if (policy == OrderPolicy::adaptive_adversary) {
    return run_sequential(inst, NextVarFn(adversary_pick), options);
  }
  return run_sequential(inst, make_order(inst, policy, seed), options);
}

std::vector<int> make_order(const LllInstance& inst, OrderPolicy policy,
                            std::uint64_t seed) {
  std::vector<int> order(inst.variables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  switch (policy) {
    case OrderPolicy::declaration:
      break;
    case OrderPolicy::reverse:
      std::reverse(order.begin(), order.end());
      break;
    case OrderPolicy::seeded_shuffle: {
      Rng rng(seed);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
      }
      break;
    }
    case OrderPolicy::adaptive_adversary:
      fail(ErrorKind::UsageError,
           "the adaptive adversary decides online and has no static order");
  }
  return order;
}

const char* to_string(OrderPolicy p) {
  switch (p) {
    case OrderPolicy::declaration: return "declaration";
    case OrderPolicy::reverse: return "reverse";
    case OrderPolicy::seeded_shuffle: return "seeded-shuffle";
    case OrderPolicy::adaptive_adversary: return "adaptive-adversary";
  }
  return "unknown";
}

std::optional<OrderPolicy> order_policy_from(const std::string& name) {
  if (name == "declaration") return OrderPolicy::declaration;
  if (name == "reverse") return OrderPolicy::reverse;
  if (name == "seeded-shuffle") return OrderPolicy::seeded_shuffle;
  if (name == "adaptive-adversary") return OrderPolicy::adaptive_adversary;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Trace replay

std::pair<PartialAssignment, PhiLedger> replay_trace(const LllInstance& inst,
                                                     const FixTrace& trace) {
  PartialAssignment pa(static_cast<int>(inst.variables.size()));
  PhiLedger ledger(inst.dep);
  for (const TraceStep& step : trace.steps) {
    require(step.var >= 0 && step.var < pa.var_count(), ErrorKind::Internal,
            "trace step names an unknown variable");
    require(
        step.value >= 0 &&
            step.value <
                static_cast<int>(inst.variables[step.var].domain.size()),
        ErrorKind::Internal, "trace step value outside the domain");
    for (const LedgerWrite& w : step.writes) {
      require(ledger.get(w.edge, w.node) == w.before, ErrorKind::Internal,
              "trace write disagrees with the reconstructed ledger");
      ledger.set(w.edge, w.node, w.after);
    }
    pa.assign(step.var, step.value);
  }
  return {std::move(pa), std::move(ledger)};
}

bool operator==(const FixTrace& a, const FixTrace& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    const TraceStep& x = a.steps[i];
    const TraceStep& y = b.steps[i];
    if (x.var != y.var || x.value != y.value || x.inc != y.inc ||
        x.pstar_checked != y.pstar_checked) {
      return false;
    }
    if (x.writes.size() != y.writes.size()) return false;
    for (std::size_t k = 0; k < x.writes.size(); ++k) {
      const LedgerWrite& p = x.writes[k];
      const LedgerWrite& q = y.writes[k];
      if (p.edge != q.edge || p.node != q.node || p.before != q.before ||
          p.after != q.after) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace lll
