#include <algorithm>
#include <set>

#include "doctest.h"
#include "lll/errors.hpp"
#include "lll/fixer.hpp"
#include "lll/generators.hpp"
#include "lll/instance.hpp"

using namespace lll;

namespace {

VariableSpec coin(const std::string& id) {
  return {id, {"h", "t"}, {"1/2", "1/2"}};
}

LllInstance triangle() {
  return build(
      {coin("cAB"), coin("cBC"), coin("cCA"), coin("pA"), coin("pB"), coin("pC")},
      {{"A", {"cAB", "cCA", "pA"}, {{"h", "h", "h"}}},
       {"B", {"cAB", "cBC", "pB"}, {{"h", "h", "h"}}},
       {"C", {"cBC", "cCA", "pC"}, {{"h", "h", "h"}}}},
      3);
}

// Two events in opposition on a shared coin, each softened by a private coin
// so the pair meets the criterion: u occurs on (X=h, A=h), v on (X=t, B=h).
LllInstance opposed_pair() {
  return build({coin("X"), coin("A"), coin("B")},
               {{"u", {"X", "A"}, {{"h", "h"}}}, {"v", {"X", "B"}, {{"t", "h"}}}},
               3);
}

bool avoids_all(const LllInstance& inst, const PartialAssignment& pa) {
  std::vector<int> values(inst.variables.size());
  for (std::size_t x = 0; x < inst.variables.size(); ++x) {
    values[x] = pa.value(static_cast<int>(x));
  }
  for (std::size_t t = 0; t < inst.events.size(); ++t) {
    if (event_occurs_on(inst, static_cast<int>(t), values)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("ledger basics: all-ones start, range guards, edge sums") {
  LllInstance inst = triangle();
  PhiLedger ledger(inst.dep);
  REQUIRE(inst.dep.edges.size() == 3);
  for (std::size_t e = 0; e < inst.dep.edges.size(); ++e) {
    auto [u, v] = inst.dep.edges[e];
    CHECK(ledger.get(static_cast<int>(e), u) == Rat(1));
    CHECK(ledger.get(static_cast<int>(e), v) == Rat(1));
  }
  CHECK(ledger.node_product(0) == Rat(1));
  CHECK_FALSE(ledger.subproperty_violation().has_value());

  auto [u0, v0] = inst.dep.edges[0];
  ledger.set(0, u0, Rat(2));
  ledger.set(0, v0, Rat(1));
  CHECK(ledger.subproperty_violation().has_value());  // 2 + 1 > 2
  ledger.set(0, v0, Rat(0));
  CHECK_FALSE(ledger.subproperty_violation().has_value());
  CHECK(ledger.node_product(u0) == Rat(2));
  CHECK_THROWS_AS(ledger.set(0, u0, Rat(5, 2)), Error);
  CHECK_THROWS_AS(ledger.set(0, u0, Rat(-1, 2)), Error);
}

TEST_CASE("opposed pair: the pinned rank-2 step") {
  LllInstance inst = opposed_pair();
  FixSession s(inst);
  int x = inst.var_index("X");
  int u = inst.event_index("u");
  int v = inst.event_index("v");
  int e = inst.dep.edge_index(u, v);
  REQUIRE(e >= 0);

  // Both values weigh in at exactly 2 (Inc pairs are (2,0) and (0,2)),
  // so the tie goes to the first domain value.
  int chosen = s.fix_r2(x);
  CHECK(chosen == 0);  // "h"
  CHECK(s.ledger().get(e, u) == Rat(2));
  CHECK(s.ledger().get(e, v) == Rat(0));
  REQUIRE(s.trace().steps.size() == 1);
  const TraceStep& step = s.trace().steps[0];
  CHECK(step.inc ==
        std::vector<std::pair<int, Rat>>{{u, Rat(2)}, {v, Rat(0)}});
  REQUIRE(step.writes.size() == 2);
  CHECK(step.writes[0].before == Rat(1));
  CHECK(step.writes[0].after == Rat(2));
  CHECK(step.writes[1].after == Rat(0));
  REQUIRE(s.max_r2_weighted_sum().has_value());
  CHECK(*s.max_r2_weighted_sum() == Rat(2));

  // Finishing the run still avoids both events.
  s.fix_step(inst.var_index("A"));
  s.fix_step(inst.var_index("B"));
  s.final_checks();
  CHECK(avoids_all(inst, s.partial()));
}

TEST_CASE("a variable the tables ignore leaves the ledger untouched") {
  // Z sits in both events' scopes but neither table reads it: Inc is 1
  // everywhere, so the write is phi * 1 on both sides.
  LllInstance inst = build(
      {coin("X"), coin("Z"), coin("A"), coin("B")},
      {{"u", {"X", "Z", "A"}, {{"h", "h", "h"}, {"h", "t", "h"}}},
       {"v", {"X", "Z", "B"}, {{"t", "h", "h"}, {"t", "t", "h"}}}},
      3);
  FixSession s(inst);
  PhiLedger before = s.ledger();
  s.fix_step(inst.var_index("Z"));
  CHECK(s.ledger() == before);
  const TraceStep& step = s.trace().steps[0];
  for (const auto& [event, inc] : step.inc) CHECK(inc == Rat(1));
  for (const LedgerWrite& w : step.writes) CHECK(w.before == w.after);
}

TEST_CASE("weighted rank-2 rule respects preset ledger weights") {
  LllInstance inst = opposed_pair();
  FixSession s(inst);
  int u = inst.event_index("u");
  int v = inst.event_index("v");
  int e = inst.dep.edge_index(u, v);

  // Kill v first (its private coin to tails), then tilt the edge weights.
  int b = inst.var_index("B");
  int chosen_b = s.fix_step(b);
  CHECK(chosen_b == 1);  // rank-1 rule picks the value zeroing v
  const_cast<PhiLedger&>(s.ledger()).set(e, u, Rat(3, 2));
  const_cast<PhiLedger&>(s.ledger()).set(e, v, Rat(1, 2));

  int chosen = s.fix_r2(inst.var_index("X"));
  // y=h: 3/2 * 2 + 1/2 * 0 = 3;  y=t: 3/2 * 0 + 1/2 * 0 = 0 -> pick t.
  CHECK(chosen == 1);
  CHECK(s.ledger().get(e, u) == Rat(0));
  CHECK(s.ledger().get(e, v) == Rat(0));
}

TEST_CASE("virtual hyperedge padding by rank") {
  LllInstance tri = triangle();
  LiftedHyperedge l2 = embed_rank_lift(tri, tri.var_index("cAB"));
  CHECK(l2.real_count == 2);
  CHECK(l2.nodes[0] == tri.event_index("A"));
  CHECK(l2.nodes[1] == tri.event_index("B"));
  CHECK(l2.nodes[2] == kVirtualNode);

  LiftedHyperedge l1 = embed_rank_lift(tri, tri.var_index("pA"));
  CHECK(l1.real_count == 1);
  CHECK(l1.nodes[0] == tri.event_index("A"));
  CHECK(l1.nodes[1] == kVirtualNode);
  CHECK(l1.nodes[2] == kVirtualNode);

  LllInstance r3 = gen_random_rank3(9, 3, 2, 4);
  for (std::size_t x = 0; x < r3.variables.size(); ++x) {
    if (r3.var_rank(static_cast<int>(x)) != 3) continue;
    LiftedHyperedge l3 = embed_rank_lift(r3, static_cast<int>(x));
    CHECK(l3.real_count == 3);
    CHECK(l3.nodes[2] != kVirtualNode);
    break;
  }
}

TEST_CASE("evil values: scaling past the region boundary") {
  // A fair coin watching one isolated event {X=h}; the two virtual slots
  // scale by 1. With triple (3,1,0): heads doubles a to 6 (outside), tails
  // zeroes it (inside).
  LllInstance inst = build({coin("X")}, {{"E", {"X"}, {{"h"}}}}, 3);
  ProbEngine prob(inst);
  PartialAssignment pa(1);
  Triple t{Rat(3), Rat(1), Rat(0)};
  std::vector<int> evil = find_evil_values(inst, prob, 0, pa, t);
  CHECK(evil == std::vector<int>{0});

  // (1,1,0) scales to (2,1,0) / (0,1,0): nothing is evil.
  CHECK(find_evil_values(inst, prob, 0, pa, Triple{Rat(1), Rat(1), Rat(0)})
            .empty());

  CHECK_THROWS_AS(
      find_evil_values(inst, prob, 0, pa, Triple{Rat(5), Rat(1), Rat(1)}),
      Error);
}

TEST_CASE("never are all values evil on valid instances") {
  for (std::uint64_t seed : {3u, 14u, 25u}) {
    LllInstance inst = gen_random_rank3(12, 3, 3, seed);
    ProbEngine prob(inst);
    PartialAssignment pa(static_cast<int>(inst.variables.size()));
    Triple ones{Rat(1), Rat(1), Rat(1)};
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      std::vector<int> evil =
          find_evil_values(inst, prob, static_cast<int>(x), pa, ones);
      CHECK(evil.size() < inst.variables[x].domain.size());
    }
  }
}

TEST_CASE("fixing a shared triangle coin to tails zeroes its edge") {
  LllInstance inst = triangle();
  FixSession s(inst);
  int cab = inst.var_index("cAB");
  int chosen = s.fix_step(cab);
  CHECK(chosen == 1);  // tails kills both A and B
  int a = inst.event_index("A");
  int b = inst.event_index("B");
  int e = inst.dep.edge_index(a, b);
  CHECK(s.ledger().get(e, a) == Rat(0));
  CHECK(s.ledger().get(e, b) == Rat(0));

  // Only the edge of the fixed variable was touched.
  for (const LedgerWrite& w : s.trace().steps[0].writes) CHECK(w.edge == e);
}

TEST_CASE("full runs avoid every event under all order policies") {
  LllInstance tri = triangle();
  for (OrderPolicy p : {OrderPolicy::declaration, OrderPolicy::reverse,
                        OrderPolicy::seeded_shuffle,
                        OrderPolicy::adaptive_adversary}) {
    RunResult res = run_sequential(tri, p, 17);
    CHECK(res.assignment.complete());
    CHECK(avoids_all(tri, res.assignment));
    CHECK(res.pstar_checks > 0);
    CHECK(res.identity_checks > 0);
  }

  // Every one of the 720 fixed orders of the triangle's six variables works.
  std::vector<int> order = {0, 1, 2, 3, 4, 5};
  int runs = 0;
  do {
    RunResult res = run_sequential(tri, order);
    CHECK(avoids_all(tri, res.assignment));
    ++runs;
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(runs == 720);
}

TEST_CASE("an empty instance fixes nothing and succeeds") {
  LllInstance inst = build({}, {}, 3);
  RunResult res = run_sequential(inst, OrderPolicy::declaration, 0);
  CHECK(res.assignment.complete());
  CHECK(res.trace.steps.empty());
}

TEST_CASE("ledger writes stay local to the fixed variable's edges") {
  LllInstance inst = gen_random_rank3(16, 4, 3, 77);
  RunResult res = run_sequential(inst, OrderPolicy::seeded_shuffle, 9);
  CHECK(avoids_all(inst, res.assignment));
  for (const TraceStep& step : res.trace.steps) {
    const auto& evs = inst.hyper.events_of_var[step.var];
    std::set<int> allowed;
    for (std::size_t i = 0; i < evs.size(); ++i) {
      for (std::size_t j = i + 1; j < evs.size(); ++j) {
        allowed.insert(inst.dep.edge_index(evs[i], evs[j]));
      }
    }
    for (const LedgerWrite& w : step.writes) {
      CHECK(allowed.count(w.edge) == 1);
    }
  }
}

TEST_CASE("traces replay to the exact final state") {
  LllInstance inst = gen_random_rank3(14, 3, 3, 55);
  RunResult res = run_sequential(inst, OrderPolicy::reverse, 0);
  auto [pa, ledger] = replay_trace(inst, res.trace);
  CHECK(pa == res.assignment);
  CHECK(ledger == res.ledger);

  // Tampering with a recorded before-value must be caught.
  FixTrace bad = res.trace;
  for (TraceStep& step : bad.steps) {
    if (!step.writes.empty()) {
      step.writes[0].before += Rat(1, 7);
      break;
    }
  }
  CHECK_THROWS_AS(replay_trace(inst, bad), Error);
}

TEST_CASE("a corrupted ledger is rejected before any fixing") {
  LllInstance inst = triangle();
  FixSession s(inst);
  int a = inst.event_index("A");
  int b = inst.event_index("B");
  int e = inst.dep.edge_index(a, b);
  // Claiming phi = 1/100 pretends A's budget is 1/800 < its prob 1/8.
  const_cast<PhiLedger&>(s.ledger()).set(e, a, Rat(1, 100));
  ProbEngine prob(inst);
  auto violation =
      pstar_violation(inst, prob, s.ledger(), PartialAssignment(6));
  REQUIRE(violation.has_value());
  CHECK(violation->find("A") != std::string::npos);
  try {
    s.fix_step(inst.var_index("pC"));
    CHECK(false);
  } catch (const Error& err) {
    CHECK(exit_code_for(err.kind()) == 3);  // internal sentinel family
  }
}

TEST_CASE("explicit orders must be permutations") {
  LllInstance inst = opposed_pair();
  CHECK_THROWS_AS(run_sequential(inst, std::vector<int>{0, 1, 1}), Error);
  CHECK_THROWS_AS(run_sequential(inst, std::vector<int>{0, 1}), Error);
  CHECK_NOTHROW(run_sequential(inst, std::vector<int>{2, 0, 1}));
}

TEST_CASE("order policies: construction and naming") {
  LllInstance inst = triangle();
  std::vector<int> decl = make_order(inst, OrderPolicy::declaration, 0);
  CHECK(decl == std::vector<int>{0, 1, 2, 3, 4, 5});
  std::vector<int> rev = make_order(inst, OrderPolicy::reverse, 0);
  CHECK(rev == std::vector<int>{5, 4, 3, 2, 1, 0});
  CHECK(make_order(inst, OrderPolicy::seeded_shuffle, 4) ==
        make_order(inst, OrderPolicy::seeded_shuffle, 4));
  CHECK_THROWS_AS(make_order(inst, OrderPolicy::adaptive_adversary, 0), Error);

  CHECK(order_policy_from("seeded-shuffle") == OrderPolicy::seeded_shuffle);
  CHECK(order_policy_from("adaptive-adversary") ==
        OrderPolicy::adaptive_adversary);
  CHECK_FALSE(order_policy_from("alphabetical").has_value());
  CHECK(std::string(to_string(OrderPolicy::reverse)) == "reverse");
}

TEST_CASE("rank-2 engine and general engine agree on pure rank-2 instances") {
  for (std::uint64_t seed : {2u, 8u}) {
    LllInstance inst = gen_random_rank2(10, 4, 3, seed);
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      REQUIRE(inst.var_rank(static_cast<int>(x)) == 2);
    }

    FixSession general(inst);
    FixSession explicit_r2(inst);
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      int a = general.fix_step(static_cast<int>(x));
      int b = explicit_r2.fix_r2(static_cast<int>(x));
      CHECK(a == b);
    }
    general.final_checks();
    explicit_r2.final_checks();
    CHECK(general.trace() == explicit_r2.trace());
    CHECK(general.ledger() == explicit_r2.ledger());
    CHECK(general.partial() == explicit_r2.partial());
    REQUIRE(general.max_r2_weighted_sum().has_value());
    CHECK(*general.max_r2_weighted_sum() <= 2);
  }
}

TEST_CASE("wrong-rank calls are refused") {
  LllInstance tri = triangle();
  FixSession s(tri);
  CHECK_THROWS_AS(s.fix_r2(tri.var_index("pA")), Error);   // rank 1
  CHECK_THROWS_AS(s.fix_r3(tri.var_index("cAB")), Error);  // rank 2
  s.fix_step(tri.var_index("pA"));
  CHECK_THROWS_AS(s.fix_step(tri.var_index("pA")), Error);  // already fixed
}

TEST_CASE("sampled checking still certifies the run") {
  LllInstance inst = gen_random_rank3(18, 4, 3, 101);
  FixOptions sampled;
  sampled.check = CheckLevel::sampled;
  RunResult a = run_sequential(inst, OrderPolicy::declaration, 0, sampled);
  RunResult b = run_sequential(inst, OrderPolicy::declaration, 0);
  CHECK(avoids_all(inst, a.assignment));
  // The check schedule cannot change what gets fixed.
  CHECK(a.assignment == b.assignment);
  CHECK(a.ledger == b.ledger);
}

TEST_CASE("disabling dyadic rounding keeps runs avoiding but grows entries") {
  LllInstance inst = gen_random_rank3(15, 3, 4, 202);
  FixOptions exact;
  exact.simplify_ledger = false;
  RunResult res = run_sequential(inst, OrderPolicy::declaration, 0, exact);
  CHECK(avoids_all(inst, res.assignment));
}
