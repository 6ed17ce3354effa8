#include "doctest.h"
#include "lll/errors.hpp"
#include "lll/generators.hpp"
#include "lll/instance.hpp"
#include "lll/prob_engine.hpp"
#include "lll/rng.hpp"

using namespace lll;

namespace {

LllInstance coin_event() {
  return build({{"X", {"h", "t"}, {"1/2", "1/2"}}}, {{"E", {"X"}, {{"h"}}}}, 3);
}

// Triangle of events on shared fair coins, each with a private coin.
LllInstance triangle() {
  VariableSpec c{"", {"h", "t"}, {"1/2", "1/2"}};
  auto coin = [&](const std::string& id) {
    VariableSpec v = c;
    v.id = id;
    return v;
  };
  return build(
      {coin("cAB"), coin("cBC"), coin("cCA"), coin("pA"), coin("pB"), coin("pC")},
      {{"A", {"cAB", "cCA", "pA"}, {{"h", "h", "h"}}},
       {"B", {"cAB", "cBC", "pB"}, {{"h", "h", "h"}}},
       {"C", {"cBC", "cCA", "pC"}, {{"h", "h", "h"}}}},
      3);
}

}  // namespace

TEST_CASE("conditional probabilities under partial assignments") {
  LllInstance inst = coin_event();
  ProbEngine prob(inst);

  PartialAssignment empty(1);
  CHECK(prob.cond_prob(0, empty) == Rat(1, 2));

  PartialAssignment tails(1);
  tails.assign(0, 1);
  CHECK(prob.cond_prob(0, tails) == Rat(0));

  PartialAssignment heads(1);
  heads.assign(0, 0);
  CHECK(prob.cond_prob(0, heads) == Rat(1));
}

TEST_CASE("fixing one triangle coin reweights only the events that watch it") {
  LllInstance inst = triangle();
  ProbEngine prob(inst);
  int n = static_cast<int>(inst.variables.size());

  PartialAssignment pa(n);
  pa.assign(inst.var_index("cAB"), 0);  // heads
  CHECK(prob.cond_prob(inst.event_index("A"), pa) == Rat(1, 4));
  CHECK(prob.cond_prob(inst.event_index("B"), pa) == Rat(1, 4));
  CHECK(prob.cond_prob(inst.event_index("C"), pa) == Rat(1, 8));

  pa.assign(inst.var_index("cCA"), 1);  // tails kills A and C
  CHECK(prob.cond_prob(inst.event_index("A"), pa) == Rat(0));
  CHECK(prob.cond_prob(inst.event_index("C"), pa) == Rat(0));
  CHECK(prob.cond_prob(inst.event_index("B"), pa) == Rat(1, 4));
}

TEST_CASE("increase ratios compare the conditioned and current probabilities") {
  LllInstance inst = coin_event();
  ProbEngine prob(inst);
  PartialAssignment empty(1);

  CHECK(prob.inc(0, empty, 0, 0) == Rat(2));  // 1 / (1/2)
  CHECK(prob.inc(0, empty, 0, 1) == Rat(0));

  // Asking about a variable the event does not watch is a caller bug.
  LllInstance tri = triangle();
  ProbEngine tp(tri);
  PartialAssignment pa(static_cast<int>(tri.variables.size()));
  try {
    tp.inc(tri.event_index("A"), pa, tri.var_index("cBC"), 0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VarDoesNotAffect);
  }
}

TEST_CASE("a dead event stays dead: ratios from zero are zero by convention") {
  LllInstance inst = triangle();
  ProbEngine prob(inst);
  int n = static_cast<int>(inst.variables.size());

  PartialAssignment pa(n);
  pa.assign(inst.var_index("cAB"), 1);  // tails: A impossible
  REQUIRE(prob.cond_prob(inst.event_index("A"), pa) == Rat(0));
  CHECK(prob.inc(inst.event_index("A"), pa, inst.var_index("pA"), 0) == Rat(0));
  CHECK(prob.inc(inst.event_index("A"), pa, inst.var_index("cCA"), 0) == Rat(0));
}

TEST_CASE("expectation identity and total probability on random instances") {
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    LllInstance inst = gen_random_rank3(14, 3, 3, seed);
    ProbEngine prob(inst);
    int n = static_cast<int>(inst.variables.size());
    Rng rng(seed * 77 + 1);

    PartialAssignment pa(n);
    // Walk a random completion order, checking the identities at each step.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }

    for (int var : order) {
      const Variable& v = inst.variables[var];
      for (int t : inst.hyper.events_of_var[var]) {
        Rat current = prob.cond_prob(t, pa);

        // Law of total probability over the next variable's values.
        Rat mixed(0);
        for (std::size_t y = 0; y < v.domain.size(); ++y) {
          PartialAssignment ext = pa;
          ext.assign(var, static_cast<int>(y));
          mixed += v.probs[y] * prob.cond_prob(t, ext);
        }
        CHECK(mixed == current);

        // Ratio form: the expectation of Inc is exactly 1 on live events.
        if (current > 0) {
          CHECK(prob.expectation_identity_check(t, pa, var));
          Rat esum(0);
          for (std::size_t y = 0; y < v.domain.size(); ++y) {
            esum += v.probs[y] * prob.inc(t, pa, var, static_cast<int>(y));
          }
          CHECK(esum == Rat(1));
        }
      }
      pa.assign(var, static_cast<int>(rng.below(v.domain.size())));
    }
    CHECK(pa.complete());
  }
}

TEST_CASE("partial assignments remember insertion order and refuse reuse") {
  PartialAssignment pa(3);
  CHECK(pa.var_count() == 3);
  CHECK_FALSE(pa.assigned(1));
  pa.assign(1, 0);
  pa.assign(0, 2);
  CHECK(pa.assigned_count() == 2);
  CHECK_FALSE(pa.complete());
  CHECK(pa.order() == std::vector<std::pair<int, int>>{{1, 0}, {0, 2}});
  CHECK(pa.value(2) == -1);
  CHECK_THROWS_AS(pa.assign(1, 1), Error);
  pa.assign(2, 1);
  CHECK(pa.complete());
}
