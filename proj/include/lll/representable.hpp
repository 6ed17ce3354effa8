// The representable region of weight triples.
//
// A triple (a, b, c) >= 0 is representable when a hyperedge {u, v, w} can be
// split into three pairwise edge weights phi with per-edge sums at most 2
// and per-node products a, b, c. Membership has a closed form: writing
//   R = 8 + ab - 2a - 2b - 2c,   D = ab(4-a)(4-b),
// the triple is in the region iff a + b <= 4, R >= 0 and R^2 >= D — an exact
// rational predicate. The boundary surface is
//   c = f(a, b) = ((sqrt((4-a)(4-b)) - sqrt(ab)) / 2)^2,
// which is convex on the open triangle {a, b > 0, a + b < 4}.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lll/rational.hpp"

namespace lll {

struct Triple {
  Rat a, b, c;
};

// Pairwise weights of a split hyperedge {u, v, w} over edges e = {u,v},
// e' = {u,w}, e'' = {v,w}: a = a1*a2, b = b1*b3, c = c2*c3 with
// a1 + b1 <= 2, a2 + c2 <= 2, b3 + c3 <= 2, all entries in [0, 2].
struct EdgeSplit {
  Rat a1, a2;  // node u's sides of e and e'
  Rat b1, b3;  // node v's sides of e and e''
  Rat c2, c3;  // node w's sides of e' and e''
};

// Boundary surface height. Domain: a, b >= 0 and a + b <= 4 (DomainError
// outside). Exact at rational boundary cases up to double rounding.
double f_value(const Rat& a, const Rat& b);

// Exact membership test. Requires componentwise nonnegative input
// (DomainError otherwise).
bool is_representable(const Triple& t);

// Exact slack R = 8 + ab - 2a - 2b - 2c of the quadratic membership form;
// used for deterministic tie-breaking among admissible values.
Rat representable_slack(const Triple& t);

// Constructs an exact witness split for a representable triple
// (NotRepresentable otherwise). All six entries are exact rationals and the
// products match a, b, c exactly.
EdgeSplit decompose(const Triple& t);

// Independent search-based membership oracle: scans grid_n candidate splits
// across the feasible interval and reports whether any witnesses the triple.
// One-sided: a "true" is always sound; a "false" near the boundary may be a
// resolution miss. grid_n >= 2.
bool brute_force_representable(const Triple& t, int grid_n);

struct CertFailure {
  double a = 0, b = 0;
  std::string what;          // which quantity disagreed or lost positivity
  double closed_form = 0;    // analytic value
  double estimate = 0;       // finite-difference value
};

struct CertReport {
  int grid_n = 0;
  double tol = 0;
  int points_checked = 0;
  std::vector<CertFailure> failures;
  bool passed() const { return failures.empty(); }
};

// Convexity certificate for f on the open triangle: at every interior grid
// point (a, b) = (4i/(n+1), 4j/(n+1)) with a + b < 4, the closed-form Hessian
// minors f_aa and det H are positive and match central finite-difference
// estimates within the relative tolerance.
CertReport convexity_certificate(int grid_n, double tol);

struct IncurvedViolation {
  Triple s, s_prime;
  Rat q;
};

struct IncurvedReport {
  int samples = 0;
  int q_points = 0;
  std::vector<IncurvedViolation> violations;
  bool passed() const { return violations.empty(); }
};

// The complement of the region is convex along segments: every convex
// combination q*s + (1-q)*s' of two non-members stays outside. Samples
// non-member pairs (rational, rejection-sampled) and sweeps q over a
// 100-point grid of [0, 1]; exact membership at every probe.
IncurvedReport incurvedness_spotcheck(int samples, std::uint64_t seed);

// CSV mesh "a,b,f" over the domain triangle with the given step > 0.
void write_surface_mesh(std::ostream& out, const Rat& step);

}  // namespace lll
