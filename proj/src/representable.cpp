#include "lll/representable.hpp"

#include <cmath>
#include <ostream>

#include "lll/errors.hpp"
#include "lll/rng.hpp"

namespace lll {

namespace {

void check_nonneg(const Triple& t) {
  require(sgn(t.a) >= 0 && sgn(t.b) >= 0 && sgn(t.c) >= 0,
          ErrorKind::DomainError, "triple components must be nonnegative");
}

// Discriminant D = ab(4-a)(4-b) of the membership quadratic.
Rat discriminant(const Rat& a, const Rat& b) {
  return a * b * (4 - a) * (4 - b);
}

// Along the witness family a1 = x, b1 = 2 - x (per-edge sums exactly 2),
// the largest achievable c product is
//   c(x) = (2 - a/x)(2 - b/(2-x)),  x in [a/2, 2 - b/2],
// which vanishes at both endpoints and peaks at f(a, b) in between.
Rat curve_c(const Rat& a, const Rat& b, const Rat& x) {
  return (2 - a / x) * (2 - b / (2 - x));
}

// Stable floating form f = ((sqrt((4-a)(4-b)) - sqrt(ab)) / 2)^2.
long double f_ld(long double a, long double b) {
  long double d =
      (std::sqrt((4 - a) * (4 - b)) - std::sqrt(a * b)) / 2.0L;
  return d * d;
}

}  // namespace

double f_value(const Rat& a, const Rat& b) {
  require(sgn(a) >= 0 && sgn(b) >= 0, ErrorKind::DomainError,
          "f_value needs nonnegative arguments");
  if (a + b > 4) {
    fail(ErrorKind::DomainError,
         "f_value is defined on a + b <= 4, got a=" + rat_str(a) +
             " b=" + rat_str(b),
         {{"a", rat_str(a)}, {"b", rat_str(b)}});
  }
  return static_cast<double>(f_ld(static_cast<long double>(to_double(a)),
                                  static_cast<long double>(to_double(b))));
}

Rat representable_slack(const Triple& t) {
  return 8 + t.a * t.b - 2 * t.a - 2 * t.b - 2 * t.c;
}

bool is_representable(const Triple& t) {
  check_nonneg(t);
  // c <= f(a,b) on the triangle a + b <= 4, rationalized: with
  // R = 8 + ab - 2a - 2b - 2c >= 0, squaring c <= f gives R^2 >= D.
  if (t.a + t.b > 4) return false;
  Rat R = representable_slack(t);
  if (sgn(R) < 0) return false;
  return R * R >= discriminant(t.a, t.b);
}

namespace {

// Split slots for a chosen interior x, with the c pair rescaled so products
// are exact: c2 * c3 == c.
EdgeSplit split_at(const Rat& a, const Rat& b, const Rat& c, const Rat& x) {
  EdgeSplit s;
  s.a1 = x;
  s.a2 = a / x;
  s.b1 = 2 - x;
  s.b3 = b / (2 - x);
  Rat c3_raw = 2 - s.b3;
  require(sgn(c3_raw) > 0, ErrorKind::Internal,
          "split point degenerated to the boundary");
  s.c2 = c / c3_raw;
  s.c3 = c3_raw;
  return s;
}

void check_split(const Triple& t, const EdgeSplit& s) {
  auto in_range = [](const Rat& v) { return sgn(v) >= 0 && v <= 2; };
  require(in_range(s.a1) && in_range(s.a2) && in_range(s.b1) &&
              in_range(s.b3) && in_range(s.c2) && in_range(s.c3),
          ErrorKind::Internal, "split slot out of [0, 2]");
  require(s.a1 + s.b1 <= 2 && s.a2 + s.c2 <= 2 && s.b3 + s.c3 <= 2,
          ErrorKind::Internal, "split edge sum exceeds 2");
  require(s.a1 * s.a2 == t.a && s.b1 * s.b3 == t.b && s.c2 * s.c3 == t.c,
          ErrorKind::Internal, "split products do not match the triple");
}

}  // namespace

EdgeSplit decompose(const Triple& t) {
  check_nonneg(t);
  if (!is_representable(t)) {
    fail(ErrorKind::NotRepresentable,
         "triple (" + rat_str(t.a) + ", " + rat_str(t.b) + ", " + rat_str(t.c) +
             ") is not representable",
         {{"a", rat_str(t.a)}, {"b", rat_str(t.b)}, {"c", rat_str(t.c)}});
  }
  const Rat &a = t.a, &b = t.b, &c = t.c;

  EdgeSplit s;
  if (sgn(a) == 0 && sgn(b) == 0) {
    s = {Rat(0), Rat(0), Rat(0), Rat(0), Rat(2), c / 2};
  } else if (sgn(a) == 0) {
    s = {Rat(0), Rat(0), Rat(2), b / 2, Rat(2), c / 2};
  } else if (sgn(b) == 0) {
    s = {Rat(2), a / 2, Rat(0), Rat(0), c / 2, Rat(2)};
  } else if (sgn(c) == 0) {
    // Any feasible x works; take the left endpoint, where the a pair is
    // tight and the c pair collapses to zero.
    s.a1 = a / 2;
    s.a2 = 2;
    s.b1 = 2 - a / 2;
    s.b3 = b / (2 - a / 2);
    s.c2 = 0;
    s.c3 = 2 - s.b3;
  } else {
    // a, b, c > 0, hence a + b < 4 strictly and the feasible interval
    // (a/2, 2 - b/2) is open and nonempty.
    const Rat lo = a / 2;
    const Rat hi = 2 - b / 2;
    std::optional<Rat> found;

    if (a == b) {
      // Symmetric curve; its peak sits at x = 1.
      found = Rat(1);
    }

    if (!found) {
      // Cheap pass: a coarse grid scanned middle-out (peaks live inside).
      constexpr int kGrid = 32;
      for (int step = 0; step < kGrid - 1 && !found; ++step) {
        int k = (step % 2 == 0) ? kGrid / 2 + step / 2 : kGrid / 2 - (step + 1) / 2;
        if (k <= 0 || k >= kGrid) continue;
        Rat x = lo + (hi - lo) * k / kGrid;
        if (curve_c(a, b, x) >= c) found = x;
      }
    }

    if (!found) {
      // A rational target can sit exactly on the boundary c = f(a, b) only
      // when sqrt(D) is rational; then the peak itself is rational and we
      // jump to it directly.
      if (auto sqrt_d = rat_sqrt_exact(discriminant(a, b))) {
        Rat peak = (a * (4 - b) - *sqrt_d) / (2 * (a - b));
        require(lo < peak && peak < hi, ErrorKind::Internal,
                "curve peak left the feasible interval");
        found = peak;
      }
    }

    if (!found) {
      // Strictly interior target (c < f) with an irrational peak: ternary
      // search; the success set has positive width, so this terminates.
      Rat l = lo, h = hi;
      for (int iter = 0; iter < 10000 && !found; ++iter) {
        Rat m1 = l + (h - l) / 3;
        Rat m2 = h - (h - l) / 3;
        Rat c1 = curve_c(a, b, m1);
        if (c1 >= c) {
          found = m1;
          break;
        }
        Rat c2v = curve_c(a, b, m2);
        if (c2v >= c) {
          found = m2;
          break;
        }
        if (c1 < c2v) {
          l = m1;
        } else {
          h = m2;
        }
      }
      require(found.has_value(), ErrorKind::Internal,
              "split search exhausted on a representable triple");
    }

    s = split_at(a, b, c, *found);
  }

  check_split(t, s);
  return s;
}

bool brute_force_representable(const Triple& t, int grid_n) {
  check_nonneg(t);
  require(grid_n >= 2, ErrorKind::DomainError,
          "brute force oracle needs at least 2 grid points");
  const Rat &a = t.a, &b = t.b, &c = t.c;
  if (a + b > 4) return false;

  const Rat lo = a / 2;
  const Rat hi = 2 - b / 2;
  for (int step = 0; step < grid_n; ++step) {
    // Middle-out scan order: witnesses cluster around the curve peak.
    int k = (step % 2 == 0) ? grid_n / 2 + step / 2
                            : grid_n / 2 - (step + 1) / 2;
    if (k < 0 || k >= grid_n) continue;
    Rat x = lo + (hi - lo) * k / (grid_n - 1);
    // Candidate witness split at x; every slot constraint checked directly.
    Rat a2 = sgn(a) == 0 ? Rat(0) : Rat(a / x);
    Rat b3 = sgn(b) == 0 ? Rat(0) : Rat(b / (2 - x));
    if (a2 > 2 || b3 > 2) continue;
    if (c <= (2 - a2) * (2 - b3)) return true;
  }
  return false;
}

CertReport convexity_certificate(int grid_n, double tol) {
  require(grid_n >= 2, ErrorKind::DomainError,
          "certificate grid must have at least 2 points per axis");
  require(tol > 0, ErrorKind::DomainError, "tolerance must be positive");

  CertReport report;
  report.grid_n = grid_n;
  report.tol = tol;

  auto rel_err = [](long double x, long double y) {
    long double scale = std::max(std::fabs(x), 1e-300L);
    return static_cast<double>(std::fabs(x - y) / scale);
  };

  for (int i = 1; i <= grid_n; ++i) {
    for (int j = 1; j <= grid_n; ++j) {
      if (i + j > grid_n) continue;  // keep a + b < 4 strictly
      long double a = 4.0L * i / (grid_n + 1);
      long double b = 4.0L * j / (grid_n + 1);
      ++report.points_checked;

      long double sd = std::sqrt(a * b * (4 - a) * (4 - b));
      long double faa = (2.0L / (a * (4 - a))) *
                        std::sqrt((b * (4 - b)) / (a * (4 - a)));
      long double fbb = (2.0L / (b * (4 - b))) *
                        std::sqrt((a * (4 - a)) / (b * (4 - b)));
      long double fab = 0.5L - ((2 - a) * (2 - b)) / (2 * sd);
      long double det = faa * fbb - fab * fab;

      auto push = [&](const char* what, double cf, double est) {
        report.failures.push_back(
            {static_cast<double>(a), static_cast<double>(b), what, cf, est});
      };

      if (!(faa > 0)) push("f_aa positivity", static_cast<double>(faa), 0);
      if (!(det > 0)) push("det positivity", static_cast<double>(det), 0);

      // Same determinant through the boundary surface value; guards the
      // closed forms against transcription slips.
      long double f0 = f_ld(a, b);
      long double det_alt =
          (16 - (2 * f0 - 4) * (2 * f0 - 4)) / (4 * a * b * (4 - a) * (4 - b));
      if (rel_err(det, det_alt) > 1e-9) {
        push("det closed-form identity", static_cast<double>(det),
             static_cast<double>(det_alt));
      }

      // Central finite differences with one Richardson refinement.
      long double h = std::min(1e-3L, std::min(std::min(a, 4 - a),
                                               std::min(b, 4 - b)) / 8);
      auto faa_fd = [&](long double hh) {
        return (f_ld(a - hh, b) - 2 * f0 + f_ld(a + hh, b)) / (hh * hh);
      };
      auto fbb_fd = [&](long double hh) {
        return (f_ld(a, b - hh) - 2 * f0 + f_ld(a, b + hh)) / (hh * hh);
      };
      auto fab_fd = [&](long double hh) {
        return (f_ld(a + hh, b + hh) - f_ld(a + hh, b - hh) -
                f_ld(a - hh, b + hh) + f_ld(a - hh, b - hh)) /
               (4 * hh * hh);
      };
      auto richardson = [&](auto&& fd) {
        return (4 * fd(h / 2) - fd(h)) / 3;
      };
      long double faa_est = richardson(faa_fd);
      long double fbb_est = richardson(fbb_fd);
      long double fab_est = richardson(fab_fd);
      long double det_est = faa_est * fbb_est - fab_est * fab_est;

      if (rel_err(faa, faa_est) > tol) {
        push("f_aa finite difference", static_cast<double>(faa),
             static_cast<double>(faa_est));
      }
      if (rel_err(fbb, fbb_est) > tol) {
        push("f_bb finite difference", static_cast<double>(fbb),
             static_cast<double>(fbb_est));
      }
      if (rel_err(det, det_est) > tol) {
        push("det finite difference", static_cast<double>(det),
             static_cast<double>(det_est));
      }
    }
  }
  return report;
}

IncurvedReport incurvedness_spotcheck(int samples, std::uint64_t seed) {
  require(samples >= 1, ErrorKind::DomainError, "need at least one sample");

  IncurvedReport report;
  report.samples = samples;
  report.q_points = 100;

  Rng rng(seed);
  auto draw_nonmember = [&] {
    for (;;) {
      // Dyadic coordinates in [0, 4] at resolution 1/256.
      Triple t{Rat(static_cast<long>(rng.below(1025))) / 256,
               Rat(static_cast<long>(rng.below(1025))) / 256,
               Rat(static_cast<long>(rng.below(1025))) / 256};
      if (!is_representable(t)) return t;
    }
  };

  for (int n = 0; n < samples; ++n) {
    Triple s = draw_nonmember();
    Triple s2 = draw_nonmember();
    for (int k = 0; k < report.q_points; ++k) {
      Rat q = Rat(k) / (report.q_points - 1);
      Triple mix{q * s.a + (1 - q) * s2.a, q * s.b + (1 - q) * s2.b,
                 q * s.c + (1 - q) * s2.c};
      if (is_representable(mix)) {
        report.violations.push_back({s, s2, q});
      }
    }
  }
  return report;
}

void write_surface_mesh(std::ostream& out, const Rat& step) {
  require(sgn(step) > 0, ErrorKind::DomainError, "mesh step must be positive");
  out << "a,b,f\n";
  char buf[64];
  for (Rat a(0); a <= 4; a += step) {
    for (Rat b(0); a + b <= 4; b += step) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", to_double(a),
                    to_double(b), f_value(a, b));
      out << buf;
    }
  }
}

}  // namespace lll
