#pragma once

// Shortest nonzero vectors of Z^n under an arbitrary norm, and completion of
// a primitive vector to an SL(n, Z) basis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "systocap/errors.hpp"
#include "systocap/gauge.hpp"

namespace systocap {

using LatticeVector = std::vector<std::int64_t>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDefaultEnumerationCap = 1e9;

// ---------------------------------------------------------------------------
// Exact integer helpers

namespace detail {

inline std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in lattice arithmetic");
  return r;
}

inline std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in lattice arithmetic");
  return r;
}

/// Bezout data for (a, b): g = gcd >= 0 with x*a + y*b = g. When b != 0 the
/// coefficient x is normalized to the least non-negative residue mod |b|/g.
struct Bezout {
  std::int64_t g, x, y;
};

inline Bezout bezout(std::int64_t a, std::int64_t b) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  Bezout out{old_r, old_s, old_t};
  if (b != 0 && out.g != 0) {
    const std::int64_t m = std::abs(b / out.g);
    std::int64_t x = out.x % m;
    if (x < 0) x += m;
    out.x = x;
    out.y = (out.g - mul_checked(x, a)) / b;
  }
  return out;
}

/// Fraction-free (Bareiss) determinant in 128-bit arithmetic.
inline __int128 exact_determinant(const IntMatrix& m) {
  const long n = m.rows();
  if (n == 0) return 1;
  std::vector<__int128> a(static_cast<std::size_t>(n * n));
  auto at = [&](long i, long j) -> __int128& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) at(i, j) = m(i, j);
  __int128 sign = 1, prev = 1;
  for (long k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      long swap = -1;
      for (long i = k + 1; i < n; ++i)
        if (at(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      for (long j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
      sign = -sign;
    }
    for (long i = k + 1; i < n; ++i) {
      for (long j = k + 1; j < n; ++j) {
        __int128 lhs, rhs, diff;
        if (__builtin_mul_overflow(at(i, j), at(k, k), &lhs) ||
            __builtin_mul_overflow(at(i, k), at(k, j), &rhs) || __builtin_sub_overflow(lhs, rhs, &diff)) {
          throw std::overflow_error("determinant overflow");
        }
        at(i, j) = diff / prev;
      }
    }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

/// Inverse of a unimodular integer matrix by Euclidean row reduction of
/// [A | I]. Throws if A is not unimodular.
inline IntMatrix unimodular_inverse(const IntMatrix& a) {
  const long n = a.rows();
  IntMatrix m = a;
  IntMatrix inv = IntMatrix::Identity(n, n);
  auto combine = [&](long r0, long r1, std::int64_t c00, std::int64_t c01, std::int64_t c10,
                     std::int64_t c11) {
    for (IntMatrix* mat : {&m, &inv}) {
      for (long j = 0; j < n; ++j) {
        const std::int64_t u = (*mat)(r0, j), v = (*mat)(r1, j);
        (*mat)(r0, j) = add_checked(mul_checked(c00, u), mul_checked(c01, v));
        (*mat)(r1, j) = add_checked(mul_checked(c10, u), mul_checked(c11, v));
      }
    }
  };
  for (long c = 0; c < n; ++c) {
    for (long i = c + 1; i < n; ++i) {
      const std::int64_t p = m(c, c), q = m(i, c);
      if (q == 0) continue;
      const Bezout bz = bezout(p, q);
      combine(c, i, bz.x, bz.y, -q / bz.g, p / bz.g);
    }
    if (std::abs(m(c, c)) != 1) throw PreconditionError("matrix is not unimodular");
    if (m(c, c) == -1) {
      m.row(c) *= -1;
      inv.row(c) *= -1;
    }
  }
  for (long c = n - 1; c >= 0; --c) {
    for (long i = 0; i < c; ++i) {
      const std::int64_t f = m(i, c);
      if (f == 0) continue;
      for (IntMatrix* mat : {&m, &inv}) {
        for (long j = 0; j < n; ++j) {
          (*mat)(i, j) = add_checked((*mat)(i, j), -mul_checked(f, (*mat)(c, j)));
        }
      }
    }
  }
  return inv;
}

inline Vector to_real(const LatticeVector& v) {
  Vector out(static_cast<long>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<long>(i)] = static_cast<double>(v[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unimodular matrices

/// An n x n integer matrix with determinant exactly +1, with its exact inverse.
class UnimodularMatrix {
 public:
  static UnimodularMatrix from_entries(const IntMatrix& entries) {
    if (entries.rows() != entries.cols() || entries.rows() == 0) {
      throw PreconditionError("unimodular matrix must be square and non-empty");
    }
    if (detail::exact_determinant(entries) != 1) throw PreconditionError("determinant is not +1");
    return UnimodularMatrix(entries, detail::unimodular_inverse(entries));
  }

  static UnimodularMatrix identity(int n) {
    return UnimodularMatrix(IntMatrix::Identity(n, n), IntMatrix::Identity(n, n));
  }

  int dim() const { return static_cast<int>(a_.rows()); }
  const IntMatrix& entries() const { return a_; }
  const IntMatrix& inverse() const { return inv_; }
  Matrix real() const { return a_.cast<double>(); }
  Matrix real_inverse() const { return inv_.cast<double>(); }
  bool is_identity() const { return a_ == IntMatrix::Identity(a_.rows(), a_.cols()); }

  LatticeVector column(int k) const {
    LatticeVector c(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) c[static_cast<std::size_t>(i)] = a_(i, k);
    return c;
  }

  UnimodularMatrix operator*(const UnimodularMatrix& o) const {
    return from_entries(multiply(a_, o.a_));
  }

  friend bool operator==(const UnimodularMatrix& x, const UnimodularMatrix& y) { return x.a_ == y.a_; }

 private:
  UnimodularMatrix(IntMatrix a, IntMatrix inv) : a_(std::move(a)), inv_(std::move(inv)) {}

  static IntMatrix multiply(const IntMatrix& x, const IntMatrix& y) {
    IntMatrix out = IntMatrix::Zero(x.rows(), y.cols());
    for (long i = 0; i < x.rows(); ++i)
      for (long j = 0; j < y.cols(); ++j)
        for (long k = 0; k < x.cols(); ++k)
          out(i, j) = detail::add_checked(out(i, j), detail::mul_checked(x(i, k), y(k, j)));
    return out;
  }

  IntMatrix a_;
  IntMatrix inv_;
};

inline std::int64_t content(const LatticeVector& u) {
  std::int64_t g = 0;
  for (std::int64_t x : u) g = std::gcd(g, x);
  return g;
}

/// Completes a primitive vector u to A in SL(n, Z) with A e_1 = u, by
/// iterated extended gcd on the leading entry. If the reduction ends at -e_1,
/// the first column is negated and the last column flipped to keep det = +1.
inline UnimodularMatrix unimodular_complete(const LatticeVector& u) {
  const long n = static_cast<long>(u.size());
  if (n == 0) throw PreconditionError("unimodular_complete: empty vector");
  if (std::all_of(u.begin(), u.end(), [](std::int64_t x) { return x == 0; })) {
    throw PreconditionError("unimodular_complete: zero vector");
  }
  if (content(u) != 1) throw PreconditionError("unimodular_complete: entries of u are not coprime");

  // A is kept as U^{-1}, where U reduces u to (lead, 0, ..., 0); every 2x2
  // step T on entries (0, j) multiplies A by T^{-1} on the right.
  IntMatrix a = IntMatrix::Identity(n, n);
  std::int64_t lead = u[0];
  for (long j = 1; j < n; ++j) {
    const std::int64_t b = u[static_cast<std::size_t>(j)];
    if (b == 0) continue;
    const detail::Bezout bz = detail::bezout(lead, b);
    // T = [[x, y], [-b/g, lead/g]], T^{-1} = [[lead/g, -y], [b/g, x]].
    const std::int64_t t00 = lead / bz.g, t01 = -bz.y, t10 = b / bz.g, t11 = bz.x;
    for (long i = 0; i < n; ++i) {
      const std::int64_t c0 = a(i, 0), cj = a(i, j);
      a(i, 0) = detail::add_checked(detail::mul_checked(c0, t00), detail::mul_checked(cj, t10));
      a(i, j) = detail::add_checked(detail::mul_checked(c0, t01), detail::mul_checked(cj, t11));
    }
    lead = bz.g;
  }
  if (lead == -1) {
    if (n == 1) throw PreconditionError("unimodular_complete: (-1) has no completion in SL(1, Z)");
    a.col(0) *= -1;
    a.col(n - 1) *= -1;
  }
  for (long i = 0; i < n; ++i) {
    if (a(i, 0) != u[static_cast<std::size_t>(i)]) throw std::logic_error("completion lost first column");
  }
  return UnimodularMatrix::from_entries(a);
}

// ---------------------------------------------------------------------------
// Canonical ordering of lattice vectors

/// Flips the sign so that the first nonzero entry is positive.
inline LatticeVector sign_normalize(LatticeVector v) {
  for (std::int64_t x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    break;
  }
  return v;
}

/// Lexicographic order comparing entries by magnitude, with a positive entry
/// ahead of its negative. Lists (0,1),(0,2),(1,0),(1,1),(1,-1),(2,0).
inline bool canonical_less(const LatticeVector& a, const LatticeVector& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    const std::int64_t ma = std::abs(a[i]), mb = std::abs(b[i]);
    if (ma != mb) return ma < mb;
    const bool na = a[i] < 0, nb = b[i] < 0;
    if (na != nb) return !na;
  }
  return a.size() < b.size();
}

// ---------------------------------------------------------------------------
// Enumeration

struct SystoleResult {
  double s = 0.0;
  LatticeVector u;
  bool exhaustive = true;
};

namespace detail {

/// Dual gauges of the coordinate covectors: |v_k| <= f*(e_k) f(v).
inline std::vector<double> coordinate_duals(const GaugeSpec& spec) {
  const int n = spec.dim();
  std::vector<double> d(static_cast<std::size_t>(n));
  const double slack = has_exact_dual(spec) ? 1e-9 : 0.05;
  for (int k = 0; k < n; ++k) {
    const double v = dual_gauge(spec, Vector::Unit(n, k));
    if (!std::isfinite(v) || v <= 0) {
      throw ResourceError("enumeration: dual gauge of a coordinate covector is not a positive finite value");
    }
    d[static_cast<std::size_t>(k)] = v * (1.0 + slack);
  }
  return d;
}

inline std::int64_t box_bound(double dual, double radius) {
  const double b = std::floor(dual * radius);
  if (b > 4e18) throw ResourceError("enumeration: coordinate bound exceeds 64-bit range");
  return static_cast<std::int64_t>(b);
}

inline double box_volume(const std::vector<double>& duals, double radius) {
  double vol = 1.0;
  for (double d : duals) vol *= 2.0 * static_cast<double>(box_bound(d, radius)) + 1.0;
  return vol;
}

/// Depth-first walk over sign-normalized vectors of the coordinate box. The
/// radius is re-read at every level so that a shrinking incumbent narrows the
/// remaining search.
template <class RadiusFn, class Visit>
void walk_box(const std::vector<double>& duals, RadiusFn&& radius, Visit&& visit) {
  const int n = static_cast<int>(duals.size());
  LatticeVector v(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int k, bool leading_zero) -> void {
    if (k == n) {
      if (!leading_zero) visit(v);
      return;
    }
    const std::int64_t bound = box_bound(duals[static_cast<std::size_t>(k)], radius());
    const std::int64_t lo = leading_zero ? 0 : -bound;
    for (std::int64_t x = lo; x <= bound; ++x) {
      if (std::abs(x) > box_bound(duals[static_cast<std::size_t>(k)], radius())) {
        if (x > 0) break;
        continue;
      }
      v[static_cast<std::size_t>(k)] = x;
      self(self, k + 1, leading_zero && x == 0);
    }
    v[static_cast<std::size_t>(k)] = 0;
  };
  rec(rec, 0, true);
}

/// Minimizes a convex function of an integer parameter t, starting at 0.
template <class F>
std::int64_t integer_line_min(F&& f) {
  const double f0 = f(0);
  int dir = 0;
  if (f(1) < f0) dir = 1;
  else if (f(-1) < f0) dir = -1;
  if (dir == 0) return 0;
  std::int64_t lo = 0, hi = 1;
  while (f(dir * 2 * hi) < f(dir * hi) && hi < (std::int64_t{1} << 40)) {
    lo = hi;
    hi *= 2;
  }
  // Minimum lies in [lo, 2 hi] along dir.
  std::int64_t a = lo, b = 2 * hi;
  while (b - a > 2) {
    const std::int64_t m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(dir * m1) < f(dir * m2)) b = m2;
    else a = m1;
  }
  std::int64_t best = a;
  for (std::int64_t t = a + 1; t <= b; ++t)
    if (f(dir * t) < f(dir * best)) best = t;
  return dir * best;
}

/// Pairwise reduction of the standard basis under f. Used only to seed the
/// enumeration incumbent; the box search certifies the minimum.
inline LatticeVector seed_incumbent(const GaugeSpec& spec) {
  const int n = spec.dim();
  std::vector<LatticeVector> basis;
  for (int k = 0; k < n; ++k) {
    LatticeVector e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(k)] = 1;
    basis.push_back(e);
  }
  auto f = [&](const LatticeVector& v) { return gauge(spec, to_real(v)); };
  for (int round = 0; round < 64; ++round) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const LatticeVector& bi = basis[static_cast<std::size_t>(i)];
        const LatticeVector& bj = basis[static_cast<std::size_t>(j)];
        auto shifted = [&](std::int64_t t) {
          LatticeVector w = bi;
          for (int k = 0; k < n; ++k)
            w[static_cast<std::size_t>(k)] = add_checked(w[static_cast<std::size_t>(k)],
                                                         mul_checked(t, bj[static_cast<std::size_t>(k)]));
          return w;
        };
        const double before = f(bi);
        const std::int64_t t = integer_line_min([&](std::int64_t s) { return f(shifted(s)); });
        if (t != 0) {
          LatticeVector w = shifted(t);
          if (f(w) < before * (1.0 - 1e-12)) {
            basis[static_cast<std::size_t>(i)] = std::move(w);
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
  return *std::min_element(basis.begin(), basis.end(),
                           [&](const auto& a, const auto& b) { return f(a) < f(b); });
}

}  // namespace detail

/// Every nonzero v in Z^n with f(v) <= bound, sign-normalized and sorted in
/// canonical order. Refuses boxes larger than `cap` points.
inline std::vector<LatticeVector> enumerate_short_vectors(const GaugeSpec& spec, double bound,
                                                          double cap = kDefaultEnumerationCap) {
  if (!(bound > 0) || !std::isfinite(bound)) {
    throw PreconditionError("enumerate_short_vectors: bound must be positive");
  }
  const auto duals = detail::coordinate_duals(spec);
  const double volume = detail::box_volume(duals, bound);
  if (volume > cap) {
    throw ResourceError("enumerate_short_vectors: search box has " + std::to_string(volume) +
                        " points, above the cap of " + std::to_string(cap));
  }
  std::vector<LatticeVector> out;
  detail::walk_box(duals, [&] { return bound; }, [&](const LatticeVector& v) {
    if (gauge(spec, detail::to_real(v)) <= bound) out.push_back(v);
  });
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

/// sys = min{f(v) | v in Z^n, v != 0} with its canonical minimizer.
inline SystoleResult systole(const GaugeSpec& spec, double cap = kDefaultEnumerationCap) {
  const int n = spec.dim();
  if (n <= 0) throw PreconditionError("systole: dimension must be positive");
  const auto duals = detail::coordinate_duals(spec);

  SystoleResult best;
  best.u = sign_normalize(detail::seed_incumbent(spec));
  best.s = gauge(spec, detail::to_real(best.u));
  best.exhaustive = has_exact_dual(spec);

  const double volume = detail::box_volume(duals, best.s);
  if (volume > cap) {
    throw ResourceError("systole: search box has " + std::to_string(volume) +
                        " points, above the cap of " + std::to_string(cap));
  }

  constexpr double kTie = 1e-12;
  detail::walk_box(duals, [&] { return best.s; }, [&](const LatticeVector& v) {
    const double val = gauge(spec, detail::to_real(v));
    if (val < best.s * (1.0 - kTie)) {
      best.s = val;
      best.u = v;
    } else if (val <= best.s * (1.0 + kTie) && canonical_less(v, best.u)) {
      best.s = val;
      best.u = v;
    }
  });
  return best;
}

// ---------------------------------------------------------------------------
// Reduction to f(e_1) = sys

struct ReducedNorm {
  GaugeSpec spec_a;
  UnimodularMatrix basis;
  SystoleResult systole;
};

/// The pullback v -> f(A v) by an SL(n, Z) matrix, using the exact inverse.
inline GaugeSpec pullback(const GaugeSpec& spec, const UnimodularMatrix& a) {
  if (a.is_identity()) return spec;
  return pullback(spec, a.real(), a.real_inverse());
}

/// Computes the systole, completes its minimizer u to A with A e_1 = u and
/// returns f_A = f o A, for which f_A(e_1) = sys.
inline ReducedNorm reduce_norm(const GaugeSpec& spec, double cap = kDefaultEnumerationCap) {
  SystoleResult sys = systole(spec, cap);
  UnimodularMatrix a = unimodular_complete(sys.u);
  GaugeSpec spec_a = pullback(spec, a);
  return ReducedNorm{std::move(spec_a), std::move(a), std::move(sys)};
}

}  // namespace systocap
