#pragma once

// Flat reversible norms on R^n and their duals.
//
// A GaugeSpec describes a norm f by one of a few concrete families. The unit
// ball K = {f < 1} is a centrally symmetric convex body and the dual norm is
// f*(p) = sup_{v in K} |p.v|, whose unit ball is the polar body K*.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "systocap/errors.hpp"
#include "systocap/lp.hpp"

namespace systocap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class GaugeSpec;

/// f(v) = scale * ||v||_exponent, exponent in [1, inf].
struct LpNorm {
  double exponent = 2.0;
  double scale = 1.0;
};

/// f(v) = sqrt(v^T Q v) for a symmetric positive-definite Gram matrix Q.
struct EllipsoidNorm {
  Matrix gram;
  Matrix gram_inverse;
};

/// K is the convex hull of a vertex list closed under negation (one vertex per row).
struct PolytopeVNorm {
  Matrix vertices;
};

/// K = {v | a_i.v <= b_i}, halfspace list closed under (a, b) -> (-a, b).
struct PolytopeHNorm {
  Matrix normals;
  Vector offsets;
};

/// A user callback. Duals are computed numerically and are approximate.
struct OracleNorm {
  std::function<double(const Vector&)> gauge;
};

/// f(v) = base(M v) for an invertible linear map M.
struct PullbackNorm {
  std::shared_ptr<const GaugeSpec> base;
  Matrix map;
  Matrix map_inverse_transpose;
};

using GaugeFamily =
    std::variant<LpNorm, EllipsoidNorm, PolytopeVNorm, PolytopeHNorm, OracleNorm, PullbackNorm>;

class GaugeSpec {
 public:
  static GaugeSpec lp(int dim, double exponent, double scale = 1.0);
  static GaugeSpec ellipsoid(const Matrix& gram);
  static GaugeSpec polytope_v(const Matrix& vertices);
  static GaugeSpec polytope_h(const Matrix& normals, const Vector& offsets);
  static GaugeSpec oracle(int dim, std::function<double(const Vector&)> gauge);
  static GaugeSpec pullback_of(const GaugeSpec& base, const Matrix& map, const Matrix& map_inverse);

  int dim() const { return dim_; }
  const GaugeFamily& family() const { return family_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&family_);
  }

  /// Short family name used in reports.
  std::string family_name() const;

 private:
  GaugeSpec(int dim, GaugeFamily family) : dim_(dim), family_(std::move(family)) {}

  int dim_;
  GaugeFamily family_;
};

inline double gauge(const GaugeSpec& spec, const Vector& v);
inline double dual_gauge(const GaugeSpec& spec, const Vector& p);

/// False when any part of the spec is an oracle; dual values are then
/// certified lower bounds only.
inline bool has_exact_dual(const GaugeSpec& spec);

// ---------------------------------------------------------------------------
// Construction

namespace detail {

inline void validate_matrix_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidSpec(std::string(what) + " contains non-finite entries");
}

inline int checked_dim(long n, const char* what) {
  if (n <= 0) throw InvalidSpec(std::string(what) + ": dimension must be positive");
  return static_cast<int>(n);
}

inline bool rows_closed_under(const Matrix& rows, double tol) {
  for (long i = 0; i < rows.rows(); ++i) {
    bool found = false;
    for (long j = 0; j < rows.rows() && !found; ++j) {
      found = (rows.row(i) + rows.row(j)).cwiseAbs().maxCoeff() <= tol;
    }
    if (!found) return false;
  }
  return true;
}

inline long numeric_rank(const Matrix& m) {
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-12);
  return lu.rank();
}

}  // namespace detail

inline GaugeSpec GaugeSpec::lp(int dim, double exponent, double scale) {
  detail::checked_dim(dim, "lp");
  if (std::isnan(exponent) || exponent < 1.0) {
    throw InvalidSpec("lp: exponent must lie in [1, inf]; p < 1 is not a norm");
  }
  if (!(scale > 0) || !std::isfinite(scale)) throw InvalidSpec("lp: scale must be positive");
  return GaugeSpec(dim, LpNorm{exponent, scale});
}

inline GaugeSpec GaugeSpec::ellipsoid(const Matrix& gram) {
  const int n = detail::checked_dim(gram.rows(), "ellipsoid");
  if (gram.cols() != gram.rows()) throw InvalidSpec("ellipsoid: Gram matrix must be square");
  detail::validate_matrix_finite(gram, "ellipsoid: Gram matrix");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidSpec("ellipsoid: Gram matrix must be symmetric");
  }
  Matrix sym = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-12) {
    throw InvalidSpec("ellipsoid: Gram matrix must be positive definite (eigenvalue <= 1e-12)");
  }
  Matrix inv = sym.llt().solve(Matrix::Identity(n, n));
  inv = 0.5 * (inv + inv.transpose());
  return GaugeSpec(n, EllipsoidNorm{gram, inv});
}

inline GaugeSpec GaugeSpec::polytope_v(const Matrix& vertices) {
  if (vertices.rows() == 0) throw InvalidSpec("polytope_v: empty vertex list");
  const int n = detail::checked_dim(vertices.cols(), "polytope_v");
  detail::validate_matrix_finite(vertices, "polytope_v: vertices");
  if (detail::numeric_rank(vertices) < n) {
    throw InvalidSpec("polytope_v: vertices do not span R^n (rank-deficient)");
  }
  if (!detail::rows_closed_under(vertices, 1e-12)) {
    throw InvalidSpec("polytope_v: vertex set is not closed under v -> -v");
  }
  return GaugeSpec(n, PolytopeVNorm{vertices});
}

inline GaugeSpec GaugeSpec::polytope_h(const Matrix& normals, const Vector& offsets) {
  if (normals.rows() == 0) throw InvalidSpec("polytope_h: empty halfspace list");
  if (offsets.size() != normals.rows()) throw InvalidSpec("polytope_h: one offset per normal required");
  const int n = detail::checked_dim(normals.cols(), "polytope_h");
  detail::validate_matrix_finite(normals, "polytope_h: normals");
  for (long i = 0; i < offsets.size(); ++i) {
    if (!(offsets[i] > 0) || !std::isfinite(offsets[i])) {
      throw InvalidSpec("polytope_h: offsets must be positive");
    }
  }
  if (detail::numeric_rank(normals) < n) {
    throw InvalidSpec("polytope_h: normals do not span R^n (unbounded body)");
  }
  Matrix scaled = normals;
  for (long i = 0; i < scaled.rows(); ++i) scaled.row(i) /= offsets[i];
  if (!detail::rows_closed_under(scaled, 1e-12)) {
    throw InvalidSpec("polytope_h: halfspace set is not closed under (a, b) -> (-a, b)");
  }
  return GaugeSpec(n, PolytopeHNorm{normals, offsets});
}

inline GaugeSpec GaugeSpec::oracle(int dim, std::function<double(const Vector&)> fn) {
  detail::checked_dim(dim, "oracle");
  if (!fn) throw InvalidSpec("oracle: empty callback");
  return GaugeSpec(dim, OracleNorm{std::move(fn)});
}

inline GaugeSpec GaugeSpec::pullback_of(const GaugeSpec& base, const Matrix& map,
                                        const Matrix& map_inverse) {
  const int n = base.dim();
  if (map.rows() != n || map.cols() != n || map_inverse.rows() != n || map_inverse.cols() != n) {
    throw InvalidSpec("pullback: map must be n x n");
  }
  detail::validate_matrix_finite(map, "pullback: map");
  if ((map * map_inverse - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidSpec("pullback: supplied inverse does not invert the map");
  }
  return GaugeSpec(n, PullbackNorm{std::make_shared<const GaugeSpec>(base), map,
                                   map_inverse.transpose()});
}

inline std::string GaugeSpec::family_name() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpNorm>) return "lp";
        else if constexpr (std::is_same_v<T, EllipsoidNorm>) return "ellipsoid";
        else if constexpr (std::is_same_v<T, PolytopeVNorm>) return "polytope_v";
        else if constexpr (std::is_same_v<T, PolytopeHNorm>) return "polytope_h";
        else if constexpr (std::is_same_v<T, OracleNorm>) return "oracle";
        else return "pullback(" + f.base->family_name() + ")";
      },
      family_);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double lp_norm(const Vector& v, double p) {
  if (v.size() == 0) return 0.0;
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  double acc = 0.0;
  for (long i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Ratio |p.v| / f(v) on the unit sphere; maximizing it gives f*(p).
struct DualRatio {
  const std::function<double(const Vector&)>& f;
  const Vector& p;
  double operator()(const Vector& v) const {
    const double fv = f(v);
    if (!(fv > 0)) return 0.0;
    return std::abs(p.dot(v)) / fv;
  }
};

/// Multi-start ratio maximization for oracle gauges: 64 starting directions
/// (p itself, the coordinate axes, then seeded random directions), the best
/// four refined by golden-section search along great circles.
inline double oracle_dual(const std::function<double(const Vector&)>& f, const Vector& p) {
  const long n = p.size();
  if (p.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  DualRatio ratio{f, p};
  if (n == 1) return ratio(Vector::Ones(1));

  constexpr int kStarts = 64;
  constexpr int kRefined = 4;
  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::pair<double, Vector>> starts;
  starts.reserve(kStarts);
  starts.emplace_back(0.0, p.normalized());
  for (long k = 0; k < n && static_cast<int>(starts.size()) < kStarts; ++k) {
    starts.emplace_back(0.0, Vector::Unit(n, k));
  }
  while (static_cast<int>(starts.size()) < kStarts) {
    Vector d(n);
    for (long k = 0; k < n; ++k) d[k] = normal(rng);
    if (d.norm() > 1e-12) starts.emplace_back(0.0, d.normalized());
  }
  for (auto& [val, dir] : starts) val = ratio(dir);
  std::partial_sort(starts.begin(), starts.begin() + kRefined, starts.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best = starts.front().first;
  for (int s = 0; s < kRefined; ++s) {
    Vector u = starts[static_cast<std::size_t>(s)].second;
    double val = starts[static_cast<std::size_t>(s)].first;
    double half_width = 0.5;
    for (int sweep = 0; sweep < 20; ++sweep) {
      for (long j = 0; j < n; ++j) {
        Vector d = Vector::Unit(n, j) - u[j] * u;
        if (d.norm() < 1e-9) continue;
        d.normalize();
        auto along = [&](double t) { return ratio(std::cos(t) * u + std::sin(t) * d); };
        double lo = -half_width, hi = half_width;
        double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
        double f1 = along(x1), f2 = along(x2);
        for (int it = 0; it < 40; ++it) {
          if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = along(x2);
          } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = along(x1);
          }
        }
        const double t = 0.5 * (lo + hi);
        const double cand = along(t);
        if (cand > val) {
          val = cand;
          u = (std::cos(t) * u + std::sin(t) * d).normalized();
        }
      }
      half_width *= 0.5;
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace detail

inline double gauge(const GaugeSpec& spec, const Vector& v) {
  require_dim(spec.dim(), v.size(), "gauge");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpNorm>) {
          return f.scale * detail::lp_norm(v, f.exponent);
        } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
          return std::sqrt(std::max(0.0, v.dot(f.gram * v)));
        } else if constexpr (std::is_same_v<T, PolytopeVNorm>) {
          // f(v) = max p.v over the polar body {p : p.v_i <= 1}.
          if (v.cwiseAbs().maxCoeff() == 0.0) return 0.0;
          return std::max(0.0, lp::maximize_free(f.vertices, Vector::Ones(f.vertices.rows()), v));
        } else if constexpr (std::is_same_v<T, PolytopeHNorm>) {
          return std::max(0.0, (f.normals * v).cwiseQuotient(f.offsets).maxCoeff());
        } else if constexpr (std::is_same_v<T, OracleNorm>) {
          return f.gauge(v);
        } else {
          return gauge(*f.base, f.map * v);
        }
      },
      spec.family());
}

inline double dual_gauge(const GaugeSpec& spec, const Vector& p) {
  require_dim(spec.dim(), p.size(), "dual_gauge");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpNorm>) {
          return detail::lp_norm(p, detail::conjugate_exponent(f.exponent)) / f.scale;
        } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
          return std::sqrt(std::max(0.0, p.dot(f.gram_inverse * p)));
        } else if constexpr (std::is_same_v<T, PolytopeVNorm>) {
          return (f.vertices * p).cwiseAbs().maxCoeff();
        } else if constexpr (std::is_same_v<T, PolytopeHNorm>) {
          if (p.cwiseAbs().maxCoeff() == 0.0) return 0.0;
          return std::max(0.0, lp::maximize_free(f.normals, f.offsets, p));
        } else if constexpr (std::is_same_v<T, OracleNorm>) {
          return detail::oracle_dual(f.gauge, p);
        } else {
          return dual_gauge(*f.base, f.map_inverse_transpose * p);
        }
      },
      spec.family());
}

inline bool has_exact_dual(const GaugeSpec& spec) {
  if (spec.as<OracleNorm>()) return false;
  if (const auto* pb = spec.as<PullbackNorm>()) return has_exact_dual(*pb->base);
  return true;
}

// ---------------------------------------------------------------------------
// Derived specs

/// The dual norm f* as a gauge in its own right; its unit ball is K*.
inline GaugeSpec dual_spec(const GaugeSpec& spec) {
  return std::visit(
      [&](const auto& f) -> GaugeSpec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpNorm>) {
          return GaugeSpec::lp(spec.dim(), detail::conjugate_exponent(f.exponent), 1.0 / f.scale);
        } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
          return GaugeSpec::ellipsoid(f.gram_inverse);
        } else if constexpr (std::is_same_v<T, PolytopeVNorm>) {
          return GaugeSpec::polytope_h(f.vertices, Vector::Ones(f.vertices.rows()));
        } else if constexpr (std::is_same_v<T, PolytopeHNorm>) {
          Matrix verts = f.normals;
          for (long i = 0; i < verts.rows(); ++i) verts.row(i) /= f.offsets[i];
          return GaugeSpec::polytope_v(verts);
        } else if constexpr (std::is_same_v<T, OracleNorm>) {
          return GaugeSpec::oracle(spec.dim(), [spec](const Vector& p) { return dual_gauge(spec, p); });
        } else {
          // (g o M)* = g* o M^{-T}
          return GaugeSpec::pullback_of(dual_spec(*f.base), f.map_inverse_transpose,
                                        f.map.transpose());
        }
      },
      spec.family());
}

/// The gauge t*f. Closed families stay closed.
inline GaugeSpec scale_gauge(const GaugeSpec& spec, double t) {
  if (!(t > 0) || !std::isfinite(t)) throw PreconditionError("scale_gauge: t must be positive");
  return std::visit(
      [&](const auto& f) -> GaugeSpec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpNorm>) {
          return GaugeSpec::lp(spec.dim(), f.exponent, f.scale * t);
        } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
          return GaugeSpec::ellipsoid(t * t * f.gram);
        } else if constexpr (std::is_same_v<T, PolytopeVNorm>) {
          return GaugeSpec::polytope_v(f.vertices / t);
        } else if constexpr (std::is_same_v<T, PolytopeHNorm>) {
          return GaugeSpec::polytope_h(f.normals, f.offsets / t);
        } else if constexpr (std::is_same_v<T, OracleNorm>) {
          auto fn = f.gauge;
          return GaugeSpec::oracle(spec.dim(), [fn, t](const Vector& v) { return t * fn(v); });
        } else {
          return GaugeSpec::pullback_of(scale_gauge(*f.base, t), f.map,
                                        f.map_inverse_transpose.transpose());
        }
      },
      spec.family());
}

/// The gauge v -> f(M v). The inverse is passed in so that integer maps keep
/// exact inverses.
inline GaugeSpec pullback(const GaugeSpec& spec, const Matrix& map, const Matrix& map_inverse) {
  const int n = spec.dim();
  if (map.rows() != n || map.cols() != n) throw DimensionMismatch("pullback: map must be n x n");
  return std::visit(
      [&](const auto& f) -> GaugeSpec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, EllipsoidNorm>) {
          Matrix g = map.transpose() * f.gram * map;
          return GaugeSpec::ellipsoid(0.5 * (g + g.transpose()));
        } else if constexpr (std::is_same_v<T, PolytopeVNorm>) {
          return GaugeSpec::polytope_v(f.vertices * map_inverse.transpose());
        } else if constexpr (std::is_same_v<T, PolytopeHNorm>) {
          return GaugeSpec::polytope_h(f.normals * map, f.offsets);
        } else if constexpr (std::is_same_v<T, PullbackNorm>) {
          return GaugeSpec::pullback_of(*f.base, f.map * map,
                                        map_inverse * f.map_inverse_transpose.transpose());
        } else {
          return GaugeSpec::pullback_of(spec, map, map_inverse);
        }
      },
      spec.family());
}

inline GaugeSpec pullback(const GaugeSpec& spec, const Matrix& map) {
  Eigen::FullPivLU<Matrix> lu(map);
  if (!lu.isInvertible()) throw InvalidSpec("pullback: map is singular");
  return pullback(spec, map, lu.inverse());
}

// ---------------------------------------------------------------------------
// Euclidean sandwich

/// Euclidean radii with r_in B ⊂ K ⊂ r_out B.
struct SandwichRadii {
  double r_in = 0.0;
  double r_out = 0.0;
  bool approximate = false;
};

inline SandwichRadii sandwich_radii(const GaugeSpec& spec) {
  const int n = spec.dim();
  const double root_n = std::sqrt(static_cast<double>(n));

  // |v_k| <= f*(e_k) f(v) and f(v) <= max_k f(e_k) ||v||_1.
  auto generic = [&]() {
    double max_f = 0.0, max_dual = 0.0;
    for (int k = 0; k < n; ++k) {
      max_f = std::max(max_f, gauge(spec, Vector::Unit(n, k)));
      max_dual = std::max(max_dual, dual_gauge(spec, Vector::Unit(n, k)));
    }
    return SandwichRadii{1.0 / (root_n * max_f), root_n * max_dual, !has_exact_dual(spec)};
  };

  if (const auto* f = spec.as<LpNorm>()) {
    const double p = f->exponent;
    const double gap = std::isinf(p) ? 0.5 : 0.5 - 1.0 / p;  // 1/2 - 1/p
    const double corner = std::pow(static_cast<double>(n), gap);
    // Unit ball of ||.||_p: inradius and circumradius are 1 and n^{1/2-1/p} in some order.
    if (p <= 2.0) return {corner / f->scale, 1.0 / f->scale, false};
    return {1.0 / f->scale, corner / f->scale, false};
  }
  if (const auto* f = spec.as<EllipsoidNorm>()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(f->gram, Eigen::EigenvaluesOnly);
    return {1.0 / std::sqrt(eig.eigenvalues().maxCoeff()),
            1.0 / std::sqrt(eig.eigenvalues().minCoeff()), false};
  }
  if (const auto* f = spec.as<PolytopeVNorm>()) {
    SandwichRadii r = generic();
    r.r_out = f->vertices.rowwise().norm().maxCoeff();
    return r;
  }
  if (const auto* f = spec.as<PolytopeHNorm>()) {
    SandwichRadii r = generic();
    r.r_in = f->offsets.cwiseQuotient(f->normals.rowwise().norm()).minCoeff();
    return r;
  }
  return generic();
}

// ---------------------------------------------------------------------------
// Axiom checks

struct AxiomReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double max_homogeneity_violation = 0.0;
  double max_reversibility_violation = 0.0;
  double max_triangle_violation = 0.0;
  int positivity_failures = 0;
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

/// Samples random directions and triples and reports the worst relative
/// violation of homogeneity, reversibility and the triangle inequality.
inline AxiomReport check_gauge_axioms(const GaugeSpec& spec, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw PreconditionError("check_gauge_axioms: sample_count must be >= 1");
  const int n = spec.dim();
  AxiomReport rep;
  rep.samples = sample_count;
  rep.seed = seed;
  rep.tolerance = has_exact_dual(spec) ? 1e-9 : 1e-6;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&]() {
    Vector v(n);
    for (int k = 0; k < n; ++k) v[k] = normal(rng);
    return v;
  };

  if (gauge(spec, Vector::Zero(n)) != 0.0) ++rep.positivity_failures;
  for (int i = 0; i < sample_count; ++i) {
    const Vector v = draw();
    const Vector w = draw();
    const double fv = gauge(spec, v);
    const double fw = gauge(spec, w);
    if (!(fv > 0)) {
      ++rep.positivity_failures;
      continue;
    }
    for (double t : {0.5, 2.0, 10.0}) {
      const double err = std::abs(gauge(spec, t * v) - t * fv) / (t * fv);
      rep.max_homogeneity_violation = std::max(rep.max_homogeneity_violation, err);
    }
    const double fneg = gauge(spec, -v);
    rep.max_reversibility_violation =
        std::max(rep.max_reversibility_violation, std::abs(fneg - fv) / std::max(fv, fneg));
    if (fw > 0) {
      const double excess = gauge(spec, v + w) - fv - fw;
      rep.max_triangle_violation = std::max(rep.max_triangle_violation, excess / (fv + fw));
    }
  }

  if (rep.positivity_failures > 0) rep.violations.emplace_back("positivity");
  if (rep.max_homogeneity_violation > rep.tolerance) rep.violations.emplace_back("homogeneity");
  if (rep.max_reversibility_violation > rep.tolerance) rep.violations.emplace_back("reversibility");
  if (rep.max_triangle_violation > rep.tolerance) rep.violations.emplace_back("triangle");
  return rep;
}

}  // namespace systocap
