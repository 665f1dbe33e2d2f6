#pragma once

// Explicit symplectic maps taking the disc cotangent bundle of a flat torus
// into a symplectic cylinder, plus finite-difference certification.
//
// Coordinates: a phase point is (q, p) with q in T^n = R^n / Z^n stored in
// [0, 1)^n and p a covector. Maps are tested in interleaved Darboux order
// (p_1, q_1, ..., p_n, q_n) on the source and (x_1, y_1, ..., x_n, y_n) with
// z_k = x_k + i y_k on the target; both forms are then sum da_k ^ db_k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "systocap/errors.hpp"
#include "systocap/gauge.hpp"
#include "systocap/lattice.hpp"

namespace systocap {

inline constexpr double kPi = 3.14159265358979323846;

inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

struct PhasePoint {
  Vector q;
  Vector p;

  static PhasePoint make(const Vector& q, const Vector& p) {
    require_dim(q.size(), p.size(), "PhasePoint");
    PhasePoint x{q, p};
    for (long k = 0; k < x.q.size(); ++k) x.q[k] = wrap_unit(x.q[k]);
    return x;
  }
  int dim() const { return static_cast<int>(q.size()); }
};

struct CylinderPoint {
  std::vector<std::complex<double>> z;
};

/// Distance on T^n x R^n: wrap-around in q, Euclidean overall.
inline double phase_distance(const PhasePoint& a, const PhasePoint& b) {
  double acc = 0.0;
  for (long k = 0; k < a.q.size(); ++k) {
    const double d = std::abs(a.q[k] - b.q[k]);
    const double w = std::min(d, 1.0 - d);
    acc += w * w;
  }
  acc += (a.p - b.p).squaredNorm();
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// The factor maps

/// phi(q, p) = sqrt((p + s) / pi) exp(2 pi i q), taking T x (-s, s) onto the
/// punctured disc of radius sqrt(2 s / pi).
inline std::complex<double> annulus_to_disc(double width, double q, double p) {
  if (!(width > 0)) throw DomainError("annulus_to_disc: width must be positive");
  if (!(p > -width && p < width)) throw DomainError("annulus_to_disc: p outside (-s, s)");
  return std::polar(std::sqrt((p + width) / kPi), 2.0 * kPi * q);
}

/// Returns (q, p) with q in [0, 1).
inline std::pair<double, double> annulus_to_disc_inverse(double width, std::complex<double> z) {
  if (!(width > 0)) throw DomainError("annulus_to_disc_inverse: width must be positive");
  if (z == std::complex<double>(0.0, 0.0)) throw DomainError("annulus_to_disc_inverse: angle undefined at 0");
  const double p = kPi * std::norm(z) - width;
  if (!(p > -width && p < width)) throw DomainError("annulus_to_disc_inverse: |z| out of range");
  return {wrap_unit(std::arg(z) / (2.0 * kPi)), p};
}

/// T*[A](q, p) = (A q mod 1, A^{-T} p), with A^{-1} taken exactly.
inline PhasePoint cotangent_lift(const UnimodularMatrix& a, const PhasePoint& x) {
  require_dim(a.dim(), x.dim(), "cotangent_lift");
  return PhasePoint::make(a.real() * x.q, a.real_inverse().transpose() * x.p);
}

/// Widths s_k = f(e_k) of the slabs containing the projections of K*.
inline Vector coordinate_widths(const GaugeSpec& spec) {
  Vector w(spec.dim());
  for (int k = 0; k < spec.dim(); ++k) w[k] = gauge(spec, Vector::Unit(spec.dim(), k));
  return w;
}

/// Psi followed by phi_1 x ... x phi_n on the disc bundle of a reduced norm
/// (one with f(e_1) = sys). A p_k outside (-s_k, s_k) contradicts
/// s_k = sup_{K*} |p_k| and is raised as a certificate failure.
inline CylinderPoint full_embedding(const GaugeSpec& reduced, const Vector& widths, const PhasePoint& x) {
  const int n = reduced.dim();
  require_dim(n, x.dim(), "full_embedding");
  require_dim(n, widths.size(), "full_embedding widths");
  if (!(dual_gauge(reduced, x.p) < 1.0)) throw DomainError("full_embedding: point outside the disc bundle");
  CylinderPoint out;
  out.z.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (!(std::abs(x.p[k]) < widths[k])) {
      throw CertificateFailure("full_embedding: |p_k| >= s_k violates the width bound");
    }
    out.z.push_back(annulus_to_disc(widths[k], x.q[k], x.p[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maps on R^{2n} for finite-difference checks

struct SymplecticMap {
  int n = 0;  // acts on R^{2n}
  std::function<Vector(const Vector&)> eval;
  /// Distance from the argument to the boundary of the open domain.
  std::function<double(const Vector&)> margin;
};

inline Vector to_darboux(const PhasePoint& x) {
  Vector v(2 * x.dim());
  for (int k = 0; k < x.dim(); ++k) {
    v[2 * k] = x.p[k];
    v[2 * k + 1] = x.q[k];
  }
  return v;
}

inline Vector to_darboux(const CylinderPoint& z) {
  Vector v(2 * static_cast<long>(z.z.size()));
  for (std::size_t k = 0; k < z.z.size(); ++k) {
    v[2 * static_cast<long>(k)] = z.z[k].real();
    v[2 * static_cast<long>(k) + 1] = z.z[k].imag();
  }
  return v;
}

/// Block-diagonal [[0, 1], [-1, 0]].
inline Matrix canonical_form(int n) {
  Matrix omega = Matrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

inline SymplecticMap identity_map(int n) {
  return {n, [](const Vector& x) { return x; }, [](const Vector&) { return kInfinity; }};
}

inline SymplecticMap annulus_map(double width) {
  return {1,
          [width](const Vector& x) {
            const auto z = std::polar(std::sqrt((x[0] + width) / kPi), 2.0 * kPi * x[1]);
            Vector out(2);
            out << z.real(), z.imag();
            return out;
          },
          [width](const Vector& x) { return std::min(x[0] + width, width - x[0]); }};
}

inline SymplecticMap lift_map(const UnimodularMatrix& a) {
  const Matrix fwd = a.real();
  const Matrix dual = a.real_inverse().transpose();
  return {a.dim(),
          [fwd, dual](const Vector& x) {
            const long n = fwd.rows();
            Vector q(n), p(n);
            for (long k = 0; k < n; ++k) {
              p[k] = x[2 * k];
              q[k] = x[2 * k + 1];
            }
            const Vector q2 = fwd * q, p2 = dual * p;
            Vector out(2 * n);
            for (long k = 0; k < n; ++k) {
              out[2 * k] = p2[k];
              out[2 * k + 1] = q2[k];
            }
            return out;
          },
          [](const Vector&) { return kInfinity; }};
}

/// Max-entry magnitude of J^T Omega J - Omega for the central-difference
/// Jacobian J of `map` at x.
inline double verify_symplectic(const SymplecticMap& map, const Vector& x, double step) {
  require_dim(2 * map.n, x.size(), "verify_symplectic");
  if (!(step > 0)) throw DomainError("verify_symplectic: step must be positive");
  if (!(map.margin(x) > step)) throw DomainError("verify_symplectic: step exceeds the domain margin");
  const long m = x.size();
  Matrix jac(m, m);
  for (long j = 0; j < m; ++j) {
    Vector plus = x, minus = x;
    plus[j] += step;
    minus[j] -= step;
    jac.col(j) = (map.eval(plus) - map.eval(minus)) / (2.0 * step);
  }
  const Matrix omega = canonical_form(map.n);
  return (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
}

inline double verify_symplectic(const SymplecticMap& map, const PhasePoint& x, double step) {
  return verify_symplectic(map, to_darboux(x), step);
}

// ---------------------------------------------------------------------------
// The full upper-bound embedding D*_F T^n -> Z(r_1)

/// (phi_1 x ... x phi_n) o Psi o T*[A]^{-1}, where f_A = f o A has
/// f_A(e_1) = sys(f) and widths s_k = f_A(e_k).
class CylinderEmbedding {
 public:
  CylinderEmbedding(GaugeSpec spec, UnimodularMatrix basis, Vector widths)
      : spec_(std::move(spec)),
        basis_(std::move(basis)),
        widths_(std::move(widths)),
        reduced_(pullback(spec_, basis_)) {
    require_dim(spec_.dim(), basis_.dim(), "CylinderEmbedding basis");
    require_dim(spec_.dim(), widths_.size(), "CylinderEmbedding widths");
  }

  const GaugeSpec& spec() const { return spec_; }
  const GaugeSpec& reduced_spec() const { return reduced_; }
  const UnimodularMatrix& basis() const { return basis_; }
  const Vector& widths() const { return widths_; }
  double r1() const { return std::sqrt(2.0 * widths_[0] / kPi); }

  /// Pulls x back to the reduced bundle: (A^{-1} q mod 1, A^T p).
  PhasePoint to_reduced(const PhasePoint& x) const {
    return PhasePoint::make(basis_.real_inverse() * x.q, basis_.real().transpose() * x.p);
  }

  CylinderPoint operator()(const PhasePoint& x) const {
    return full_embedding(reduced_, widths_, to_reduced(x));
  }

  SymplecticMap as_map() const {
    const Matrix q_map = basis_.real_inverse();
    const Matrix p_map = basis_.real().transpose();
    const Vector widths = widths_;
    const double stretch = p_map.cwiseAbs().rowwise().sum().maxCoeff();
    auto split = [](const Vector& x, Vector& q, Vector& p) {
      const long n = x.size() / 2;
      q.resize(n);
      p.resize(n);
      for (long k = 0; k < n; ++k) {
        p[k] = x[2 * k];
        q[k] = x[2 * k + 1];
      }
    };
    return {spec_.dim(),
            [=](const Vector& x) {
              Vector q, p;
              split(x, q, p);
              const Vector qa = q_map * q, pa = p_map * p;
              Vector out(x.size());
              for (long k = 0; k < qa.size(); ++k) {
                const auto z = std::polar(std::sqrt((pa[k] + widths[k]) / kPi), 2.0 * kPi * qa[k]);
                out[2 * k] = z.real();
                out[2 * k + 1] = z.imag();
              }
              return out;
            },
            [=](const Vector& x) {
              Vector q, p;
              split(x, q, p);
              const Vector pa = p_map * p;
              double m = kInfinity;
              for (long k = 0; k < pa.size(); ++k) {
                m = std::min({m, pa[k] + widths[k], widths[k] - pa[k]});
              }
              return m / stretch;
            }};
  }

 private:
  GaugeSpec spec_;
  UnimodularMatrix basis_;
  Vector widths_;
  GaugeSpec reduced_;
};

// ---------------------------------------------------------------------------
// Sampling harness

struct EmbeddingTolerances {
  double fd_step = 1e-5;
  /// Finite-difference checks skip points closer than this to the puncture
  /// or rim of some factor annulus; sqrt(p + s) has unbounded derivatives there.
  double fd_margin = 1e-2;
  double max_defect = 1e-6;
  double collision_distance = 1e-9;
  double preimage_separation = 1e-6;
};

struct EmbeddingReport {
  int samples = 0;
  int symplectic_checked = 0;
  double max_symplectic_defect = 0.0;
  int containment_failures = 0;
  int collision_pairs = 0;
  double r1 = 0.0;
  std::uint64_t seed = 0;
  EmbeddingTolerances tolerances;

  bool passed() const {
    return max_symplectic_defect < tolerances.max_defect && containment_failures == 0 &&
           collision_pairs == 0;
  }
};

/// Uniform q, and p by rejection from the box prod(-f(e_k), f(e_k)) against
/// f*(p) < 1.
inline std::vector<PhasePoint> sample_disc_bundle(const GaugeSpec& spec, int count, std::uint64_t seed) {
  const int n = spec.dim();
  const Vector box = coordinate_widths(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PhasePoint> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Vector q(n), p(n);
    for (int k = 0; k < n; ++k) q[k] = unit(rng);
    int misses = 0;
    for (;;) {
      for (int k = 0; k < n; ++k) p[k] = (2.0 * unit(rng) - 1.0) * box[k];
      if (dual_gauge(spec, p) < 1.0) break;
      if (++misses >= 1000000) throw SamplingError("sample_disc_bundle: 10^6 consecutive rejections");
    }
    out.push_back(PhasePoint::make(q, p));
  }
  return out;
}

/// Maps the given points and aggregates defect, containment and collision checks.
inline EmbeddingReport embedding_report(const CylinderEmbedding& emb, const std::vector<PhasePoint>& points,
                                        std::uint64_t seed, const EmbeddingTolerances& tol = {}) {
  EmbeddingReport rep;
  rep.samples = static_cast<int>(points.size());
  rep.r1 = emb.r1();
  rep.seed = seed;
  rep.tolerances = tol;

  const SymplecticMap map = emb.as_map();
  const Vector& widths = emb.widths();
  std::vector<Vector> images;
  std::vector<std::size_t> mapped;
  images.reserve(points.size());

  for (std::size_t i = 0; i < points.size(); ++i) {
    CylinderPoint z;
    try {
      z = emb(points[i]);
    } catch (const CertificateFailure&) {
      ++rep.containment_failures;
      continue;
    }
    bool inside = true;
    for (std::size_t k = 0; k < z.z.size(); ++k) {
      if (!(kPi * std::norm(z.z[k]) < 2.0 * widths[static_cast<long>(k)])) inside = false;
    }
    if (!inside) ++rep.containment_failures;
    images.push_back(to_darboux(z));
    mapped.push_back(i);

    const Vector xd = to_darboux(points[i]);
    if (map.margin(xd) >= std::max(tol.fd_margin, 10.0 * tol.fd_step)) {
      rep.max_symplectic_defect = std::max(rep.max_symplectic_defect, verify_symplectic(map, xd, tol.fd_step));
      ++rep.symplectic_checked;
    }
  }

  // Sweep over images sorted by their first coordinate.
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return images[a][0] < images[b][0]; });
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Vector& za = images[order[a]];
      const Vector& zb = images[order[b]];
      if (zb[0] - za[0] >= tol.collision_distance) break;
      if ((za - zb).norm() < tol.collision_distance &&
          phase_distance(points[mapped[order[a]]], points[mapped[order[b]]]) > tol.preimage_separation) {
        ++rep.collision_pairs;
      }
    }
  }
  return rep;
}

/// Samples `count` points of D*_F T^n with the given seed and checks the
/// embedding on them.
inline EmbeddingReport verify_embedding_samples(const GaugeSpec& spec, const UnimodularMatrix& basis,
                                                const Vector& widths, int count, std::uint64_t seed,
                                                const EmbeddingTolerances& tol = {}) {
  if (count < 2) throw PreconditionError("verify_embedding_samples: count must be >= 2");
  const CylinderEmbedding emb(spec, basis, widths);
  return embedding_report(emb, sample_disc_bundle(spec, count, seed), seed, tol);
}

}  // namespace systocap
