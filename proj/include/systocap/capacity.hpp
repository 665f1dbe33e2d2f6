#pragma once

// Capacity of the disc cotangent bundle of a flat reversible Finsler torus,
// c = 2 sys(F), with certificates for both bounds.
//
// Upper bound (unconditional): reduce to f(e_1) = sys, split coordinates and
// map each factor annulus onto a disc; the image lies in the cylinder of
// radius r_1 with pi r_1^2 = 2 s_1 = 2 sys.
//
// Lower bound: no nonzero lattice vector lies in the open body sys*K, so the
// torus projection is injective on (sys/2)K and (sys/2)K x K* sits inside
// the bundle. Equality then needs a flat Riemannian minorant with the same
// systole, or a capacity dominating Hofer-Zehnder, for which c_HZ(K x K*) = 4.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "systocap/embedding.hpp"
#include "systocap/errors.hpp"
#include "systocap/gauge.hpp"
#include "systocap/lattice.hpp"

namespace systocap {

/// Hofer-Zehnder capacity of a Lagrangian product K x K* (cited, not computed).
inline constexpr double kLagrangianProductCapacity = 4.0;
inline constexpr const char* kLagrangianProductCitation =
    "c_HZ(K x K*) = 4 for centrally symmetric convex K "
    "[AKO, Theorem 1.7: Artstein-Avidan, Karasev, Ostrover]";

enum class LowerBoundCase { Riemannian, MinorantProvided, LpWithSmallExponent, HZOnly, UpperBoundOnly };

inline const char* to_string(LowerBoundCase c) {
  switch (c) {
    case LowerBoundCase::Riemannian: return "Riemannian";
    case LowerBoundCase::MinorantProvided: return "MinorantProvided";
    case LowerBoundCase::LpWithSmallExponent: return "LpWithSmallExponent";
    case LowerBoundCase::HZOnly: return "HZOnly";
    case LowerBoundCase::UpperBoundOnly: return "UpperBoundOnly";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Riemannian minorants

struct MinorantReport {
  int samples = 0;
  std::uint64_t seed = 0;
  /// max over tested directions of (G(v) - F(v)) / F(v); <= 1e-9 passes.
  double worst_violation = 0.0;
  Vector worst_direction;
  double minorant_systole = 0.0;
  double norm_systole = 0.0;
  bool pointwise_ok = false;
  bool systoles_match = false;
  bool passed() const { return pointwise_ok && systoles_match; }
};

namespace detail {

/// Coordinate axes, the 2^n sign diagonals (n <= 10) and the pairwise
/// diagonals, as unit vectors.
inline std::vector<Vector> probe_directions(int n) {
  std::vector<Vector> dirs;
  for (int k = 0; k < n; ++k) dirs.push_back(Vector::Unit(n, k));
  if (n <= 10) {
    for (long mask = 0; mask < (1L << n); ++mask) {
      Vector v(n);
      for (int k = 0; k < n; ++k) v[k] = (mask >> k) & 1 ? -1.0 : 1.0;
      dirs.push_back(v.normalized());
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double sgn : {1.0, -1.0}) {
        Vector v = Vector::Unit(n, i) + sgn * Vector::Unit(n, j);
        dirs.push_back(v.normalized());
      }
  return dirs;
}

}  // namespace detail

/// Checks G <= F pointwise on probe and random unit directions, and
/// sys(G) = sys(F) by exact enumeration on both sides.
inline MinorantReport verify_riemannian_minorant(const GaugeSpec& spec, const Matrix& gram, int samples,
                                                 std::uint64_t seed, double cap = kDefaultEnumerationCap,
                                                 std::optional<double> known_systole = std::nullopt) {
  const GaugeSpec minorant = GaugeSpec::ellipsoid(gram);
  require_dim(spec.dim(), minorant.dim(), "verify_riemannian_minorant");
  const int n = spec.dim();

  MinorantReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.worst_violation = -kInfinity;

  auto consider = [&](const Vector& v) {
    const double f = gauge(spec, v);
    const double g = gauge(minorant, v);
    const double violation = (g - f) / f;
    if (violation > rep.worst_violation) {
      rep.worst_violation = violation;
      rep.worst_direction = v;
    }
  };
  for (const Vector& v : detail::probe_directions(n)) consider(v);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    Vector v(n);
    for (int k = 0; k < n; ++k) v[k] = normal(rng);
    if (v.norm() > 1e-12) consider(v.normalized());
  }
  rep.pointwise_ok = rep.worst_violation <= 1e-9;

  rep.norm_systole = known_systole ? *known_systole : systole(spec, cap).s;
  rep.minorant_systole = systole(minorant, cap).s;
  rep.systoles_match = std::abs(rep.norm_systole - rep.minorant_systole) <= 1e-12 * rep.norm_systole;
  return rep;
}

// ---------------------------------------------------------------------------
// Case classification

struct CaseClassification {
  LowerBoundCase tag = LowerBoundCase::HZOnly;
  std::optional<Matrix> minorant_gram;
  std::optional<MinorantReport> minorant_report;
  std::string notes;
  bool equality_for_all_capacities() const {
    return tag != LowerBoundCase::HZOnly && tag != LowerBoundCase::UpperBoundOnly;
  }
};

struct ClassifyOptions {
  std::optional<Matrix> user_gram;
  /// Whether capacities c >= c_HZ are in scope; without it and without a
  /// minorant only the upper bound is certified.
  bool assume_hz = true;
  int minorant_samples = 1000;
  std::uint64_t seed = 0;
  double enumeration_cap = kDefaultEnumerationCap;
};

namespace detail {

struct BuiltinMinorant {
  LowerBoundCase tag;
  Matrix gram;
};

inline std::optional<BuiltinMinorant> builtin_minorant(const GaugeSpec& spec) {
  const int n = spec.dim();
  if (const auto* f = spec.as<EllipsoidNorm>()) return BuiltinMinorant{LowerBoundCase::Riemannian, f->gram};
  if (const auto* f = spec.as<LpNorm>()) {
    // ||v||_p >= ||v||_2 for p <= 2, with equality on the coordinate axes.
    if (f->exponent <= 2.0) {
      return BuiltinMinorant{f->exponent == 2.0 ? LowerBoundCase::Riemannian : LowerBoundCase::LpWithSmallExponent,
                             f->scale * f->scale * Matrix::Identity(n, n)};
    }
    return std::nullopt;
  }
  if (const auto* f = spec.as<PullbackNorm>()) {
    auto base = builtin_minorant(*f->base);
    if (!base) return std::nullopt;
    Matrix g = f->map.transpose() * base->gram * f->map;
    return BuiltinMinorant{base->tag, 0.5 * (g + g.transpose())};
  }
  return std::nullopt;
}

}  // namespace detail

inline CaseClassification classify_case(const GaugeSpec& spec, double s, const ClassifyOptions& opts = {}) {
  CaseClassification out;
  if (auto builtin = detail::builtin_minorant(spec)) {
    if (builtin->tag == LowerBoundCase::Riemannian) {
      out.tag = LowerBoundCase::Riemannian;
      out.minorant_gram = builtin->gram;
      out.notes = "norm is induced by a flat Riemannian metric; equality holds for every normalized capacity";
      return out;
    }
    MinorantReport rep =
        verify_riemannian_minorant(spec, builtin->gram, opts.minorant_samples, opts.seed, opts.enumeration_cap, s);
    if (rep.passed()) {
      out.tag = builtin->tag;
      out.minorant_gram = builtin->gram;
      out.minorant_report = rep;
      out.notes = "l^p norm with p <= 2 dominates a scaled Euclidean norm with the same systole; "
                  "equality holds for every normalized capacity";
      return out;
    }
  }
  if (opts.user_gram) {
    MinorantReport rep =
        verify_riemannian_minorant(spec, *opts.user_gram, opts.minorant_samples, opts.seed, opts.enumeration_cap, s);
    out.minorant_report = rep;
    if (rep.passed()) {
      out.tag = LowerBoundCase::MinorantProvided;
      out.minorant_gram = *opts.user_gram;
      out.notes = "user-supplied flat Riemannian minorant verified (G <= F, sys(G) = sys(F)); "
                  "equality holds for every normalized capacity";
      return out;
    }
  }
  if (opts.assume_hz) {
    out.tag = LowerBoundCase::HZOnly;
    out.notes = std::string("equality certified for capacities c >= c_HZ using ") + kLagrangianProductCitation +
                "; equality for all normalized capacities is not certified";
  } else {
    out.tag = LowerBoundCase::UpperBoundOnly;
    out.notes = "no Riemannian minorant and c >= c_HZ not assumed; only c <= 2 sys is certified";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lower bound

struct LowerCertificate {
  double s = 0.0;
  /// No nonzero lattice vector in the open body s*K.
  bool lattice_check = false;
  bool exhaustive = false;
  int inclusion_samples = 0;
  int inclusion_failures = 0;
  double hz_constant = kLagrangianProductCapacity;
  std::string citation = kLagrangianProductCitation;

  bool holds() const { return lattice_check && inclusion_failures == 0; }
  /// "certified", "probable" (oracle enumeration) or "failed".
  std::string status() const {
    if (!holds()) return "failed";
    return exhaustive ? "certified" : "probable";
  }
};

/// Evidence for c >= (s/2) c(K x K*): the open-body lattice check and a
/// sampled check that (s/2)K x K* lies in the bundle with (s/2)K meeting no
/// lattice translate of itself.
inline LowerCertificate lower_certificate(const GaugeSpec& spec, double s, int samples = 1000,
                                          std::uint64_t seed = 0, double cap = kDefaultEnumerationCap) {
  if (!(s > 0)) throw PreconditionError("lower_certificate: systole must be positive");
  const int n = spec.dim();
  LowerCertificate cert;
  cert.s = s;
  cert.exhaustive = has_exact_dual(spec);
  cert.lattice_check = enumerate_short_vectors(spec, s * (1.0 - 1e-12), cap).empty();

  const auto translates = enumerate_short_vectors(spec, s, cap);
  const auto covectors = sample_disc_bundle(spec, samples, seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double half = 0.5 * s;
  for (int i = 0; i < samples; ++i) {
    Vector dir(n);
    for (int k = 0; k < n; ++k) dir[k] = normal(rng);
    const double fd = gauge(spec, dir);
    if (!(fd > 0)) continue;
    const Vector v = dir * (half * unit(rng) / fd);
    bool ok = gauge(spec, v) < half && dual_gauge(spec, covectors[static_cast<std::size_t>(i)].p) < 1.0;
    for (const auto& w : translates) {
      const Vector wr = detail::to_real(w);
      if (gauge(spec, v + wr) < half || gauge(spec, v - wr) < half) ok = false;
    }
    ++cert.inclusion_samples;
    if (!ok) ++cert.inclusion_failures;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// The full certificate

struct CapacityOptions {
  int samples = 10000;
  std::uint64_t seed = 0;
  bool assume_hz = true;
  std::optional<Matrix> minorant_gram;
  double enumeration_cap = kDefaultEnumerationCap;
  EmbeddingTolerances tolerances;
  int lower_samples = 1000;
  int minorant_samples = 1000;
};

struct CapacityCertificate {
  double value;
  SystoleResult systole;
  UnimodularMatrix basis;
  Vector widths;
  double r1;
  EmbeddingReport upper_report;
  LowerCertificate lower;
  CaseClassification classification;
  std::string notes;

  bool lower_lattice_check() const { return lower.lattice_check; }
  LowerBoundCase case_tag() const { return classification.tag; }
  double cylinder_identity_error() const { return std::abs(kPi * r1 * r1 - 2.0 * widths[0]); }
  double theorem_identity_error() const { return std::abs(value - 2.0 * systole.s); }

  bool upper_certified() const {
    return upper_report.passed() && cylinder_identity_error() <= 1e-12 * std::max(1.0, value);
  }
  /// The value is the capacity (not just an upper bound) for the classified
  /// class of capacities.
  bool equality_certified() const {
    return upper_certified() && lower.holds() && classification.tag != LowerBoundCase::UpperBoundOnly;
  }
  bool valid() const {
    return upper_certified() && theorem_identity_error() <= 1e-12 * std::max(1.0, value) &&
           (classification.tag == LowerBoundCase::UpperBoundOnly || lower.holds());
  }
};

inline CapacityCertificate capacity(const GaugeSpec& spec, const CapacityOptions& opts = {}) {
  ReducedNorm red = reduce_norm(spec, opts.enumeration_cap);
  const Vector widths = coordinate_widths(red.spec_a);
  const double s = red.systole.s;
  const double r1 = std::sqrt(2.0 * widths[0] / kPi);

  EmbeddingReport upper =
      verify_embedding_samples(spec, red.basis, widths, opts.samples, opts.seed, opts.tolerances);
  LowerCertificate lower = lower_certificate(spec, s, opts.lower_samples, opts.seed, opts.enumeration_cap);

  ClassifyOptions copts;
  copts.user_gram = opts.minorant_gram;
  copts.assume_hz = opts.assume_hz;
  copts.minorant_samples = opts.minorant_samples;
  copts.seed = opts.seed;
  copts.enumeration_cap = opts.enumeration_cap;
  CaseClassification cls = classify_case(spec, s, copts);

  std::string notes = cls.notes;
  if (!red.systole.exhaustive) {
    notes += "; oracle norm: enumeration bounds are approximate, systole not exhaustively certified";
  }
  if (cls.tag == LowerBoundCase::UpperBoundOnly) notes += "; value is an upper bound only";

  // pi r_1^2 = 2 s_1 and s_1 = f(u) = sys.
  const double value = 2.0 * widths[0];
  return CapacityCertificate{value,  red.systole,     red.basis,      widths,          r1,
                             upper,  std::move(lower), std::move(cls), std::move(notes)};
}

}  // namespace systocap
