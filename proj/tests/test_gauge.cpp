#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "systocap/gauge.hpp"

using namespace systocap;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<long>(xs.size()));
  long i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Matrix linf_halfspaces() {
  Matrix a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  return a;
}

Matrix cross_vertices() {
  Matrix v(4, 2);
  v << 1, 0, -1, 0, 0, 1, 0, -1;
  return v;
}

}  // namespace

TEST(Gauge, ClosedFormValues) {
  EXPECT_EQ(gauge(GaugeSpec::lp(2, 1.0), vec({1, 1})), 2.0);
  EXPECT_EQ(gauge(GaugeSpec::ellipsoid(diag2(4, 9)), vec({1, 0})), 2.0);
  const auto linf = GaugeSpec::polytope_h(linf_halfspaces(), Vector::Ones(4));
  EXPECT_DOUBLE_EQ(gauge(linf, vec({0.3, -0.7})), 0.7);
  EXPECT_EQ(gauge(GaugeSpec::lp(2, kInfinity), vec({0.3, -0.7})), 0.7);
  EXPECT_EQ(gauge(GaugeSpec::lp(3, 2.0), Vector::Zero(3)), 0.0);
}

TEST(Gauge, PolytopeVGaugeMatchesCrossPolytope) {
  const auto cross = GaugeSpec::polytope_v(cross_vertices());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 200; ++i) {
    const Vector v = vec({normal(rng), normal(rng)});
    EXPECT_NEAR(gauge(cross, v), v.cwiseAbs().sum(), 1e-12 * v.cwiseAbs().sum());
  }
}

TEST(Gauge, DualValues) {
  EXPECT_EQ(dual_gauge(GaugeSpec::lp(2, 1.0), vec({1, -1})), 1.0);
  EXPECT_DOUBLE_EQ(dual_gauge(GaugeSpec::ellipsoid(diag2(4, 9)), vec({2, 0})), 1.0);

  // Brute force over the four vertices: max |(3,4).v_i| = 4.
  const Matrix verts = cross_vertices();
  const Vector p = vec({3, 4});
  double brute = 0;
  for (long i = 0; i < verts.rows(); ++i) brute = std::max(brute, std::abs(verts.row(i).dot(p)));
  ASSERT_EQ(brute, 4.0);
  EXPECT_EQ(dual_gauge(GaugeSpec::polytope_v(verts), p), brute);

  // H form of the l^inf ball: dual is l^1.
  const auto linf = GaugeSpec::polytope_h(linf_halfspaces(), Vector::Ones(4));
  EXPECT_NEAR(dual_gauge(linf, vec({3, -4})), 7.0, 1e-12);
}

TEST(Gauge, DimensionMismatchIsRejected) {
  EXPECT_THROW(gauge(GaugeSpec::lp(2, 1.0), vec({1, 2, 3})), DimensionMismatch);
  EXPECT_THROW(dual_gauge(GaugeSpec::lp(3, 1.0), vec({1, 2})), DimensionMismatch);
}

TEST(Gauge, DualSpecFamilies) {
  const auto l2 = dual_spec(GaugeSpec::lp(2, 2.0));
  ASSERT_NE(l2.as<LpNorm>(), nullptr);
  EXPECT_EQ(l2.as<LpNorm>()->exponent, 2.0);

  const auto l1dual = dual_spec(GaugeSpec::lp(2, 1.0));
  ASSERT_NE(l1dual.as<LpNorm>(), nullptr);
  EXPECT_TRUE(std::isinf(l1dual.as<LpNorm>()->exponent));

  const auto edual = dual_spec(GaugeSpec::ellipsoid(diag2(4, 9)));
  ASSERT_NE(edual.as<EllipsoidNorm>(), nullptr);
  EXPECT_NEAR((edual.as<EllipsoidNorm>()->gram - diag2(0.25, 1.0 / 9.0)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Gauge, ConstructionRejectsDegenerateInput) {
  EXPECT_THROW(GaugeSpec::lp(2, 0.5), InvalidSpec);
  EXPECT_THROW(GaugeSpec::lp(0, 2.0), InvalidSpec);
  EXPECT_THROW(GaugeSpec::ellipsoid(diag2(1, 0)), InvalidSpec);
  EXPECT_THROW(GaugeSpec::ellipsoid(diag2(1, 1e-13)), InvalidSpec);
  Matrix asym(2, 2);
  asym << 2, 1, 0, 2;
  EXPECT_THROW(GaugeSpec::ellipsoid(asym), InvalidSpec);
  EXPECT_THROW(GaugeSpec::polytope_v(Matrix(0, 2)), InvalidSpec);
  Matrix line(2, 2);
  line << 1, 1, -1, -1;
  EXPECT_THROW(GaugeSpec::polytope_v(line), InvalidSpec);
  Matrix lopsided(3, 2);
  lopsided << 1, 0, -1, 0, 0, 1;
  EXPECT_THROW(GaugeSpec::polytope_v(lopsided), InvalidSpec);
  EXPECT_THROW(GaugeSpec::polytope_h(linf_halfspaces(), vec({1, 1, 1, 2})), InvalidSpec);
  EXPECT_THROW(GaugeSpec::polytope_h(linf_halfspaces(), vec({1, 1, 1, -1})), InvalidSpec);
}

TEST(Gauge, SandwichRadiiClosedForms) {
  auto r = sandwich_radii(GaugeSpec::lp(2, 2.0));
  EXPECT_DOUBLE_EQ(r.r_in, 1.0);
  EXPECT_DOUBLE_EQ(r.r_out, 1.0);
  r = sandwich_radii(GaugeSpec::ellipsoid(diag2(4, 9)));
  EXPECT_NEAR(r.r_in, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.r_out, 0.5, 1e-15);
  r = sandwich_radii(GaugeSpec::lp(2, 1.0));
  EXPECT_NEAR(r.r_in, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(r.r_out, 1.0);
  EXPECT_FALSE(r.approximate);
}

TEST(Gauge, SandwichHoldsForAllFamilies) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int n : {2, 3}) {
    for (const auto& spec : oracle::builtin_family_samples(n, rng)) {
      const auto r = sandwich_radii(spec);
      ASSERT_GT(r.r_in, 0);
      ASSERT_LE(r.r_in, r.r_out * (1 + 1e-12));
      for (int i = 0; i < 300; ++i) {
        Vector v(n);
        for (int k = 0; k < n; ++k) v[k] = normal(rng);
        const double f = gauge(spec, v);
        EXPECT_LE(v.norm() / r.r_out, f * (1 + 1e-9)) << spec.family_name();
        EXPECT_LE(f, v.norm() / r.r_in * (1 + 1e-9)) << spec.family_name();
      }
    }
  }
}

TEST(Gauge, HomogeneityReversibilityHolder) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int n : {2, 3}) {
    for (const auto& spec : oracle::builtin_family_samples(n, rng)) {
      for (int i = 0; i < 1000; ++i) {
        Vector v(n), p(n);
        for (int k = 0; k < n; ++k) {
          v[k] = normal(rng);
          p[k] = normal(rng);
        }
        const double f = gauge(spec, v);
        for (double t : {0.5, 2.0, 10.0}) {
          EXPECT_LE(std::abs(gauge(spec, t * v) - t * f), 1e-12 * t * f) << spec.family_name();
        }
        EXPECT_NEAR(gauge(spec, -v), f, 1e-12 * f) << spec.family_name();
        EXPECT_LE(std::abs(p.dot(v)), f * dual_gauge(spec, p) * (1 + 1e-9)) << spec.family_name();
      }
    }
  }
}

TEST(Gauge, BidualityForBuiltinFamilies) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (int n : {2, 3}) {
    for (const auto& spec : oracle::builtin_family_samples(n, rng)) {
      const auto dual = dual_spec(spec);
      for (int i = 0; i < 1000; ++i) {
        Vector v(n), p(n);
        for (int k = 0; k < n; ++k) {
          v[k] = normal(rng);
          p[k] = normal(rng);
        }
        EXPECT_NEAR(dual_gauge(dual, v), gauge(spec, v), 1e-9 * gauge(spec, v)) << spec.family_name();
        EXPECT_NEAR(gauge(dual, p), dual_gauge(spec, p), 1e-9 * dual_gauge(spec, p)) << spec.family_name();
      }
    }
  }
}

TEST(Gauge, ScaleAndPullbackStayInFamily) {
  Matrix q(2, 2);
  q << 5, 3, 3, 2;
  const auto e = GaugeSpec::ellipsoid(q);
  const auto e3 = scale_gauge(e, 3.0);
  ASSERT_NE(e3.as<EllipsoidNorm>(), nullptr);
  EXPECT_EQ(e3.as<EllipsoidNorm>()->gram, 9.0 * q);
  EXPECT_THROW(scale_gauge(e, 0.0), PreconditionError);
  EXPECT_THROW(scale_gauge(e, -1.0), PreconditionError);

  Matrix a(2, 2);
  a << 2, 1, 3, 2;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (const auto& spec : oracle::builtin_family_samples(2, rng)) {
    const auto pb = pullback(spec, a);
    const auto scaled = scale_gauge(spec, 0.5);
    for (int i = 0; i < 50; ++i) {
      const Vector v = vec({normal(rng), normal(rng)});
      EXPECT_NEAR(gauge(pb, v), gauge(spec, a * v), 1e-12 * gauge(spec, a * v)) << spec.family_name();
      EXPECT_NEAR(gauge(scaled, v), 0.5 * gauge(spec, v), 1e-12 * gauge(spec, v)) << spec.family_name();
      // Dual transport: (f o A)*(p) = f*(A^{-T} p).
      const Vector p = vec({normal(rng), normal(rng)});
      const Vector pt = a.inverse().transpose() * p;
      EXPECT_NEAR(dual_gauge(pb, p), dual_gauge(spec, pt), 1e-9 * dual_gauge(spec, pt)) << spec.family_name();
    }
  }
}

TEST(GaugeAxioms, NormsPass) {
  const auto l1 = check_gauge_axioms(GaugeSpec::lp(2, 1.0), 1000, 7);
  EXPECT_TRUE(l1.passed());
  EXPECT_EQ(l1.tolerance, 1e-9);
  EXPECT_TRUE(check_gauge_axioms(GaugeSpec::ellipsoid(diag2(4, 9)), 1000, 7).passed());
  EXPECT_THROW(check_gauge_axioms(GaugeSpec::lp(2, 1.0), 0, 7), PreconditionError);
}

TEST(GaugeAxioms, NonReversibleOracleIsFlagged) {
  const auto skew = GaugeSpec::oracle(2, [](const Vector& v) { return v.norm() + 0.5 * v[0]; });
  const auto rep = check_gauge_axioms(skew, 1000, 7);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.tolerance, 1e-6);
  EXPECT_GT(rep.max_reversibility_violation, 0.1);
  EXPECT_NE(std::find(rep.violations.begin(), rep.violations.end(), "reversibility"), rep.violations.end());
}

TEST(GaugeAxioms, DeterministicGivenSeed) {
  const auto spec = GaugeSpec::lp(3, 3.0);
  const auto a = check_gauge_axioms(spec, 200, 42);
  const auto b = check_gauge_axioms(spec, 200, 42);
  EXPECT_EQ(a.max_triangle_violation, b.max_triangle_violation);
  EXPECT_EQ(a.max_homogeneity_violation, b.max_homogeneity_violation);
}

TEST(OracleGauge, DualIsACloseLowerBound) {
  // Oracle wrapping an ellipsoid: the numeric dual should match the closed form.
  Matrix q(2, 2);
  q << 5, 3, 3, 2;
  const auto closed = GaugeSpec::ellipsoid(q);
  const auto wrapped = GaugeSpec::oracle(2, [closed](const Vector& v) { return gauge(closed, v); });
  EXPECT_FALSE(has_exact_dual(wrapped));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 20; ++i) {
    const Vector p = vec({normal(rng), normal(rng)});
    const double exact = dual_gauge(closed, p);
    const double approx = dual_gauge(wrapped, p);
    EXPECT_LE(approx, exact * (1 + 1e-12));
    EXPECT_GE(approx, exact * (1 - 1e-9));
  }
  // The dual spec of an oracle is again an oracle.
  EXPECT_NE(dual_spec(wrapped).as<OracleNorm>(), nullptr);
}

TEST(LinearProgram, SmallBoundedProgram) {
  // max x + y s.t. |x| <= 1, |y| <= 2  ->  3
  Matrix a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector b(4);
  b << 1, 1, 2, 2;
  EXPECT_NEAR(lp::maximize_free(a, b, vec({1, 1})), 3.0, 1e-14);
  Matrix half(1, 2);
  half << 1, 0;
  EXPECT_THROW(lp::maximize_free(half, Vector::Ones(1), vec({0, 1})), std::runtime_error);
}
