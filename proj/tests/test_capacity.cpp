#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "systocap/capacity.hpp"

using namespace systocap;

namespace {

Matrix gram2(double a, double b, double c) {
  Matrix q(2, 2);
  q << a, b, b, c;
  return q;
}

CapacityOptions quick(int samples = 2000) {
  CapacityOptions o;
  o.samples = samples;
  o.lower_samples = 300;
  o.minorant_samples = 300;
  return o;
}

}  // namespace

TEST(Capacity, L1IsExactlyTwo) {
  for (int n : {2, 3}) {
    const auto c = capacity(GaugeSpec::lp(n, 1.0), quick());
    EXPECT_EQ(c.value, 2.0);
    EXPECT_EQ(c.systole.s, 1.0);
    EXPECT_EQ(c.case_tag(), LowerBoundCase::LpWithSmallExponent);
    EXPECT_TRUE(c.valid());
    EXPECT_TRUE(c.equality_certified());
  }
}

TEST(Capacity, FlatSquareTorusIsRiemannian) {
  const auto c = capacity(GaugeSpec::lp(2, 2.0), quick());
  EXPECT_NEAR(c.value, 2.0, 1e-12);
  EXPECT_EQ(c.case_tag(), LowerBoundCase::Riemannian);
  EXPECT_TRUE(c.classification.equality_for_all_capacities());
  EXPECT_TRUE(c.valid());
}

TEST(Capacity, EllipsoidExamples) {
  auto c = capacity(GaugeSpec::ellipsoid(gram2(5, 3, 2)), quick());
  EXPECT_NEAR(c.value, 2.0, 1e-12);
  EXPECT_EQ(c.systole.u, (LatticeVector{1, -1}));
  c = capacity(GaugeSpec::ellipsoid(gram2(4, 0, 9)), quick());
  EXPECT_NEAR(c.systole.s, 2.0, 1e-12);
  EXPECT_NEAR(c.value, 4.0, 1e-12);
  EXPECT_LT(c.cylinder_identity_error(), 1e-12);
}

TEST(Classify, LpExponents) {
  auto c = classify_case(GaugeSpec::lp(2, 1.5), 1.0);
  EXPECT_EQ(c.tag, LowerBoundCase::LpWithSmallExponent);
  ASSERT_TRUE(c.minorant_report);
  EXPECT_TRUE(c.minorant_report->passed());
  EXPECT_EQ(*c.minorant_gram, Matrix::Identity(2, 2));

  c = classify_case(GaugeSpec::lp(2, 4.0), 1.0);
  EXPECT_EQ(c.tag, LowerBoundCase::HZOnly);
  EXPECT_NE(c.notes.find("AKO"), std::string::npos);
  EXPECT_NE(c.notes.find("Theorem 1.7"), std::string::npos);
  EXPECT_FALSE(c.equality_for_all_capacities());

  ClassifyOptions no_hz;
  no_hz.assume_hz = false;
  EXPECT_EQ(classify_case(GaugeSpec::lp(2, 4.0), 1.0, no_hz).tag, LowerBoundCase::UpperBoundOnly);

  EXPECT_EQ(classify_case(GaugeSpec::ellipsoid(gram2(5, 3, 2)), 1.0).tag, LowerBoundCase::Riemannian);
}

TEST(Classify, ScaledLpUsesScaledIdentity) {
  const auto spec = GaugeSpec::lp(2, 1.0, 3.0);
  const auto c = classify_case(spec, 3.0);
  EXPECT_EQ(c.tag, LowerBoundCase::LpWithSmallExponent);
  EXPECT_EQ(*c.minorant_gram, 9.0 * Matrix::Identity(2, 2));
}

TEST(Classify, UserGram) {
  // The hexagonal norm max(|x|, |y|, |x + y|) dominates sqrt(x^2 + y^2 ... ) only
  // for suitable G; a scaled identity with matching systole works.
  Matrix h(6, 2);
  h << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1, -1, -1;
  const auto hex = GaugeSpec::polytope_h(h, Vector::Ones(6));
  ClassifyOptions opts;
  opts.user_gram = Matrix::Identity(2, 2);
  // max(|x|,|y|,|x+y|) < |v|_2 along (1,-1)/sqrt2, so identity is rejected.
  auto c = classify_case(hex, 1.0, opts);
  EXPECT_EQ(c.tag, LowerBoundCase::HZOnly);
  ASSERT_TRUE(c.minorant_report);
  EXPECT_FALSE(c.minorant_report->pointwise_ok);

  // G = [[1, 1/2], [1/2, 1]] satisfies G(v) <= F(v) and has systole 1.
  opts.user_gram = gram2(1, 0.5, 1);
  c = classify_case(hex, 1.0, opts);
  EXPECT_EQ(c.tag, LowerBoundCase::MinorantProvided);
  EXPECT_TRUE(c.minorant_report->passed());
}

TEST(Minorant, Examples) {
  EXPECT_TRUE(verify_riemannian_minorant(GaugeSpec::lp(2, 1.0), Matrix::Identity(2, 2), 1000, 1).passed());

  const auto l4 = verify_riemannian_minorant(GaugeSpec::lp(2, 4.0), Matrix::Identity(2, 2), 1000, 1);
  EXPECT_FALSE(l4.pointwise_ok);
  const Vector d = l4.worst_direction.normalized().cwiseAbs();
  EXPECT_NEAR(d[0], std::sqrt(0.5), 1e-2);
  EXPECT_NEAR(d[1], std::sqrt(0.5), 1e-2);
  // Independent: at (1,1)/sqrt2, |v|_2 / |v|_4 - 1 = 2^{1/4} - 1.
  EXPECT_NEAR(l4.worst_violation, std::pow(2.0, 0.25) - 1.0, 1e-6);

  const Matrix q = gram2(5, 3, 2);
  EXPECT_TRUE(verify_riemannian_minorant(GaugeSpec::ellipsoid(q), q, 1000, 1).passed());

  // Pointwise fine but systole drops: G = I/4 under l^1.
  const auto small = verify_riemannian_minorant(GaugeSpec::lp(2, 1.0), 0.25 * Matrix::Identity(2, 2), 500, 1);
  EXPECT_TRUE(small.pointwise_ok);
  EXPECT_FALSE(small.systoles_match);
}

TEST(LowerCertificate, Examples) {
  auto lc = lower_certificate(GaugeSpec::lp(2, 2.0), 1.0, 500, 3);
  EXPECT_TRUE(lc.holds());
  EXPECT_EQ(lc.status(), "certified");
  EXPECT_EQ(lc.inclusion_samples, 500);
  EXPECT_EQ(lc.hz_constant, 4.0);

  lc = lower_certificate(scale_gauge(GaugeSpec::lp(2, 2.0), 0.5), 0.5, 500, 3);
  EXPECT_TRUE(lc.holds());

  // A systole that is too large leaves lattice points inside the open body.
  lc = lower_certificate(GaugeSpec::lp(2, 2.0), 1.5, 200, 3);
  EXPECT_FALSE(lc.lattice_check);
  EXPECT_EQ(lc.status(), "failed");

  EXPECT_THROW(lower_certificate(GaugeSpec::lp(2, 2.0), 0.0), PreconditionError);
}

TEST(Capacity, UpperBoundOnlyWithoutHZ) {
  auto opts = quick();
  opts.assume_hz = false;
  const auto c = capacity(GaugeSpec::lp(2, 4.0), opts);
  EXPECT_EQ(c.case_tag(), LowerBoundCase::UpperBoundOnly);
  EXPECT_TRUE(c.valid());
  EXPECT_FALSE(c.equality_certified());
  EXPECT_NE(c.notes.find("upper bound only"), std::string::npos);
}

TEST(Capacity, InvariantUnderSL2Z) {
  std::mt19937_64 rng(17);
  const auto spec = GaugeSpec::ellipsoid(gram2(5, 3, 2));
  const double base = capacity(spec, quick(200)).value;
  for (int i = 0; i < 10; ++i) {
    const auto a = UnimodularMatrix::from_entries(oracle::random_sl2_word(rng));
    EXPECT_NEAR(capacity(pullback(spec, a), quick(200)).value, base, 1e-12 * base);
  }
}

TEST(Capacity, ScalingAndMonotonicity) {
  std::mt19937_64 rng(23);
  for (const auto& spec : oracle::builtin_family_samples(2, rng)) {
    const double c = capacity(spec, quick(200)).value;
    for (double t : {0.5, 3.0}) {
      const double ct = capacity(scale_gauge(spec, t), quick(200)).value;
      EXPECT_NEAR(ct, t * c, 1e-12 * t * c) << spec.family_name();
    }
  }
  // l^inf <= l^2 <= l^1 pointwise, so capacities are ordered the same way.
  const double cinf = capacity(GaugeSpec::lp(2, kInfinity), quick(200)).value;
  const double c2 = capacity(GaugeSpec::lp(2, 2.0), quick(200)).value;
  const double c1 = capacity(GaugeSpec::lp(2, 1.0), quick(200)).value;
  EXPECT_LE(cinf, c2);
  EXPECT_LE(c2, c1);
}

TEST(Capacity, CylinderIdentityAcrossFamilies) {
  std::mt19937_64 rng(29);
  for (int n : {2, 3}) {
    for (const auto& spec : oracle::builtin_family_samples(n, rng)) {
      const auto c = capacity(spec, quick(300));
      EXPECT_LE(c.cylinder_identity_error(), 1e-12 * c.value) << spec.family_name();
      EXPECT_LE(c.theorem_identity_error(), 1e-12 * c.value) << spec.family_name();
      EXPECT_TRUE(c.valid()) << spec.family_name();
    }
  }
}
