#include <loewner/explicit_family.hpp>
#include <loewner/forward_solver.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace loewner;

namespace {

std::vector<double> s_grid(double s_max, int n) {
  std::vector<double> s;
  for (int i = 0; i <= n; ++i) s.push_back(s_max * i / n);
  return s;
}

}  // namespace

TEST(Params, Kappa5) {
  const FamilyParams p = params_from_kappa(5.0);
  EXPECT_EQ(p.regime, Regime::collision);
  EXPECT_NEAR(p.theta, 0.75, 1e-15);
  EXPECT_NEAR(p.A, 4.0, 1e-14);
  EXPECT_NEAR(p.B, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(p.endpoint - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(p.collision_angle(), pi / 4.0, 1e-14);
}

TEST(Params, KappaThreeRootTwo) {
  const FamilyParams p = params_from_kappa(3.0 * std::sqrt(2.0));
  EXPECT_NEAR(p.theta, 0.5, 1e-14);
  EXPECT_NEAR(p.A, 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(p.B, std::sqrt(2.0), 1e-14);
}

TEST(Params, Kappa2) {
  const FamilyParams p = params_from_kappa(2.0);
  EXPECT_EQ(p.regime, Regime::spiral);
  EXPECT_NEAR(p.theta, -pi / 6.0, 1e-15);
  EXPECT_NEAR(std::abs(p.beta - cplx(1.0, std::sqrt(3.0))), 0.0, 1e-15);
}

TEST(Params, Kappa4AndZero) {
  const FamilyParams p = params_from_kappa(4.0);
  EXPECT_EQ(p.regime, Regime::tangential);
  EXPECT_EQ(p.endpoint, cplx(2.0, 0.0));
  EXPECT_EQ(params_from_kappa(0.0).regime, Regime::vertical);
  EXPECT_THROW(params_from_kappa(NAN), ArgumentError);
}

TEST(Params, NegativeKappaReflects) {
  const FamilyParams p = params_from_kappa(-5.0), q = params_from_kappa(5.0);
  EXPECT_EQ(p.sign, -1);
  EXPECT_EQ(p.theta, q.theta);
  EXPECT_EQ(p.B, -q.B);
  EXPECT_NEAR(std::abs(p.endpoint - cplx(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(Params, AlgebraicIdentities) {
  for (double k : {4.01, 4.1, 5.0, 8.0, 20.0, 100.0}) {
    const FamilyParams p = params_from_kappa(k);
    EXPECT_NEAR(p.A * p.B, 4.0, 1e-12);
    EXPECT_NEAR(p.A + p.B, k, 1e-12 * k);
  }
  for (double k : {4.1, 5.0, 8.0, 20.0}) {
    const double q = std::sqrt(1.0 - 16.0 / (k * k));
    EXPECT_NEAR(params_from_kappa(k).collision_angle(), pi * (1.0 - q) / (1.0 + q), 1e-12);
  }
  for (double k : {0.5, 1.0, 2.0, 3.0, 3.9}) {
    const FamilyParams p = params_from_kappa(k);
    EXPECT_NEAR(-4.0 * std::sin(p.theta), k, 1e-12);
    EXPECT_NEAR(std::abs(p.beta), 2.0, 1e-12);
    EXPECT_NEAR(2.0 * p.beta.real(), k, 1e-12);
  }
}

TEST(KMap, TangentialTip) {
  const FamilyParams p = params_from_kappa(4.0);
  EXPECT_NEAR(std::abs(k_map(p, 4.0) - cplx(0.0, pi)), 0.0, 1e-14);
  EXPECT_THROW(k_map(p, 2.0), DomainError);
}

TEST(KMap, CollisionCriticalPoint) {
  const FamilyParams p = params_from_kappa(5.0);
  const double h = 1e-5;
  const cplx d = (k_map(p, cplx(5.0 + h, 1e-12)) - k_map(p, cplx(5.0 - h, 1e-12))) / (2.0 * h);
  EXPECT_LT(std::abs(d), 1e-8);
  EXPECT_LT(std::abs(k_derivative(p, 5.0)), 1e-14);
}

TEST(KMap, SpiralNormalization) {
  for (double k : {1.0, 2.0, 3.0}) EXPECT_NEAR(std::abs(k_map(params_from_kappa(k), k) - 1.0), 0.0, 1e-14);
}

TEST(KMap, BranchLimitsAlongPositiveAxis) {
  const FamilyParams c = params_from_kappa(5.0);
  EXPECT_NEAR(std::arg(k_map(c, 1e8)), pi * c.theta, 1e-12);
  EXPECT_NEAR(std::arg(k_map(c, 4.5)), pi * c.theta, 1e-12);
  // on (B, A) the factor (z-A)^{1-theta} contributes arg pi(1-theta)
  EXPECT_NEAR(std::fabs(std::arg(k_map(c, 2.0))), pi, 1e-12);
}

TEST(KInverse, RoundTripInterior) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> X(-3.0, 6.0), Y(0.3, 3.0);
  for (double k : {5.0, 2.0, 4.0, -3.0}) {
    const FamilyParams p = params_from_kappa(k);
    for (int i = 0; i < 20; ++i) {
      const cplx z(X(rng), Y(rng));
      const cplx w = k_map(p, z);
      const cplx back = k_inverse(p, w, z + 0.01);
      EXPECT_NEAR(std::abs(back - z), 0.0, 1e-10) << "kappa " << k << " z " << z;
    }
  }
}

TEST(KInverse, SpiralStart) {
  const FamilyParams p = params_from_kappa(2.0);
  EXPECT_NEAR(std::abs(k_inverse(p, 1.0, 2.0) - 2.0), 0.0, 1e-12);
}

TEST(KInverse, TangentialFarAlongFlow) {
  const FamilyParams p = params_from_kappa(4.0);
  const Trace g = trace_explicit(p, s_grid(20.0, 200));
  const cplx z = g.pts.back().z;
  EXPECT_LT(std::abs(k_map(p, z) - (cplx(0.0, pi) + 10.0)), 1e-10);
}

TEST(Trace, StartsAtKappa) {
  for (double k : {5.0, 3.0, 4.0, -2.0, 0.0}) {
    const Trace g = trace_explicit(params_from_kappa(k), {0.0, 0.1});
    EXPECT_NEAR(std::abs(g.pts.front().z - k), 0.0, 1e-12) << k;
  }
}

TEST(Trace, HalfCircle) {
  const Trace g = trace_explicit(params_from_kappa(3.0 * std::sqrt(2.0)), s_grid(40.0, 1000));
  for (const auto& q : g.pts) EXPECT_NEAR(std::abs(q.z - 2.0 * std::sqrt(2.0)), std::sqrt(2.0), 1e-8);
}

TEST(Trace, CollisionEndpointAndAngle) {
  const FamilyParams p = params_from_kappa(5.0);
  const Trace g = trace_explicit(p, s_grid(60.0, 600));
  const cplx z = g.pts.back().z;
  EXPECT_LT(std::abs(z - 1.0), 1e-6);
  // measured against [B, +inf) the interior angle is pi(1-theta)
  EXPECT_NEAR(std::arg(z - 1.0), pi / 4.0, 1e-4);
}

TEST(Trace, SpiralApproachesBeta) {
  const FamilyParams p = params_from_kappa(2.0);
  const Trace g = trace_explicit(p, s_grid(40.0, 800));
  EXPECT_LT(std::abs(g.pts.back().z - p.beta), 1e-6);
}

TEST(Trace, TangentialContact) {
  const Trace g = trace_explicit(params_from_kappa(4.0), s_grid(200.0, 800));
  const cplx z = g.pts.back().z;
  EXPECT_LT(std::abs(z - 2.0), 0.03);
  EXPECT_LT(std::fabs(z.imag() / (z.real() - 2.0)), 0.05);
}

TEST(Trace, ReflectionSymmetry) {
  for (double k : {5.0, 2.0, 4.0}) {
    const auto s = s_grid(10.0, 100);
    const Trace a = trace_explicit(params_from_kappa(k), s), b = trace_explicit(params_from_kappa(-k), s);
    for (std::size_t i = 0; i < a.size(); ++i)
      EXPECT_NEAR(std::abs(a.pts[i].z - cplx(-b.pts[i].z.real(), b.pts[i].z.imag())), 0.0, 1e-12);
  }
}

TEST(GExplicit, IdentityAtZero) {
  EXPECT_EQ(g_explicit(params_from_kappa(5.0), 0.0, cplx(0.3, 0.7)), cplx(0.3, 0.7));
}

TEST(GExplicit, LoewnerResidual) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> T(0.05, 0.8), X(-3.0, 6.0), Y(1.5, 4.0);
  for (double k : {5.0, 2.0, 4.0, -3.0}) {
    const FamilyParams p = params_from_kappa(k);
    for (int i = 0; i < 20; ++i) {
      const double t = T(rng), h = 1e-5;
      const cplx z(X(rng), Y(rng));
      const cplx g = g_explicit(p, t, z);
      const cplx dg = (g_explicit(p, t + h, z) - g_explicit(p, t - h, z)) / (2.0 * h);
      EXPECT_LT(std::abs(dg - 2.0 / (g - k * std::sqrt(1.0 - t))), 1e-6) << k << ' ' << t << ' ' << z;
    }
  }
}

TEST(GExplicit, HydrodynamicExpansion) {
  const double R = 1e4;
  for (double k : {5.0, 2.0, 4.0})
    for (double t : {0.1, 0.5, 0.9}) {
      const cplx z(0.0, R);
      EXPECT_LT(std::abs(g_explicit(params_from_kappa(k), t, z) - z - 2.0 * t / z), 1e-6);
    }
}

TEST(GExplicit, MatchesChain) {
  for (double k : {5.0, 2.0}) {
    const DrivingTerm l = DrivingTerm::sqrt_family(k);
    SolverConfig cfg;
    cfg.n_steps = 4096;
    const double t = 0.5;
    const MapChain c = build_chain(l, make_grid(t, 1.0, cfg));
    const cplx z(1.0, 2.0);
    EXPECT_LT(std::abs(c.forward(z) - g_explicit(params_from_kappa(k), t, z)), 1e-6);
  }
}

TEST(GExplicit, TimeChangedEquations) {
  // G = g/sqrt(1-t) solves dG/ds = 2/(G-kappa) + G/2, and F = G^{-1} solves dF/ds = F'(2/(kappa-z) - z/2)
  const double k = 5.0, s = 0.7, h = 1e-5;
  const FamilyParams p = params_from_kappa(k);
  auto G = [&](double ss, cplx z) {
    const double t = -std::expm1(-ss);
    return g_explicit(p, t, z) / std::sqrt(1.0 - t);
  };
  const cplx z(1.5, 2.5);
  const cplx g = G(s, z), dg = (G(s + h, z) - G(s - h, z)) / (2.0 * h);
  EXPECT_LT(std::abs(dg - (2.0 / (g - k) + 0.5 * g)), 1e-6);
  // F at a fixed image point w through the inverse of G
  const cplx w = g;
  auto F = [&](double ss) {
    cplx x = z;
    for (int it = 0; it < 30; ++it) {
      const double e = 1e-7;
      const cplx d = (G(ss, x + e) - G(ss, x - e)) / (2.0 * e);
      x -= (G(ss, x) - w) / d;
    }
    return x;
  };
  const cplx f = F(s), df = (F(s + h) - F(s - h)) / (2.0 * h);
  const double e = 1e-6;
  const cplx fprime = 1.0 / ((G(s, f + e) - G(s, f - e)) / (2.0 * e));
  EXPECT_LT(std::abs(df / fprime - (2.0 / (k - w) - 0.5 * w)), 1e-5);
}

TEST(GExplicit, InsideHullRejected) {
  const FamilyParams p = params_from_kappa(5.0);
  const Trace g = trace_explicit(p, s_grid(1.0, 10));
  EXPECT_THROW(g_explicit(p, 0.5, g.pts[3].z), DomainError);
}
