#include <loewner/explicit_family.hpp>
#include <loewner/forward_solver.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace loewner;

namespace {

const cplx I(0.0, 1.0);

double sup_vs(const Trace& g, const std::function<cplx(double)>& exact) {
  double e = 0.0;
  for (const auto& p : g.pts) e = std::max(e, std::abs(p.z - exact(p.t)));
  return e;
}

}  // namespace

TEST(Grid, UniformAndGeometric) {
  SolverConfig cfg;
  cfg.n_steps = 4;
  const Grid u = make_grid(1.0, 1.0, cfg);
  ASSERT_EQ(u.cells(), 4u);
  EXPECT_EQ(u.t.back(), 1.0);
  EXPECT_EQ(u.rem.back(), 0.0);
  cfg.n_steps = 64;
  cfg.grid = GridKind::geometric_s;
  const Grid g = make_grid(1.0, 1.0, cfg);
  EXPECT_EQ(g.cells(), 64u);
  for (std::size_t k = 1; k < g.t.size(); ++k) {
    EXPECT_GE(g.t[k], g.t[k - 1]);
    EXPECT_LT(g.rem[k], g.rem[k - 1]);
  }
  EXPECT_EQ(g.rem.back(), 0.0);
  EXPECT_LT(g.rem[g.rem.size() - 2], 1e-15);
}

TEST(Grid, InvalidConfig) {
  SolverConfig cfg;
  cfg.n_steps = 0;
  EXPECT_THROW(validate(cfg), ArgumentError);
  cfg = SolverConfig{};
  cfg.tail_fraction = 1.0;
  EXPECT_THROW(validate(cfg), ArgumentError);
}

TEST(BuildChain, ZeroDriving) {
  SolverConfig cfg;
  cfg.n_steps = 4;
  const MapChain c = build_chain(DrivingTerm::constant(0.0), cfg);
  ASSERT_EQ(c.size(), 4u);
  for (const auto& s : c.steps()) {
    EXPECT_EQ(s.center, 0.0);
    EXPECT_DOUBLE_EQ(s.capacity, 0.25);
  }
  EXPECT_DOUBLE_EQ(c.total_capacity(), 1.0);
}

TEST(BuildChain, GeometricCapacitiesDecay) {
  SolverConfig cfg;
  cfg.n_steps = 128;
  cfg.grid = GridKind::geometric_s;
  const MapChain c = build_chain(DrivingTerm::sqrt_family(4.0), cfg);
  const auto& s = c.steps();
  const std::size_t split = s.size() - 60;
  for (std::size_t k = split; k + 2 < s.size(); ++k) {
    EXPECT_LT(s[k + 1].capacity, s[k].capacity);
    EXPECT_NEAR(s[k + 1].capacity / s[k].capacity, s[split + 1].capacity / s[split].capacity, 1e-9);
  }
  EXPECT_NEAR(c.total_capacity(), 1.0, 1e-14);
}

TEST(BuildChain, ConstantIsTranslate) {
  SolverConfig cfg;
  cfg.n_steps = 16;
  const MapChain a = build_chain(DrivingTerm::constant(0.0), cfg), b = build_chain(DrivingTerm::constant(1.5), cfg);
  for (cplx z : {cplx(0.3, 1.0), cplx(-2.0, 0.5)})
    EXPECT_NEAR(std::abs(b.forward(z + 1.5) - (a.forward(z) + 1.5)), 0.0, 1e-13);
}

TEST(SolveTrace, ZeroDriving) {
  SolverConfig cfg;
  cfg.n_steps = 4096;
  const Trace g = solve_trace(DrivingTerm::constant(0.0), cfg);
  EXPECT_LE(sup_vs(g, [](double t) { return 2.0 * I * std::sqrt(t); }), 2e-3);
  EXPECT_NEAR(std::abs(g.pts.back().z - 2.0 * I), 0.0, 1e-12);
}

TEST(SolveTrace, ConstantDriving) {
  SolverConfig cfg;
  cfg.n_steps = 1024;
  const Trace g = solve_trace(DrivingTerm::constant(-0.4), cfg);
  EXPECT_LE(sup_vs(g, [](double t) { return -0.4 + 2.0 * I * std::sqrt(t); }), 2e-3);
}

TEST(SolveTrace, NeverBelowAxis) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> A(-2.0, 2.0);
  for (int i = 0; i < 5; ++i) {
    const double a = A(rng), b = A(rng);
    const DrivingTerm l = DrivingTerm::from_function(
        [a, b](double t, double) { return a * std::sin(4.0 * t) + b * t * t; }, 1.0, 1.0, FormTag{FormKind::analytic});
    SolverConfig cfg;
    cfg.n_steps = 256;
    for (const auto& p : solve_trace(l, cfg).pts) EXPECT_GE(p.z.imag(), -1e-9);
  }
}

TEST(SolveTrace, RefinementOrder) {
  // doubling n at least roughly halves the error against exact oracles
  for (double k : {2.0, 5.0}) {
    const FamilyParams p = params_from_kappa(k);
    std::vector<double> s;
    for (int i = 0; i <= 200; ++i) s.push_back(-std::log1p(-0.9 * i / 200.0));
    const Trace ex = trace_explicit(p, s);
    double err[2];
    for (int j = 0; j < 2; ++j) {
      const DrivingTerm l = DrivingTerm::sqrt_family(k, 0.0, 1.0, 0.9);
      SolverConfig cfg;
      cfg.n_steps = 512 << j;
      const MapChain c = build_chain(l, cfg);
      double e = 0.0;
      for (const auto& q : ex.pts) {
        const std::size_t m = static_cast<std::size_t>(std::lround(q.t / 0.9 * cfg.n_steps));
        const double r = q.rem;
        if (std::fabs(q.t - 0.9 * m / cfg.n_steps) > 1e-12) continue;
        e = std::max(e, std::abs(c.inverse(l.at(q.t, r), m) - q.z));
      }
      err[j] = e;
    }
    EXPECT_GE(std::log2(err[0] / err[1]), 0.5) << k << ' ' << err[0] << ' ' << err[1];
  }
}

TEST(SolveTrace, Reflection) {
  const DrivingTerm l = DrivingTerm::from_function([](double t, double) { return std::sin(5.0 * t) + t; }, 1.0, 1.0,
                                                   FormTag{FormKind::analytic});
  SolverConfig cfg;
  cfg.n_steps = 300;
  const Trace a = solve_trace(l, cfg), b = mirror(solve_trace(reflect_driving(l), cfg));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.pts[i].z.real(), b.pts[i].z.real());
    EXPECT_EQ(a.pts[i].z.imag(), b.pts[i].z.imag());
  }
}

TEST(SolveTrace, ConcatenationIsComposition) {
  const DrivingTerm l = DrivingTerm::from_function([](double t, double) { return std::cos(3.0 * t); }, 1.0, 1.0,
                                                   FormTag{FormKind::analytic});
  SolverConfig cfg;
  cfg.n_steps = 100;
  const MapChain c = build_chain(l, cfg);
  std::vector<SlitStep> s1(c.steps().begin(), c.steps().begin() + 37), s2(c.steps().begin() + 37, c.steps().end());
  const MapChain c1(s1), c2(s2);
  for (cplx z : {cplx(0.1, 2.0), cplx(3.0, 0.2)}) EXPECT_EQ(c.forward(z), c2.forward(c1.forward(z)));
}

TEST(SolveTrace, StabilityInSupNorm) {
  const auto base = [](double t) { return std::sin(2.0 * t); };
  SolverConfig cfg;
  cfg.n_steps = 1024;
  const DrivingTerm l1 = DrivingTerm::from_function([&](double t, double) { return base(t); }, 1.0, 1.0,
                                                    FormTag{FormKind::analytic});
  const Trace g1 = solve_trace(l1, cfg);
  double prev = std::numeric_limits<double>::infinity();
  for (double d : {1e-2, 1e-3}) {
    const DrivingTerm l2 = DrivingTerm::from_function([&, d](double t, double) { return base(t) + d * std::cos(7.0 * t); },
                                                      1.0, 1.0, FormTag{FormKind::analytic});
    const Trace g2 = solve_trace(l2, cfg);
    double e = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) e = std::max(e, std::abs(g1.pts[i].z - g2.pts[i].z));
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(SolveG, IdentityAtZero) {
  SigmaTerm sig;
  sig.exact = [](double) { return 5.0; };
  const auto G = solve_G(sig, {0.0}, SolverConfig{});
  EXPECT_EQ(G[0].forward(cplx(0.3, 0.2)), cplx(0.3, 0.2));
}

TEST(SolveG, MatchesExplicit) {
  SigmaTerm sig;
  sig.exact = [](double) { return 5.0; };
  SolverConfig cfg;
  cfg.n_steps = 4096;
  const auto G = solve_G(sig, {1.0}, cfg);
  const double t = -std::expm1(-1.0);
  const cplx z(1.0, 2.0);
  EXPECT_LT(std::abs(G[0].forward(z) - g_explicit(params_from_kappa(5.0), t, z) / std::sqrt(1.0 - t)), 1e-6);
}

TEST(SolveG, Semigroup) {
  SigmaTerm sig;
  sig.exact = [](double s) { return 3.0 + std::sin(2.0 * s); };
  SolverConfig cfg;
  cfg.n_steps = 2048;
  cfg.refinement_levels = 2;
  const auto G = solve_G(sig, {0.3, 0.6}, cfg);
  const auto Gu = solve_G(sig.shifted(0.3), {0.3}, cfg);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> X(-3.0, 3.0), Y(0.2, 3.0);
  for (int i = 0; i < 10; ++i) {
    const cplx z(X(rng), Y(rng));
    EXPECT_LT(std::abs(G[1].forward(z) - Gu[0].forward(G[0].forward(z))), 1e-6);
  }
}

TEST(SolveG, SampledSigmaRange) {
  const SigmaTerm sig = SigmaTerm::from_function([](double) { return 1.0; }, 2.0);
  SigmaTerm sampled = sig;
  sampled.exact = nullptr;
  EXPECT_THROW(solve_G(sampled, {3.0}, SolverConfig{}), ArgumentError);
  EXPECT_THROW(solve_G(sampled, {-1.0}, SolverConfig{}), ArgumentError);
}
