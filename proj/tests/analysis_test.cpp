#include <loewner/analysis.hpp>

#include <gtest/gtest.h>

using namespace loewner;

namespace {

SolverConfig deep(int n) {
  SolverConfig c;
  c.n_steps = n;
  c.grid = GridKind::geometric_s;
  c.s_span = 80.0;
  return c;
}

std::vector<double> s_grid(double s_max, int n) {
  std::vector<double> s;
  for (int i = 0; i <= n; ++i) s.push_back(s_max * i / n);
  return s;
}

}  // namespace

TEST(Renormalize, Examples) {
  const DrivingTerm l = DrivingTerm::sqrt_family(3.0);
  for (double T : {0.2, 0.9}) {
    const DrivingTerm r = renormalize_driving(l, T);
    for (double t : {0.0, 0.3, 0.99}) EXPECT_NEAR(r.at(t), 3.0 * std::sqrt(1.0 - t), 1e-14);
  }
  const DrivingTerm c = renormalize_driving(DrivingTerm::constant(0.5), 0.75);
  EXPECT_EQ(c.tag.kind, FormKind::constant);
  EXPECT_NEAR(c.at(0.4), 1.0, 1e-15);
  const DrivingTerm same = renormalize_driving(l, 0.0);
  EXPECT_EQ(same.t, l.t);
  EXPECT_THROW(renormalize_driving(l, 1.0), ArgumentError);
  EXPECT_THROW(renormalize_driving(DrivingTerm::constant(0.0, 2.0), 0.5), ContractError);
}

TEST(Renormalize, FamilyClosure) {
  const DrivingTerm l = DrivingTerm::sqrt_family(-2.5, 0.8);
  const DrivingTerm r = renormalize_driving(l, 0.64);
  EXPECT_EQ(r.tag.kind, FormKind::sqrt_family);
  EXPECT_EQ(r.tag.kappa, -2.5);
  EXPECT_NEAR(r.tag.offset, 0.8 / 0.6, 1e-15);
}

TEST(Renormalize, SemigroupOnNodes) {
  std::vector<double> t, v;
  for (int k = 0; k <= 400; ++k) {
    t.push_back(0.999 * k / 400.0);
    v.push_back(std::sin(9.0 * t.back()));
  }
  DrivingTerm l = DrivingTerm::from_samples(t, v);
  l.horizon = 1.0;
  for (std::size_t k = 0; k < l.t.size(); ++k) l.rem[k] = 1.0 - l.t[k];
  const double T1 = 0.2, T2 = 0.5;
  const DrivingTerm a = renormalize_driving(renormalize_driving(l, T1), T2);
  const DrivingTerm b = renormalize_driving(l, T1 + T2 * (1.0 - T1));
  ASSERT_EQ(a.t.size(), b.t.size());
  for (std::size_t k = 1; k < a.t.size(); ++k) {
    EXPECT_NEAR(a.rem[k], b.rem[k], 1e-15);
    EXPECT_NEAR(a.value[k], b.value[k], 1e-14);
  }
}

TEST(Renormalize, SelfSimilarTrace) {
  const DrivingTerm l = DrivingTerm::sqrt_family(5.0);
  const Trace g = solve_trace(l, SolverConfig{4096});
  const Trace gT = renormalized_trace(l, 0.75, SolverConfig{4096});
  for (std::size_t k = 0; k < g.size() && g.pts[k].t <= 0.9; ++k)
    EXPECT_LT(std::abs(g.pts[k].z - gT.pts[k].z), 1e-2);
}

TEST(Renormalize, PullDownMatchesSolver) {
  // gamma_T = g_T(gamma(T + t(1-T))) / sqrt(1-T)
  const DrivingTerm l = DrivingTerm::from_function([](double t, double) { return std::sin(3.0 * t); }, 1.0, 1.0,
                                                   FormTag{FormKind::analytic});
  const double T = 0.5;
  SolverConfig cfg;
  cfg.n_steps = 2048;
  const Trace g = solve_trace(l, cfg);
  const MapChain head = build_chain(l, make_grid(T, 1.0, SolverConfig{1024}));
  const Trace gT = solve_trace(renormalize_driving(l, T), SolverConfig{1024});
  for (std::size_t k = 1024; k < g.size(); k += 128) {
    const cplx pulled = head.forward(g.pts[k].z) / std::sqrt(1.0 - T);
    const double tt = (g.pts[k].t - T) / (1.0 - T);
    const std::size_t j = static_cast<std::size_t>(std::lround(tt * 1024));
    EXPECT_LT(std::abs(pulled - gT.pts[j].z), 2e-2) << g.pts[k].t;
  }
}

TEST(Asymptote, ExactOnTaggedSqrt) {
  const AsymptoteReport r = estimate_sqrt_asymptote(DrivingTerm::sqrt_family(3.7));
  EXPECT_EQ(r.lambda_at_1, 0.0);
  for (const auto& [t, k] : r.kappa_hats) EXPECT_NEAR(k, 3.7, 1e-12);
  EXPECT_NEAR(r.kappa_limit, 3.7, 1e-12);
  for (std::size_t i = 1; i < r.rem_n.size(); ++i) EXPECT_EQ(r.rem_n[i], std::pow(0.5, static_cast<double>(i)));
}

TEST(Asymptote, SqrtPlusLinear) {
  const DrivingTerm l = DrivingTerm::from_function(
      [](double, double r) { return 4.0 * std::sqrt(r) + r; }, 1.0, 1.0, FormTag{FormKind::analytic});
  const AsymptoteReport rep = estimate_sqrt_asymptote(l);
  for (std::size_t n = 1; n <= rep.kappa_hats.size(); ++n)
    EXPECT_NEAR(rep.kappa_hats[n - 1].second, 4.0 + std::pow(0.5, 0.5 * n), 1e-12);
  EXPECT_NEAR(rep.kappa_limit, 4.0, 1e-6);
}

TEST(Asymptote, CleanSampledSqrt) {
  std::vector<double> t, r, v;
  for (int k = 0; k <= 200; ++k) {
    const double rem = std::pow(2.0, -30.0 * k / 200.0);
    t.push_back(1.0 - rem);
    r.push_back(rem);
    v.push_back(4.0 * std::sqrt(rem));
  }
  t.front() = 0.0;
  const DrivingTerm l = DrivingTerm::from_samples(t, r, v, 1.0);
  const AsymptoteReport rep = estimate_sqrt_asymptote(l);
  EXPECT_NEAR(rep.kappa_limit, 4.0, 1e-6);
  EXPECT_TRUE(rep.truncated);
}

TEST(Asymptote, InsufficientSamples) {
  const DrivingTerm l = DrivingTerm::sqrt_family(1.0, 0.0, 1.0, 0.8);
  EXPECT_THROW(estimate_sqrt_asymptote(l), ContractError);
  EXPECT_THROW(estimate_sqrt_asymptote(DrivingTerm::sqrt_family(1.0), 1.5), ArgumentError);
}

TEST(LocalLip, Examples) {
  const DrivingTerm l = DrivingTerm::sqrt_family(4.0);
  const double v1 = local_lip_half(l, 0.01), v4 = local_lip_half(l, 0.04);
  EXPECT_LE(v1, 0.4 + 1e-12);
  EXPECT_LE(v1, v4 / 2.0 + 1e-6);
  EXPECT_EQ(local_lip_half(DrivingTerm::constant(2.0), 0.1), 0.0);
  EXPECT_THROW(local_lip_half(l, 0.0), ArgumentError);
}

TEST(LocalLip, ScaleInvariance) {
  const DrivingTerm l = DrivingTerm::from_function([](double t, double r) { return std::sin(5.0 * t) + 3.0 * std::sqrt(r); },
                                                   1.0, 1.0, FormTag{FormKind::analytic});
  for (double r : {0.5, 2.0}) EXPECT_NEAR(local_lip_half(scale_driving(l, r), 0.05), local_lip_half(l, 0.05), 1e-9);
  std::vector<double> t, v;
  for (int k = 0; k <= 300; ++k) {
    t.push_back(k / 300.0);
    v.push_back(std::sin(4.0 * t.back()));
  }
  const DrivingTerm s = DrivingTerm::from_samples(t, v);
  EXPECT_NEAR(local_lip_half(scale_driving(s, 3.0), 0.1), local_lip_half(s, 0.1), 1e-9);
  const RegularityReport rr = regularity(s, {0.1, 0.01});
  EXPECT_EQ(rr.deltas.size(), rr.local_lip_norms.size());
  for (double x : rr.local_lip_norms) EXPECT_GE(x, 0.0);
}

TEST(TailGeometry, ExplicitCollision) {
  for (double k : {4.5, 5.0, 6.0}) {
    const FamilyParams p = params_from_kappa(k);
    const TailGeometry tg = measure_tail_geometry(trace_explicit(p, s_grid(40.0, 4000)), k);
    EXPECT_EQ(tg.regime, TailRegime::collision);
    EXPECT_LT(std::abs(tg.endpoint - p.endpoint), 1e-2);
    EXPECT_NEAR(tg.angle, p.collision_angle(), 0.05);
    EXPECT_NEAR(tg.expected_angle, p.collision_angle(), 1e-12);
  }
}

TEST(TailGeometry, ExplicitSpiral) {
  for (double k : {1.0, 2.0, 3.0}) {
    const FamilyParams p = params_from_kappa(k);
    const TailGeometry tg = measure_tail_geometry(trace_explicit(p, s_grid(40.0, 4000)), k);
    EXPECT_EQ(tg.regime, TailRegime::spiral);
    EXPECT_LT(std::abs(tg.center - p.beta), 5e-2);
    EXPECT_NEAR(tg.pitch, tg.expected_pitch, 0.05 * (1.0 + std::fabs(tg.expected_pitch)));
  }
}

TEST(TailGeometry, MirroredCollision) {
  const FamilyParams p = params_from_kappa(-5.0);
  const TailGeometry tg = measure_tail_geometry(trace_explicit(p, s_grid(40.0, 4000)), -5.0);
  EXPECT_LT(std::abs(tg.endpoint - p.endpoint), 1e-2);
  EXPECT_NEAR(tg.angle, pi - pi / 4.0, 0.05);
}

TEST(TailGeometry, SolverCollisionAndSpiral) {
  const TailGeometry c = measure_tail_geometry(solve_trace(DrivingTerm::sqrt_family(5.0), deep(8192)), 5.0);
  EXPECT_EQ(c.regime, TailRegime::collision);
  EXPECT_LT(std::abs(c.endpoint - 1.0), 1e-2);
  EXPECT_NEAR(c.angle, pi / 4.0, 0.05);
  const TailGeometry s = measure_tail_geometry(solve_trace(DrivingTerm::sqrt_family(2.0), deep(8192)), 2.0);
  EXPECT_EQ(s.regime, TailRegime::spiral);
  EXPECT_LT(std::abs(s.center - cplx(1.0, std::sqrt(3.0))), 5e-2);
}

TEST(TailGeometry, Tangential) {
  const TailGeometry t = measure_tail_geometry(solve_trace(DrivingTerm::sqrt_family(4.0), deep(8192)), 4.0);
  EXPECT_EQ(t.regime, TailRegime::tangential);
  EXPECT_LT(std::abs(t.endpoint - 2.0), 2e-2);
  EXPECT_LT(t.contact_angle, 0.1);
}

TEST(TailGeometry, UnresolvedTail) {
  const Trace g = solve_trace(DrivingTerm::sqrt_family(5.0, 0.0, 1.0, 0.5), SolverConfig{64});
  EXPECT_EQ(measure_tail_geometry(g, 5.0).regime, TailRegime::undetermined);
}

TEST(IntervalLemma, KappaFive) {
  for (double pert : {0.0, 0.05}) {
    const IntervalLemmaReport r = interval_lemma_check(5.0, pert, 3.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.threshold, 3.25, 1e-14);
    EXPECT_GT(r.min_x1, 3.25);
  }
  const IntervalLemmaReport r = interval_lemma_check(5.0, 0.0, 3.0);
  EXPECT_EQ(r.x1.front(), 5.0);
  EXPECT_THROW(interval_lemma_check(3.0, 0.0, 1.0), ArgumentError);
}
