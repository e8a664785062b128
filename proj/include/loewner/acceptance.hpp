#pragma once

#include <loewner/analysis.hpp>
#include <loewner/spiral_lab.hpp>

#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace loewner::acceptance {

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Detail {
 public:
  template <class T>
  Detail& operator()(const std::string& key, const T& v) {
    if (!first_) os_ << "; ";
    first_ = false;
    os_ << key << '=' << v;
    return *this;
  }
  Detail& operator()(const std::string& key, cplx z) {
    std::ostringstream s;
    s << std::setprecision(6) << '(' << z.real() << ',' << z.imag() << ')';
    return (*this)(key, s.str());
  }
  std::string str() const { return os_.str(); }
  Detail() { os_ << std::setprecision(6); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

inline SolverConfig deep_config(int n) {
  SolverConfig c;
  c.n_steps = n;
  c.grid = GridKind::geometric_s;
  c.s_span = 80.0;
  return c;
}

// lambda^A for A = disk(2i, 0.5), built once
inline const SpiralDriving& spiral_fixture() {
  static const SpiralDriving sd = spiral_driving_full(CompactSet::disk({0.0, 2.0}, 0.5), 12000);
  return sd;
}

inline double sup_driving_error(const DrivingTerm& got, const DrivingTerm& want, double t_max) {
  double e = 0.0;
  for (std::size_t k = 0; k < got.t.size() && got.t[k] <= t_max; ++k)
    e = std::max(e, std::fabs(got.value[k] - want.at(got.t[k], want.horizon - got.t[k])));
  return e;
}

// diameters of the arcs between consecutive dyadic log-times
inline std::vector<double> dyadic_arc_diameters(const Trace& g) {
  const auto ts = analysis_detail::tail_samples(g);
  const double L = std::log(2.0);
  std::vector<double> out;
  for (int j = 0; (j + 1) * L <= ts.s.back(); ++j) {
    std::vector<cplx> arc;
    for (std::size_t i = 0; i < ts.s.size(); ++i)
      if (ts.s[i] >= j * L && ts.s[i] <= (j + 1) * L) arc.push_back(ts.z[i]);
    double d = 0.0;
    for (std::size_t a = 0; a < arc.size(); ++a)
      for (std::size_t b = a + 1; b < arc.size(); ++b) d = std::max(d, std::abs(arc[a] - arc[b]));
    out.push_back(d);
  }
  return out;
}

// slope of the least-squares line through (x_i, y_i)
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double curve_diameter(const CurveSamples& c) {
  double d = 0.0;
  for (std::size_t a = 0; a < c.points.size(); ++a)
    for (std::size_t b = a + 1; b < c.points.size(); ++b) d = std::max(d, std::abs(c.points[a] - c.points[b]));
  return d;
}

}  // namespace detail

// 1. closed-form identities of the self-similar families
inline Result criterion_1() {
  Result r{1, "exact-family identities"};
  double worst = 0.0;
  for (double k : {4.1, 4.5, 5.0, 6.0, 20.0}) {
    const FamilyParams p = params_from_kappa(k);
    const double theta_inv = 2.0 / (1.0 + k / std::sqrt(k * k - 16.0));
    // kappa recovered from theta: 2/sqrt(1-theta) + 2 sqrt(1-theta)
    const double u = std::sqrt(1.0 - p.theta);
    worst = std::max({worst, std::fabs(p.A * p.B - 4.0), std::fabs(p.A + p.B - k), std::fabs(p.theta - theta_inv),
                      std::fabs(2.0 / u + 2.0 * u - k) / k});
  }
  for (double k : {1.0, 2.0, 3.0, 3.9}) {
    for (double sgn : {1.0, -1.0}) {
      const FamilyParams p = params_from_kappa(sgn * k);
      worst = std::max({worst, std::fabs(p.sign * -4.0 * std::sin(p.theta) - p.kappa), std::fabs(std::abs(p.beta) - 2.0),
                        std::fabs(p.beta.real() * 2.0 - p.kappa)});
    }
  }
  r.pass = worst <= 1e-12;
  r.detail = detail::Detail()("max_identity_error", worst)("tol", 1e-12).str();
  return r;
}

// 2. half circle for kappa = 3 sqrt 2
inline Result criterion_2() {
  Result r{2, "half-circle reproduction"};
  const double k = 3.0 * std::sqrt(2.0), c = 2.0 * std::sqrt(2.0), rad = std::sqrt(2.0);
  const FamilyParams p = params_from_kappa(k);
  std::vector<double> s;
  for (int i = 0; i < 1000; ++i) s.push_back(40.0 * i / 999.0);
  const Trace ex = trace_explicit(p, s);
  double e_ex = 0.0;
  for (const auto& q : ex.pts) e_ex = std::max(e_ex, std::fabs(std::abs(q.z - c) - rad));
  const Trace so = solve_trace(DrivingTerm::sqrt_family(k), detail::deep_config(16384));
  double e_so = 0.0;
  for (const auto& q : so.pts) e_so = std::max(e_so, std::fabs(std::abs(q.z - c) - rad));
  r.pass = e_ex <= 1e-8 && e_so <= 5e-3;
  r.detail = detail::Detail()("explicit_err", e_ex)("explicit_tol", 1e-8)("solver_err", e_so)("solver_tol", 5e-3).str();
  return r;
}

// 3. endpoint and angle of the self-similar traces from the solver
inline Result criterion_3() {
  Result r{3, "endpoint/angle theorems"};
  detail::Detail d;
  bool ok = true;
  auto measure = [](double k) {
    const DrivingTerm l = DrivingTerm::sqrt_family(k);
    const Trace g = solve_trace(l, detail::deep_config(16384));
    return measure_tail_geometry(g, estimate_sqrt_asymptote(l).kappa_limit);
  };
  for (double k : {5.0, 6.0}) {
    const FamilyParams p = params_from_kappa(k);
    const TailGeometry tg = measure(k);
    const double e_end = std::abs(tg.endpoint - p.endpoint), e_ang = std::fabs(tg.angle - p.collision_angle());
    ok = ok && tg.regime == TailRegime::collision && e_end <= 1e-2 && e_ang <= 0.05;
    d("k" + std::to_string(static_cast<int>(k)) + "_endpoint_err", e_end)("k" + std::to_string(static_cast<int>(k)) + "_angle_err", e_ang);
  }
  for (double k : {2.0, 3.0}) {
    const FamilyParams p = params_from_kappa(k);
    const TailGeometry tg = measure(k);
    const double e_c = std::abs(tg.center - p.beta);
    ok = ok && tg.regime == TailRegime::spiral && e_c <= 5e-2;
    d("k" + std::to_string(static_cast<int>(k)) + "_center_err", e_c);
  }
  {
    const TailGeometry tg = measure(4.0);
    const double e_end = std::abs(tg.endpoint - 2.0);
    ok = ok && e_end <= 1e-2 && tg.contact_angle < 0.1;
    d("k4_endpoint_err", e_end)("k4_contact_angle", tg.contact_angle);
  }
  r.pass = ok;
  r.detail = d("tol", "1e-2/0.05rad/5e-2/0.1rad").str();
  return r;
}

// 4. unzipping the solved trace recovers the driving term
inline Result criterion_4() {
  Result r{4, "round-trip oracle"};
  detail::Detail d;
  bool ok = true;
  for (double k : {0.0, 2.0, 5.0}) {
    const DrivingTerm l = DrivingTerm::sqrt_family(k);
    double e[2];
    for (int i = 0; i < 2; ++i) {
      SolverConfig cfg;
      cfg.n_steps = 4096 << i;
      e[i] = detail::sup_driving_error(drive_curve(curve_from_trace(solve_trace(l, cfg))), l, 0.99);
    }
    // an exact round trip has no order to fit
    const bool exact = e[0] <= 1e-13 && e[1] <= 1e-13;
    const double order = exact ? std::numeric_limits<double>::infinity() : std::log2(e[0] / e[1]);
    ok = ok && e[0] <= 2e-2 && order >= 0.5;
    const std::string tag = "k" + std::to_string(static_cast<int>(k));
    d(tag + "_err4096", e[0])(tag + "_err8192", e[1])(tag + "_order", exact ? std::string("exact") : std::to_string(order));
  }
  r.pass = ok;
  r.detail = d("tol", "2e-2, order>=0.5").str();
  return r;
}

// 5. renormalization closure and the semigroup of time-changed maps
inline Result criterion_5() {
  Result r{5, "renormalization fixed point and semigroup"};
  double closure = 0.0;
  bool tags = true;
  for (double k : {-3.0, 2.0, 5.0})
    for (double c : {0.0, 0.7})
      for (double T : {0.3, 0.75, 0.99}) {
        const DrivingTerm l = DrivingTerm::sqrt_family(k, c);
        const DrivingTerm n = renormalize_driving(l, T);
        const double c_new = c / std::sqrt(1.0 - T);
        tags = tags && n.tag.kind == FormKind::sqrt_family && n.tag.kappa == k &&
               std::fabs(n.tag.offset - c_new) <= 1e-15 * (1.0 + std::fabs(c_new));
        const DrivingTerm want = DrivingTerm::sqrt_family(k, c_new);
        for (double t : {0.0, 0.1, 0.5, 0.9, 0.999})
          closure = std::max(closure, std::fabs(n.at(t) - want.at(t)));
      }
  SigmaTerm sig;
  sig.exact = [](double s) { return 3.0 + std::sin(2.0 * s); };
  std::vector<double> errs;
  for (int n : {1024, 4096}) {
    SolverConfig cfg;
    cfg.n_steps = n;
    cfg.refinement_levels = 2;
    const auto G = solve_G(sig, {0.3, 0.6}, cfg);
    const auto Gu = solve_G(sig.shifted(0.3), {0.3}, cfg);
    std::mt19937_64 rng(20261017);
    std::uniform_real_distribution<double> X(-3.0, 3.0), Y(0.2, 3.0);
    double e = 0.0;
    for (int i = 0; i < 10; ++i) {
      const cplx z(X(rng), Y(rng));
      e = std::max(e, std::abs(G[1].forward(z) - Gu[0].forward(G[0].forward(z))));
    }
    errs.push_back(e);
  }
  // at round-off level a refinement cannot improve further
  const bool refined = errs.back() <= errs.front() || errs.back() <= 1e-10;
  r.pass = tags && closure <= 1e-12 && errs.back() <= 1e-6 && refined;
  r.detail = detail::Detail()("tags_closed", tags)("closure_err", closure)("semigroup_err_n1024", errs[0])(
                 "semigroup_err_n4096", errs[1])("tol", 1e-6)
                 .str();
  return r;
}

// 6. driving term of the spiral around disk(2i, 0.5)
inline Result criterion_6() {
  Result r{6, "spiral driving term"};
  const SpiralDriving& sd = detail::spiral_fixture();
  std::vector<double> kl;
  for (int depth : {8, 12, 16}) kl.push_back(estimate_sqrt_asymptote(truncate_driving(sd.full, std::ldexp(1.0, -depth))).kappa_limit);
  const bool toward = std::fabs(kl[2] - 4.0) < std::fabs(kl[1] - 4.0) && std::fabs(kl[1] - 4.0) < std::fabs(kl[0] - 4.0);
  const bool mono = (kl[0] < kl[1] && kl[1] < kl[2]) || (kl[0] > kl[1] && kl[1] > kl[2]);
  const bool in_band = kl[2] >= 3.3 && kl[2] <= 4.7;
  const DrivingTerm deep = truncate_driving(sd.full, std::ldexp(1.0, -16));
  const RegularityReport reg = regularity(deep, {0.04, 0.01, 0.0025});
  const auto& ln = reg.local_lip_norms;
  const bool lip = ln[1] < ln[0] && ln[2] < ln[1];
  r.pass = toward && mono && in_band && lip;
  r.detail = detail::Detail()("kappa_limit_d8", kl[0])("kappa_limit_d12", kl[1])("kappa_limit_d16", kl[2])(
                 "lip_0.04", ln[0])("lip_0.01", ln[1])("lip_0.0025", ln[2])("band", "[3.3,4.7]")
                 .str();
  return r;
}

// 7. continuity in r of the tail geometry for r * lambda^A
inline Result criterion_7() {
  Result r{7, "continuity in r for r*lambda^A"};
  const SpiralDriving& sd = detail::spiral_fixture();
  const DrivingTerm mid = truncate_driving(sd.full, std::ldexp(1.0, -12));
  const double k_hat = estimate_sqrt_asymptote(mid).kappa_limit;
  detail::Detail d;
  auto run = [&](double factor, int n) {
    const Trace g = solve_trace(multiply_driving(mid, factor), detail::deep_config(n));
    return std::make_pair(g, measure_tail_geometry(g, factor * k_hat));
  };
  const auto [g_hi, t_hi] = run(1.25, 16384);
  const bool collide = std::fabs(t_hi.endpoint.imag()) <= 0.05;
  d("r1.25_endpoint", t_hi.endpoint);
  const auto [g_a, t_a] = run(0.8, 8192);
  const auto [g_b, t_b] = run(0.8, 16384);
  const bool interior = t_a.endpoint.imag() >= 0.1 && t_b.endpoint.imag() >= 0.1;
  const double drift = std::abs(t_a.endpoint - t_b.endpoint);
  const std::vector<double> diam = detail::dyadic_arc_diameters(g_b);
  std::vector<double> j, logd;
  for (std::size_t i = 0; i < diam.size(); ++i)
    if (diam[i] > 0.0) {
      j.push_back(static_cast<double>(i));
      logd.push_back(std::log(diam[i]));
    }
  const double ratio = j.size() >= 3 ? std::exp(detail::ls_slope(j, logd)) : 1.0;
  r.pass = collide && interior && drift <= 0.05 && ratio < 1.0;
  r.detail = d("r0.8_endpoint_n8192", t_a.endpoint)("r0.8_endpoint_n16384", t_b.endpoint)("r0.8_drift", drift)(
                 "arc_diameter_ratio", ratio)("tol", "|Im|<=0.05, Im>=0.1, ratio<1")
                 .str();
  return r;
}

// 8. capacity, hyperbolic-distance and closeness properties
inline Result criterion_8() {
  Result r{8, "hull property suite"};
  detail::Detail d;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  double rho_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = -2.0 + 4.0 * U(rng), len = 0.1 + 3.0 * U(rng);
    const double mid = a + 0.5 * len;
    const cplx z = mid + std::polar(0.5 * len * (1.05 + 3.0 * U(rng)), 2.0 * pi * U(rng));
    const HyperbolicResult h = hyperbolic_tools(z, a, a + len);
    rho_err = std::max(rho_err, std::fabs(h.integral - 2.0 * h.rho) / (2.0 * h.rho));
  }
  const bool rho_ok = rho_err <= 1e-8;
  d("cauchy_rho_rel_err", rho_err);

  double lo_ratio = std::numeric_limits<double>::infinity(), hi_ratio = 0.0;
  for (int i = 0; i < 20; ++i) {
    CurveSamples c;
    if (i < 10) {
      // straight segments from a base point at random angles
      const double x0 = -1.0 + 2.0 * U(rng), ang = 0.15 * pi + 0.7 * pi * U(rng), len = 0.5 + 2.0 * U(rng);
      for (int k = 0; k <= 400; ++k) c.points.push_back(x0 + std::polar(len * k / 400.0, ang));
      c.points.front() = cplx(x0, 0.0);
    } else {
      const double a = 3.0 * (U(rng) - 0.5), b = 1.0 + 6.0 * U(rng), e = 2.0 * (U(rng) - 0.5);
      const DrivingTerm l = DrivingTerm::from_function(
          [a, b, e](double t, double) { return a * std::sin(b * t) + e * t; }, 0.5 + U(rng), 2.0,
          FormTag{FormKind::analytic});
      SolverConfig cfg;
      cfg.n_steps = 400;
      c = curve_from_trace(solve_trace(l, cfg));
    }
    const DrivenCurve dc = drive_curve_with_chain(c);
    const auto [x1, x2] = preimage_interval(dc.chain, chain_base(dc.chain));
    const double ratio = (x2 - x1) / detail::curve_diameter(c);
    lo_ratio = std::min(lo_ratio, ratio);
    hi_ratio = std::max(hi_ratio, ratio);
  }
  const bool diam_ok = lo_ratio >= 0.95 && hi_ratio <= 4.0 * 1.05;
  d("diam_ratio_min", lo_ratio)("diam_ratio_max", hi_ratio);

  // vertical slit [0, 2i] versus the same slit with a horizontal hook of length eps at the tip
  CurveSamples base;
  for (int k = 0; k <= 400; ++k) base.points.push_back(cplx(0.0, 2.0 * k / 400.0));
  const double cap0 = drive_curve(base).T;
  std::vector<double> le, lg, gaps;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    CurveSamples hook = base;
    for (int k = 1; k <= 64; ++k) hook.points.push_back(cplx(eps * k / 64.0, 2.0));
    const double gap = std::fabs(drive_curve(hook).T - cap0);
    gaps.push_back(gap);
    le.push_back(std::log(eps));
    lg.push_back(std::log(gap));
  }
  const double expo = detail::ls_slope(le, lg);
  const bool close_ok = expo >= 0.35 && gaps[1] < gaps[0] && gaps[2] < gaps[1];
  d("hcap_gap_exponent", expo);

  // slit at -eps with a hook down its right side, against its mirror image
  const double eps = 0.05;
  CurveSamples c1;
  for (int k = 0; k <= 400; ++k) c1.points.push_back(cplx(-eps, 2.0 * k / 400.0));
  for (int k = 1; k <= 800; ++k) {
    const cplx z = std::polar(static_cast<double>(k) / 800.0, eps);
    c1.points.push_back(upper_sqrt(z * z - 4.0, 0.0) - eps);
  }
  CurveSamples c2;
  for (const auto& z : c1.points) c2.points.push_back(cplx(-z.real(), z.imag()));
  const HullComparison hc = compare_hulls(c1, c2);
  const bool notclose_ok = hc.sup_driving_gap >= 1.5;
  d("notclose_gap", hc.sup_driving_gap)("notclose_hausdorff", hc.epsilon);

  r.pass = rho_ok && diam_ok && close_ok && notclose_ok;
  r.detail = d("tol", "1e-8, [0.95,4.2], expo>=0.35, gap>=1.5").str();
  return r;
}

// 9. image of the hull base stays away from the collision side
inline Result criterion_9() {
  Result r{9, "interval lemma"};
  const IntervalLemmaReport rep = interval_lemma_check(5.0, 0.05, 3.0);
  r.pass = rep.pass;
  r.detail = detail::Detail()("min_x1", rep.min_x1)("threshold", rep.threshold)("nodes", rep.x1.size()).str();
  return r;
}

inline Result run_one(int id) {
  using Fn = Result (*)();
  static constexpr Fn table[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                 criterion_6, criterion_7, criterion_8, criterion_9};
  if (id < 1 || id > 9) throw ArgumentError("acceptance: no criterion " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = table[id - 1]();
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline void print(std::ostream& out, const Result& r) {
  out << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " [" << r.name << "] " << r.detail << " ("
      << std::fixed << std::setprecision(1) << r.seconds << "s)" << std::defaultfloat << '\n';
  out.flush();
}

// runs the selected criteria (all when empty); true iff every one passes
inline bool run(std::ostream& out, const std::vector<int>& ids = {}) {
  std::vector<int> sel = ids;
  if (sel.empty())
    for (int i = 1; i <= 9; ++i) sel.push_back(i);
  bool all = true;
  for (int id : sel) {
    const Result r = run_one(id);
    print(out, r);
    all = all && r.pass;
  }
  return all;
}

}  // namespace loewner::acceptance
