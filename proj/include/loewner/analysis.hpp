#pragma once

#include <loewner/explicit_family.hpp>
#include <loewner/forward_solver.hpp>
#include <loewner/inverse_solver.hpp>

namespace loewner {

// ---------------------------------------------------------------------------
// renormalization  lambda_T(t) = lambda(T + t(1-T)) / sqrt(1-T)

inline DrivingTerm renormalize_driving(const DrivingTerm& l, double T) {
  require_normalized(l, "renormalize_driving");
  if (!(T >= 0.0 && T < l.T)) throw ArgumentError("renormalize_driving: T out of range");
  if (T == 0.0) return l;
  const double q = 1.0 - T, sq = std::sqrt(q);
  DrivingTerm d;
  d.horizon = 1.0;
  d.t.push_back(0.0);
  d.rem.push_back(1.0);
  d.value.push_back(l.at(T, q) / sq);
  for (std::size_t k = 0; k < l.t.size(); ++k) {
    if (l.rem[k] >= q) continue;
    d.t.push_back((l.t[k] - T) / q);
    d.rem.push_back(l.rem[k] / q);
    d.value.push_back(l.value[k] / sq);
  }
  d.T = d.t.back();
  if (l.exact) {
    auto f = l.exact;
    d.exact = [f, T, q, sq](double tt, double rr) { return f(T + tt * q, rr * q) / sq; };
  }
  d.tag = l.tag;
  if (l.tag.kind == FormKind::constant || l.tag.kind == FormKind::sqrt_family) d.tag.offset = l.tag.offset / sq;
  else if (l.tag.kind == FormKind::scaled) d.tag = FormTag{FormKind::analytic};
  d.validate();
  return d;
}

inline Trace renormalized_trace(const DrivingTerm& l, double T, const SolverConfig& cfg) {
  return solve_trace(renormalize_driving(l, T), cfg);
}

// ---------------------------------------------------------------------------
// sqrt asymptote

struct AsymptoteReport {
  double lambda_at_1 = 0.0;
  double lambda_at_1_error = 0.0;
  std::vector<std::pair<double, double>> kappa_hats;  // (t_n, kappa_hat_n)
  std::vector<double> rem_n;                          // 1 - t_n = a^n
  double kappa_limit = 0.0;
  double a = 0.5;
  int last_level = 0;
  bool truncated = false;
};

namespace analysis_detail {

// Aitken extrapolation of a geometrically converging triple
inline double aitken(double x0, double x1, double x2) {
  const double d1 = x1 - x0, d2 = x2 - x1, den = d2 - d1;
  if (den == 0.0 || std::fabs(den) <= 1e-14 * (std::fabs(x2) + std::fabs(d2)) || d1 == 0.0) return x2;
  const double q = d2 / d1;
  if (!(std::fabs(q) < 0.999)) return x2;
  return x2 - d2 * d2 / den;
}

inline cplx aitken(cplx x0, cplx x1, cplx x2) {
  const cplx d1 = x1 - x0, d2 = x2 - x1, den = d2 - d1;
  if (std::abs(d1) == 0.0 || std::abs(den) == 0.0) return x2;
  if (!(std::abs(d2 / d1) < 0.999)) return x2;
  return x2 - d2 * d2 / den;
}

// sampled terms are read linearly in sqrt(remaining) near the horizon, which is
// exact for C + kappa sqrt(1-t) and second-order accurate in general
inline double value_sqrt_interp(const DrivingTerm& l, double r) {
  if (l.exact) return l.at_rem(r);
  const auto& R = l.rem;
  if (r >= R.front()) return l.value.front();
  if (r <= R.back()) return l.value.back();
  const auto it = std::upper_bound(R.begin(), R.end(), r, std::greater<double>());
  const std::size_t j = static_cast<std::size_t>(it - R.begin());
  const double u0 = std::sqrt(R[j - 1]), u1 = std::sqrt(R[j]), u = std::sqrt(r);
  const double w = (u0 - u) / (u0 - u1);
  return l.value[j - 1] + w * (l.value[j] - l.value[j - 1]);
}

}  // namespace analysis_detail

inline AsymptoteReport estimate_sqrt_asymptote(const DrivingTerm& l, double a = 0.5, int max_levels = 40) {
  require_normalized(l, "estimate_sqrt_asymptote");
  if (!(a > 0.0 && a < 1.0)) throw ArgumentError("estimate_sqrt_asymptote: a must be in (0,1)");
  AsymptoteReport rep;
  rep.a = a;
  // deepest remaining capacity carrying information
  double floor_rem = l.rem_at_T();
  if (!l.exact && floor_rem <= 0.0) {
    floor_rem = 0.0;
    for (std::size_t k = l.rem.size(); k-- > 0;)
      if (l.rem[k] > 0.0) {
        floor_rem = l.rem[k];
        break;
      }
    // samples ending exactly at the horizon extend the last sqrt segment
    if (l.rem.back() == 0.0) floor_rem = 0.0;
  }
  std::vector<double> lam_n;
  for (int n = 0; n <= max_levels; ++n) {
    const double r = std::pow(a, n);
    if (r < floor_rem) {
      rep.truncated = true;
      break;
    }
    rep.rem_n.push_back(r);
    lam_n.push_back(analysis_detail::value_sqrt_interp(l, r));
  }
  const int N = static_cast<int>(lam_n.size());
  if (N < 4) throw ContractError("estimate_sqrt_asymptote: insufficient samples near t = 1");
  rep.last_level = N - 1;
  bool closed = false;
  if (l.exact && l.rem_at_T() <= 0.0) {
    const double v = l.at_rem(0.0);
    if (std::isfinite(v)) {
      rep.lambda_at_1 = v;
      closed = true;
    }
  }
  if (!closed) {
    rep.lambda_at_1 = analysis_detail::aitken(lam_n[N - 3], lam_n[N - 2], lam_n[N - 1]);
    const double prev = analysis_detail::aitken(lam_n[N - 4], lam_n[N - 3], lam_n[N - 2]);
    rep.lambda_at_1_error = std::fabs(rep.lambda_at_1 - prev);
  }
  std::vector<double> kh;
  for (int n = 1; n < N; ++n) {
    const double r = rep.rem_n[n];
    const double k = std::fabs(rep.lambda_at_1 - lam_n[n]) / std::sqrt(r);
    rep.kappa_hats.emplace_back(1.0 - r, k);
    kh.push_back(k);
  }
  const std::size_t M = kh.size();
  rep.kappa_limit = M >= 3 ? analysis_detail::aitken(kh[M - 3], kh[M - 2], kh[M - 1]) : kh.back();
  return rep;
}

// ---------------------------------------------------------------------------
// local Lip-1/2 norm: sup |l(t)-l(t')|/|t-t'|^{1/2} over |t-t'| < delta (1-t)

inline double local_lip_half(const DrivingTerm& l, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("local_lip_half: delta must be positive");
  double best = 0.0;
  if (l.exact) {
    // dense probes: geometric in the remaining capacity, offsets filling each window
    const double H = l.horizon, end = l.rem_at_T();
    const double r_lo = end > 0.0 ? end : H * 1e-12;
    const int nodes = 2000, offs = 64;
    for (int i = 0; i <= nodes; ++i) {
      const double r = H * std::pow(r_lo / H, static_cast<double>(i) / nodes);
      const double v = l.at(H - r, r);
      for (int j = 1; j <= offs; ++j) {
        const double dx = delta * r * (j == offs ? 1.0 - 1e-9 : static_cast<double>(j) / offs);
        const double r2 = r - dx;
        if (r2 < end) break;
        best = std::max(best, std::fabs(l.at(H - r2, r2) - v) / std::sqrt(dx));
      }
    }
    return best;
  }
  const std::size_t n = l.t.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dt = l.rem[i] - l.rem[j];
      if (!(dt < delta * l.rem[i])) break;
      if (dt > 0.0) best = std::max(best, std::fabs(l.value[j] - l.value[i]) / std::sqrt(dt));
    }
  }
  return best;
}

struct RegularityReport {
  std::vector<double> deltas;
  std::vector<double> local_lip_norms;
};

inline RegularityReport regularity(const DrivingTerm& l, const std::vector<double>& deltas) {
  RegularityReport r;
  r.deltas = deltas;
  for (double d : deltas) r.local_lip_norms.push_back(local_lip_half(l, d));
  return r;
}

// ---------------------------------------------------------------------------
// endpoint geometry of a trace near its horizon

enum class TailRegime { collision, tangential, spiral, undetermined };

inline const char* tail_regime_name(TailRegime r) {
  switch (r) {
    case TailRegime::collision: return "collision";
    case TailRegime::tangential: return "tangential";
    case TailRegime::spiral: return "spiral";
    case TailRegime::undetermined: return "undetermined";
  }
  return "?";
}

struct TailGeometry {
  TailRegime regime = TailRegime::undetermined;
  cplx endpoint;
  double endpoint_error = 0.0;
  double angle = 0.0;          // arg(gamma - endpoint), from the positive real direction
  double contact_angle = 0.0;  // min(angle, pi - angle)
  double expected_angle = 0.0; // pi(1-q)/(1+q), q = sqrt(1-16/kappa^2)
  cplx center;
  double pitch = 0.0;          // omega/sigma of the fitted log-spiral
  double expected_pitch = 0.0; // tan(theta), theta = -asin(kappa/4)
  double s_top = 0.0;          // deepest log-time used
  std::string diagnostics;
};

namespace analysis_detail {

struct TailSamples {
  std::vector<double> s;
  std::vector<cplx> z;

  cplx at(double x) const {
    if (x <= s.front()) return z.front();
    if (x >= s.back()) return z.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - s.begin());
    const double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
    return z[j - 1] + w * (z[j] - z[j - 1]);
  }
};

inline TailSamples tail_samples(const Trace& g) {
  TailSamples ts;
  for (const auto& p : g.pts) {
    if (!(p.rem > 0.0)) continue;
    const double s = std::log(g.horizon / p.rem);
    if (!ts.s.empty() && !(s > ts.s.back())) continue;
    ts.s.push_back(s);
    ts.z.push_back(p.z);
  }
  return ts;
}

// polynomial through (1/s_i, z_i) evaluated at 1/s = 0
inline cplx richardson_inverse_s(const double s[3], const cplx z[3]) {
  const double x[3] = {1.0 / s[0], 1.0 / s[1], 1.0 / s[2]};
  cplx out = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
    out += w * z[i];
  }
  return out;
}

inline double mean_angle(const TailSamples& ts, double s0, double s1, cplx e) {
  double c = 0.0, s = 0.0;
  for (std::size_t k = 0; k < ts.s.size(); ++k) {
    if (ts.s[k] < s0 || ts.s[k] > s1) continue;
    const cplx d = ts.z[k] - e;
    const double a = std::abs(d);
    if (a == 0.0) continue;
    c += d.real() / a;
    s += d.imag() / a;
  }
  return std::atan2(s, c);
}

}  // namespace analysis_detail

inline TailGeometry measure_tail_geometry(const Trace& trace, double kappa_hat, double a = 0.5) {
  using namespace analysis_detail;
  if (kappa_hat < 0.0) {
    TailGeometry m = measure_tail_geometry(mirror(trace), -kappa_hat, a);
    m.endpoint = upper(cplx(-m.endpoint.real(), m.endpoint.imag()));
    m.center = upper(cplx(-m.center.real(), m.center.imag()));
    m.angle = pi - m.angle;
    m.pitch = -m.pitch;
    m.expected_pitch = -m.expected_pitch;
    return m;
  }
  TailGeometry out;
  const TailSamples ts = tail_samples(trace);
  const double L = std::log(1.0 / a);
  if (ts.s.size() < 8) {
    out.diagnostics = "too few tail samples";
    return out;
  }
  const double s_max = ts.s.back();
  int n_top = static_cast<int>(std::floor(s_max / L)) - 1;  // drop the shell touching the end of the grid
  if (n_top < 4) {
    out.diagnostics = "tail not resolved to four dyadic shells";
    return out;
  }
  const double k = kappa_hat;
  const bool tangential = std::fabs(k - 4.0) < 0.1;
  if (k > 4.0) {
    const double q = std::sqrt(1.0 - 16.0 / (k * k));
    out.expected_angle = pi * (1.0 - q) / (1.0 + q);
  }
  if (k < 4.0) out.expected_pitch = std::tan(-std::asin(k / 4.0));

  if (tangential) {
    // algebraic approach: Richardson in 1/s over s_top/4, s_top/2, s_top
    const double s3 = n_top * L;
    const double ss[3] = {0.25 * s3, 0.5 * s3, s3};
    const cplx zz[3] = {ts.at(ss[0]), ts.at(ss[1]), ts.at(ss[2])};
    out.endpoint = richardson_inverse_s(ss, zz);
    const double ss2[3] = {0.25 * (s3 - L), 0.5 * (s3 - L), s3 - L};
    const cplx zz2[3] = {ts.at(ss2[0]), ts.at(ss2[1]), ts.at(ss2[2])};
    out.endpoint_error = std::abs(out.endpoint - richardson_inverse_s(ss2, zz2));
    out.s_top = s3;
    out.angle = mean_angle(ts, s3 - 3.0 * L, s3, out.endpoint);
    out.contact_angle = std::min(std::fabs(out.angle), pi - std::fabs(out.angle));
    out.regime = TailRegime::tangential;
    return out;
  }

  // geometric approach: stop where successive dyadic increments reach round-off
  int top = n_top;
  for (int n = 3; n <= n_top; ++n) {
    const cplx inc = ts.at(n * L) - ts.at((n - 1) * L);
    if (std::abs(inc) < 1e-9 * (1.0 + std::abs(ts.at(n * L)))) {
      top = std::max(3, n - 1);
      break;
    }
  }
  const double s3 = top * L;
  out.s_top = s3;
  out.endpoint = aitken(ts.at(s3 - 2.0 * L), ts.at(s3 - L), ts.at(s3));
  out.endpoint_error = std::abs(out.endpoint - aitken(ts.at(s3 - 3.0 * L), ts.at(s3 - 2.0 * L), ts.at(s3 - L)));
  if (k > 4.0) {
    out.regime = TailRegime::collision;
    out.angle = mean_angle(ts, s3 - 3.0 * L, s3, out.endpoint);
    out.contact_angle = std::min(std::fabs(out.angle), pi - std::fabs(out.angle));
    return out;
  }
  out.regime = TailRegime::spiral;
  out.center = out.endpoint;
  // least squares of log(z - center) = c0 + (sigma + i omega) s with unwrapped argument
  double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0, sp = 0.0, sxp = 0.0, prev_arg = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < ts.s.size(); ++i) {
    if (ts.s[i] < s3 - 3.0 * L || ts.s[i] > s3) continue;
    const cplx d = ts.z[i] - out.center;
    if (std::abs(d) == 0.0) continue;
    double arg = std::arg(d);
    if (m > 0) arg = prev_arg + std::remainder(arg - prev_arg, 2.0 * pi);
    prev_arg = arg;
    const double x = ts.s[i];
    sx += x;
    sxx += x * x;
    sy += std::log(std::abs(d));
    sxy += x * std::log(std::abs(d));
    sp += arg;
    sxp += x * arg;
    ++m;
  }
  if (m < 3) {
    out.regime = TailRegime::undetermined;
    out.diagnostics = "too few samples for the spiral fit";
    return out;
  }
  const double den = m * sxx - sx * sx;
  const double sigma = (m * sxy - sx * sy) / den;
  const double omega = (m * sxp - sx * sp) / den;
  out.pitch = omega / sigma;
  if (!(out.endpoint.imag() > 0.0)) {
    out.regime = TailRegime::undetermined;
    out.diagnostics = "spiral center not interior";
  }
  return out;
}

// ---------------------------------------------------------------------------
// left image x1(s) of the hull base under G_s for sigma = kappa + eps sin(s)

struct IntervalLemmaReport {
  double kappa = 0.0, A = 0.0, B = 0.0, delta = 0.0, threshold = 0.0;
  std::vector<double> s, x1, x2;
  double min_x1 = 0.0;
  bool pass = false;
};

inline IntervalLemmaReport interval_lemma_check(double kappa, double perturbation, double s_max,
                                                int n_cells = 3000) {
  if (!(kappa > 4.0)) throw ArgumentError("interval_lemma_check: kappa must exceed 4");
  const FamilyParams p = params_from_kappa(kappa);
  IntervalLemmaReport rep;
  rep.kappa = kappa;
  rep.A = p.A;
  rep.B = p.B;
  rep.delta = (p.A - p.B) / 4.0;
  rep.threshold = p.A - rep.delta;
  SigmaTerm sig;
  sig.exact = [kappa, perturbation](double s) { return kappa + perturbation * std::sin(s); };
  const MapChain chain = sigma_chain(sig, s_max, n_cells);
  const double base = chain_base(chain);
  const double eps = 1e-8 * std::sqrt(chain.total_capacity());
  double xl = base - eps, xr = base + eps;
  rep.s.push_back(0.0);
  rep.x1.push_back(sig.at(0.0));
  rep.x2.push_back(sig.at(0.0));
  const auto& st = chain.steps();
  for (std::size_t k = 0; k < st.size(); ++k) {
    xl = slit_forward_real(xl, st[k].center, st[k].capacity);
    xr = slit_forward_real(xr, st[k].center, st[k].capacity);
    const double s = s_max * static_cast<double>(k + 1) / st.size();
    rep.s.push_back(s);
    rep.x1.push_back(std::exp(0.5 * s) * xl);
    rep.x2.push_back(std::exp(0.5 * s) * xr);
  }
  rep.min_x1 = *std::min_element(rep.x1.begin(), rep.x1.end());
  rep.pass = rep.min_x1 > rep.threshold;
  return rep;
}

}  // namespace loewner
