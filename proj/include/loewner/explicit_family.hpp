#pragma once

#include <loewner/driving.hpp>

namespace loewner {

enum class Regime { collision, tangential, spiral, vertical };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::collision: return "collision";
    case Regime::tangential: return "tangential";
    case Regime::spiral: return "spiral";
    case Regime::vertical: return "vertical";
  }
  return "?";
}

// Parameters of the self-similar traces driven by kappa*sqrt(1-t).
// For kappa < 0 the geometric fields (A, B, beta, endpoint) describe the
// mirrored picture and sign = -1; theta is that of |kappa|.
struct FamilyParams {
  double kappa = 0.0;
  Regime regime = Regime::vertical;
  double theta = 0.0;
  double A = 0.0, B = 0.0;
  cplx beta;
  cplx endpoint;
  int sign = 1;

  double abs_kappa() const { return std::fabs(kappa); }
  // interior angle of the collision, measured from [B, +inf) in the kappa > 0 picture
  double collision_angle() const { return pi * (1.0 - theta); }
};

inline FamilyParams params_from_kappa(double kappa) {
  if (!std::isfinite(kappa)) throw ArgumentError("params_from_kappa: non-finite kappa");
  FamilyParams p;
  p.kappa = kappa;
  p.sign = kappa < 0.0 ? -1 : 1;
  const double k = std::fabs(kappa);
  cplx end;
  if (k == 0.0) {
    p.regime = Regime::vertical;
    end = cplx(0.0, 2.0);
  } else if (k > 4.0) {
    p.regime = Regime::collision;
    p.theta = 2.0 / (1.0 + k / std::sqrt(k * k - 16.0));
    const double u = std::sqrt(1.0 - p.theta);
    p.A = 2.0 / u;
    p.B = 2.0 * u;
    end = p.B;
  } else if (k < 4.0) {
    p.regime = Regime::spiral;
    p.theta = -std::asin(k / 4.0);
    p.beta = 2.0 * cplx(0.0, 1.0) * std::polar(1.0, p.theta);
    end = p.beta;
  } else {
    p.regime = Regime::tangential;
    end = 2.0;
  }
  p.endpoint = end;
  if (p.sign < 0) {
    p.A = -p.A;
    p.B = -p.B;
    p.beta = cplx(-p.beta.real(), p.beta.imag());
    p.endpoint = upper(cplx(-end.real(), end.imag()));
  }
  return p;
}

namespace family_detail {

inline cplx reflect(cplx z) { return upper(cplx(-z.real(), z.imag())); }

// Internal description in the kappa > 0 picture.  Each regime is written as
// an equation F = target(s) whose solution traces the curve:
//   collision  F = log k(z) = i pi theta + (1-theta) log(z-A) - log(z-B),   target += s theta/2
//   spiral     F = k1(z) = (z-beta)(z-conj beta)^{e^{2i theta}},           target *= e^{-s cos(theta) e^{i theta}}
//   tangential F = k(z) = (4-z)/(2-z) + log(2/(2-z)),                     target += s/2
// Points are carried as offsets u = z - endpoint so that the approach to the
// endpoint keeps full relative precision.
struct Model {
  Regime regime;
  double kappa, theta, A, B;
  cplx beta, e2, anchor;

  explicit Model(const FamilyParams& p) {
    regime = p.regime;
    kappa = p.abs_kappa();
    theta = p.theta;
    A = std::fabs(p.A);
    B = std::fabs(p.B);
    beta = p.sign < 0 ? reflect(p.beta) : p.beta;
    e2 = std::polar(1.0, 2.0 * theta);
    switch (regime) {
      case Regime::collision: anchor = B; break;
      case Regime::spiral: anchor = beta; break;
      case Regime::tangential: anchor = 2.0; break;
      default: anchor = 0.0; break;
    }
  }

  cplx to_z(cplx u) const { return anchor + u; }
  cplx to_u(cplx z) const { return z - anchor; }
  bool admissible(cplx u) const { return anchor.imag() + u.imag() >= 0.0; }

  // log(v) with arg in [-pi, 0] for v in the closed lower half-plane
  static cplx log_lower(cplx v) { return std::conj(log_upper(std::conj(v))); }

  cplx F(cplx u) const {
    switch (regime) {
      case Regime::collision:
        return cplx(0.0, pi * theta) + (1.0 - theta) * log_upper(u + (B - A)) - log_upper(u);
      case Regime::spiral:
        return u * std::exp(e2 * log_upper(u + cplx(0.0, 2.0 * beta.imag())));
      case Regime::tangential:
        return (2.0 - u) / (-u) + std::log(2.0) - log_lower(-u);
      default:
        throw DomainError("no uniformizing map for kappa = 0");
    }
  }

  cplx dF(cplx u) const {
    switch (regime) {
      case Regime::collision: return (1.0 - theta) / (u + (B - A)) - 1.0 / u;
      case Regime::spiral: return F(u) * (1.0 / u + e2 / (u + cplx(0.0, 2.0 * beta.imag())));
      case Regime::tangential: return (2.0 - u) / (u * u);
      default: throw DomainError("no uniformizing map for kappa = 0");
    }
  }

  // second derivative at the critical point z = kappa (F'(kappa) = 0)
  cplx d2F_at_kappa() const {
    const cplx u = to_u(kappa);
    switch (regime) {
      case Regime::collision: {
        const cplx a = u + (B - A);
        return -(1.0 - theta) / (a * a) + 1.0 / (u * u);
      }
      case Regime::spiral: {
        const cplx b = u + cplx(0.0, 2.0 * beta.imag());
        return F(u) * (-1.0 / (u * u) - e2 / (b * b));
      }
      case Regime::tangential: return -0.25;
      default: throw DomainError("no uniformizing map for kappa = 0");
    }
  }

  cplx flow(cplx start, double s) const {
    switch (regime) {
      case Regime::collision: return start + 0.5 * s * theta;
      case Regime::spiral: return start * std::exp(-s * std::cos(theta) * std::polar(1.0, theta));
      case Regime::tangential: return start + 0.5 * s;
      default: return start;
    }
  }

  cplx dflow(cplx current) const {
    switch (regime) {
      case Regime::collision: return 0.5 * theta;
      case Regime::spiral: return -std::cos(theta) * std::polar(1.0, theta) * current;
      case Regime::tangential: return 0.5;
      default: return 0.0;
    }
  }

  bool singular(cplx u) const {
    switch (regime) {
      case Regime::collision: return u == cplx(0.0, 0.0) || u + (B - A) == cplx(0.0, 0.0);
      case Regime::spiral: return u + cplx(0.0, 2.0 * beta.imag()) == cplx(0.0, 0.0);
      case Regime::tangential: return u == cplx(0.0, 0.0);
      default: return true;
    }
  }

  double scale(cplx target) const {
    return regime == Regime::spiral ? std::abs(target) : 1.0 + std::abs(target);
  }

  // damped Newton for F(u) = target inside the closed upper half-plane
  cplx solve(cplx target, cplx seed, int max_iter = 50) const {
    cplx u = seed;
    if (!admissible(u)) u = cplx(u.real(), -anchor.imag());
    const double sc = scale(target);
    double res = std::abs(F(u) - target);
    for (int it = 0; it < max_iter; ++it) {
      const cplx f = F(u) - target;
      res = std::abs(f);
      if (res <= 4e-16 * sc) return u;
      const cplx step = f / dF(u);
      if (std::abs(step) <= 1e-15 * std::abs(u)) return u - step;
      double lam = 1.0, rn = res;
      cplx un = u;
      bool improved = false;
      for (int h = 0; h < 40; ++h) {
        const cplx cand = u - lam * step;
        if (admissible(cand) && !singular(cand)) {
          const cplx fc = F(cand);
          if (finite(fc)) {
            const double rc = std::abs(fc - target);
            if (rc < res) {
              un = cand;
              rn = rc;
              improved = true;
              break;
            }
          }
        }
        lam *= 0.5;
      }
      if (!improved) break;
      u = un;
      res = rn;
    }
    if (!(res <= 1e-12 * sc)) throw ConvergenceError("k_inverse: Newton did not converge", to_z(u), res);
    return u;
  }
};

// Continuation of F(u(s)) = flow(F(u0), s) in s.  The step grows after clean
// Newton solves and halves on failure or on a jump away from the predictor.
template <class Emit>
void continue_flow(const Model& m, cplx u0, cplx target0, bool from_critical,
                   const std::vector<double>& s_grid, Emit emit, double dir = 1.0) {
  cplx u = u0;
  double s = 0.0;
  double h = 1e-3;
  for (double s_next : s_grid) {
    if (s_next < s) throw ArgumentError("trace_explicit: s grid must be increasing");
    while (s < s_next) {
      double step = std::min(h, s_next - s);
      bool ok = false;
      for (int tries = 0; tries < 60 && !ok; ++tries) {
        const double s1 = s + step;
        const cplx target = m.flow(target0, dir * s1);
        const bool start = from_critical && s == 0.0;
        cplx seed;
        if (start) {
          seed = u0 + upper_sqrt(2.0 * (target - target0) / m.d2F_at_kappa(), 0.0);
        } else {
          seed = u + dir * step * m.dflow(m.F(u)) / m.dF(u);
        }
        try {
          const cplx un = m.solve(target, seed);
          const double jump = std::abs(un - seed), ref = std::abs(seed - u);
          if (!start && jump > 0.5 * ref + 1e-13 * std::abs(u))
            throw ConvergenceError("branch jump", m.to_z(un), jump);
          u = un;
          s = s1;
          ok = true;
        } catch (const ConvergenceError&) {
          step *= 0.5;
        }
      }
      if (!ok || step < 1e-12) throw NumericError("trace_explicit: continuation failed at s = " + std::to_string(s), 0);
      h = std::min(1.5 * step, 0.25);
    }
    emit(s_next, m.to_z(u));
  }
}

}  // namespace family_detail

// uniformizing map of the family; collision uses c = 1
inline cplx k_map(const FamilyParams& p, cplx z) {
  if (p.regime == Regime::vertical) throw DomainError("k_map: kappa = 0 has no uniformizing map");
  const family_detail::Model m(p);
  const cplx zz = p.sign < 0 ? family_detail::reflect(z) : upper(z);
  if (zz.imag() < 0.0) throw DomainError("k_map: point below the real axis");
  const cplx u = m.to_u(zz);
  if (m.singular(u)) throw DomainError("k_map: singular point");
  switch (p.regime) {
    case Regime::collision: return std::exp(m.F(u));
    case Regime::spiral: return m.F(u) / m.F(m.to_u(m.kappa));
    default: return m.F(u);
  }
}

inline cplx k_derivative(const FamilyParams& p, cplx z) {
  const family_detail::Model m(p);
  const cplx u = m.to_u(p.sign < 0 ? family_detail::reflect(z) : upper(z));
  cplx d;
  switch (p.regime) {
    case Regime::collision: d = std::exp(m.F(u)) * m.dF(u); break;
    case Regime::spiral: d = m.dF(u) / m.F(m.to_u(m.kappa)); break;
    default: d = m.dF(u); break;
  }
  return p.sign < 0 ? -std::conj(d) : d;
}

inline cplx k_inverse(const FamilyParams& p, cplx w, cplx seed) {
  if (p.regime == Regime::vertical) throw DomainError("k_inverse: kappa = 0 has no uniformizing map");
  const family_detail::Model m(p);
  const cplx sd = p.sign < 0 ? family_detail::reflect(seed) : seed;
  cplx target;
  switch (p.regime) {
    case Regime::collision: target = log_upper(w); break;
    case Regime::spiral: target = w * m.F(m.to_u(m.kappa)); break;
    default: target = w; break;
  }
  const cplx z = m.to_z(m.solve(target, m.to_u(sd)));
  return p.sign < 0 ? family_detail::reflect(z) : z;
}

// flow value k(Gamma(s)) along the trace
inline cplx flow_value(const FamilyParams& p, double s) {
  const family_detail::Model m(p);
  switch (p.regime) {
    case Regime::collision: return std::exp(m.flow(m.F(m.to_u(m.kappa)), s));
    case Regime::spiral: return m.flow(1.0, s);
    case Regime::tangential: return m.flow(cplx(0.0, pi), s);
    default: return 0.0;
  }
}



// Gamma(s) = k^{-1}(flow(s)); samples reparametrized to t = 1 - e^{-s}
inline Trace trace_explicit(const FamilyParams& p, const std::vector<double>& s_grid) {
  Trace out;
  out.horizon = 1.0;
  auto push = [&](double s, cplx z) {
    TracePoint tp;
    tp.t = -std::expm1(-s);
    tp.rem = std::exp(-s);
    tp.z = p.sign < 0 ? family_detail::reflect(z) : upper(z);
    out.pts.push_back(tp);
  };
  if (s_grid.empty() || s_grid.front() != 0.0) throw ArgumentError("trace_explicit: s grid must start at 0");
  if (p.regime == Regime::vertical) {
    for (double s : s_grid) push(s, cplx(0.0, 2.0 * std::sqrt(-std::expm1(-s))));
  } else {
    const family_detail::Model m(p);
    const cplx u0 = m.to_u(m.kappa);
    family_detail::continue_flow(m, u0, m.F(u0), true, s_grid, push);
  }
  out.T = out.pts.back().t;
  return out;
}

// g_t(z) = sqrt(1-t) * G_s(z); G_s found by continuation from G_0 = id
inline cplx g_explicit(const FamilyParams& p, double t, cplx z) {
  if (!(t >= 0.0 && t < 1.0)) throw ArgumentError("g_explicit: t must be in [0,1)");
  if (!finite(z)) throw ArgumentError("g_explicit: non-finite point");
  if (t == 0.0) return z;
  const double s = -std::log1p(-t);
  if (p.regime == Regime::vertical) {
    const cplx u = upper(z);
    return upper_sqrt(u * u + 4.0 * t, u.real());
  }
  const family_detail::Model m(p);
  const cplx zz = p.sign < 0 ? family_detail::reflect(z) : upper(z);
  if (zz.imag() < 0.0) throw DomainError("g_explicit: point below the real axis");
  cplx G = zz;
  try {
    const cplx u = m.to_u(zz);
    // the maps G_s run the flow backwards: k(G_s(z)) = flow(k(z), -s)
    family_detail::continue_flow(m, u, m.F(u), false, {s}, [&](double, cplx g) { G = g; }, -1.0);
  } catch (const Error&) {
    throw DomainError("g_explicit: point on or inside the hull");
  }
  const cplx g = std::sqrt(1.0 - t) * G;
  return p.sign < 0 ? family_detail::reflect(g) : g;
}

}  // namespace loewner
