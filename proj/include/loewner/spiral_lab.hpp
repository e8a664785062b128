#pragma once

#include <loewner/inverse_solver.hpp>

namespace loewner {

struct CompactSet {
  enum class Kind { disk, segment };
  Kind kind = Kind::disk;
  cplx center{0.0, 2.0};
  double size = 0.5;  // radius for a disk, half length for a horizontal segment

  static CompactSet disk(cplx c, double r) {
    CompactSet a{Kind::disk, c, r};
    a.validate();
    return a;
  }
  static CompactSet segment(cplx c, double half_length) {
    CompactSet a{Kind::segment, c, half_length};
    a.validate();
    return a;
  }

  void validate() const {
    if (!(size > 0.0)) throw ArgumentError("compact set: size must be positive");
    if (kind == Kind::disk && !(center.imag() > size))
      throw ArgumentError("compact set: disk must lie in the open upper half-plane");
    if (kind == Kind::segment && !(center.imag() > 0.0))
      throw ArgumentError("compact set: segment must lie in the open upper half-plane");
  }

  double distance(cplx z) const {
    if (kind == Kind::disk) return std::max(0.0, std::abs(z - center) - size);
    const double x = std::clamp(z.real() - center.real(), -size, size);
    return std::abs(z - (center + x));
  }
};

inline cplx nu0(double t) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("nu0: t must be in [0,1)");
  return t * std::polar(1.0, 1.0 / (t - 1.0));
}

// the point one turn earlier: 1/(t-1) shifted by 2 pi
inline double nu0_hat_parameter(double t) {
  if (!(t > 1.0 - 1.0 / (2.0 * pi) && t < 1.0)) throw DomainError("nu0_hat: no previous turn");
  return 1.0 + 1.0 / (2.0 * pi + 1.0 / (t - 1.0));
}

inline cplx nu0_hat(double t) { return nu0(nu0_hat_parameter(t)); }

// conformal map of the punctured unit disk onto the exterior of A, 0 -> infinity
inline cplx exterior_map(const CompactSet& a, cplx z) {
  if (z == cplx(0.0, 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  if (a.kind == CompactSet::Kind::disk) return a.center + a.size / z;
  return a.center + 0.5 * a.size * (z + 1.0 / z);
}

inline cplx exterior_map_derivative(const CompactSet& a, cplx z) {
  if (a.kind == CompactSet::Kind::disk) return -a.size / (z * z);
  return 0.5 * a.size * (1.0 - 1.0 / (z * z));
}

struct SpiralCurve {
  CurveSamples samples;
  std::vector<double> params;  // nu0 parameter of each sample
  double t0 = 0.0;
  double rotation = 0.0;  // theta0
};

namespace spiral_detail {

inline cplx point(const CompactSet& a, double theta0, double t) {
  return exterior_map(a, std::polar(1.0, theta0) * nu0(t));
}

inline cplx tangent(const CompactSet& a, double theta0, double t) {
  const cplx z = std::polar(1.0, theta0) * nu0(t);
  const double phi = 1.0 / (t - 1.0);
  const cplx dnu = std::polar(1.0, phi) * cplx(1.0, -t / ((t - 1.0) * (t - 1.0)));
  return exterior_map_derivative(a, z) * std::polar(1.0, theta0) * dnu;
}

// circles |z| >= r_star map into the open upper half-plane
inline double safe_radius(const CompactSet& a) {
  auto min_im = [&](double r) {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 720; ++k) m = std::min(m, exterior_map(a, std::polar(r, 2.0 * pi * k / 720)).imag());
    return m;
  };
  double lo = 1e-6, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (min_im(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

// last parameter t <= t_hi with Im = 0, scanning uniformly in the angle 1/(1-t)
inline std::optional<double> last_crossing(const CompactSet& a, double theta0, double t_hi) {
  const double phi_hi = 1.0 / (1.0 - t_hi);
  const double dphi = 2.0 * pi / 256.0;
  auto im = [&](double t) { return point(a, theta0, t).imag(); };
  double phi = phi_hi;
  double prev = im(t_hi);
  while (phi > 1.0 + 1e-9) {
    const double phi_lo = std::max(1.0 + 1e-9, phi - dphi);
    const double cur = im(1.0 - 1.0 / phi_lo);
    if (cur <= 0.0 && prev > 0.0) {
      double lo = 1.0 - 1.0 / phi_lo, hi = 1.0 - 1.0 / phi;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (im(mid) > 0.0 ? hi : lo) = mid;
      }
      return hi;
    }
    prev = cur;
    phi = phi_lo;
  }
  return std::nullopt;
}

// cosine of the angle between the start direction and the positive real axis
inline double start_slope(const CompactSet& a, double theta0, double t0) {
  const cplx d = tangent(a, theta0, t0);
  return d.real() / std::abs(d);
}

}  // namespace spiral_detail

struct SpiralStart {
  double theta0 = 0.0;
  double t0 = 0.0;
};

// Rotation theta0 for which the last real crossing of f(e^{i theta0} nu0(t))
// is perpendicular to R.  720 seeds, then bisection on the start slope.
inline SpiralStart find_spiral_start(const CompactSet& a) {
  a.validate();
  const double r_star = spiral_detail::safe_radius(a);
  const int n_seeds = 720;
  std::vector<double> th(n_seeds + 1), t0(n_seeds + 1), slope(n_seeds + 1);
  std::vector<bool> ok(n_seeds + 1);
  for (int k = 0; k <= n_seeds; ++k) {
    th[k] = 2.0 * pi * k / n_seeds;
    const auto c = spiral_detail::last_crossing(a, th[k], r_star);
    ok[k] = c.has_value();
    if (ok[k]) {
      t0[k] = *c;
      slope[k] = spiral_detail::start_slope(a, th[k], t0[k]);
    }
  }
  std::optional<SpiralStart> best;
  for (int k = 0; k < n_seeds; ++k) {
    if (!ok[k] || !ok[k + 1]) continue;
    if (std::fabs(t0[k] - t0[k + 1]) > 0.05) continue;  // crossing moved to another turn
    if ((slope[k] > 0.0) == (slope[k + 1] > 0.0)) continue;
    double lo = th[k], hi = th[k + 1];
    const bool lo_pos = slope[k] > 0.0;
    SpiralStart st;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto c = spiral_detail::last_crossing(a, mid, r_star);
      if (!c) break;
      const bool pos = spiral_detail::start_slope(a, mid, *c) > 0.0;
      (pos == lo_pos ? lo : hi) = mid;
    }
    st.theta0 = 0.5 * (lo + hi);
    const auto c = spiral_detail::last_crossing(a, st.theta0, r_star);
    if (!c) continue;
    st.t0 = *c;
    if (!best || st.t0 > best->t0) best = st;
  }
  if (!best) throw Error("build_spiral: no perpendicular real crossing found");
  return *best;
}

// samples uniform in the turning angle 1/(1-t) on [t0, t_max]
inline SpiralCurve build_spiral(const CompactSet& a, double t_max, int n) {
  if (!(t_max < 1.0)) throw ArgumentError("build_spiral: t_max must be < 1");
  if (n < 3) throw ArgumentError("build_spiral: need at least 3 samples");
  const SpiralStart st = find_spiral_start(a);
  if (!(t_max > st.t0)) throw ArgumentError("build_spiral: t_max before the start of the spiral");
  SpiralCurve sc;
  sc.t0 = st.t0;
  sc.rotation = st.theta0;
  const double p0 = 1.0 / (1.0 - st.t0), p1 = 1.0 / (1.0 - t_max);
  for (int k = 0; k < n; ++k) {
    const double phi = p0 + (p1 - p0) * k / (n - 1);
    const double t = k == 0 ? st.t0 : (k == n - 1 ? t_max : 1.0 - 1.0 / phi);
    cplx z = spiral_detail::point(a, st.theta0, t);
    if (k == 0) z = cplx(z.real(), 0.0);
    else if (!(z.imag() > 0.0)) throw Error("build_spiral: sample " + std::to_string(k) + " not above R");
    sc.samples.points.push_back(z);
    sc.params.push_back(t);
  }
  return sc;
}

struct SpiralDriving {
  SpiralCurve curve;
  DrivingTerm full;   // normalized to capacity 1 over the whole built spiral
  double capacity = 0.0;  // half-plane capacity before normalization
};

// Build to nu0-parameter `extent`, unzip, and normalize to capacity 1.
// Beyond about 1.5 turns the remaining capacity is below double precision,
// so the default extent already resolves the whole driving term.
inline SpiralDriving spiral_driving_full(const CompactSet& a, int n, double extent = 0.9) {
  SpiralDriving out;
  out.curve = build_spiral(a, extent, n);
  const DrivingTerm raw = drive_curve(out.curve.samples);
  out.capacity = raw.T;
  out.full = scale_driving(raw, std::sqrt(raw.T));
  out.full.horizon = 1.0;
  return out;
}

// lambda^A restricted to normalized capacity [0, t_max]
inline DrivingTerm spiral_driving(const CompactSet& a, double t_max = 1.0 - std::ldexp(1.0, -16),
                                  int n = 12000, double extent = 0.9) {
  if (!(t_max > 0.0 && t_max < 1.0)) throw ArgumentError("spiral_driving: t_max must be in (0,1)");
  const SpiralDriving sd = spiral_driving_full(a, n, extent);
  return truncate_driving(sd.full, 1.0 - t_max);
}

}  // namespace loewner
