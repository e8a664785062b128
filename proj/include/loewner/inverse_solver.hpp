#pragma once

#include <loewner/driving.hpp>

namespace loewner {

struct CurveSamples {
  std::vector<cplx> points;

  double base() const { return points.front().real(); }

  void validate() const {
    if (points.size() < 2) throw ArgumentError("curve: need at least two samples");
    if (points.front().imag() != 0.0) throw ArgumentError("curve: first sample must lie on R");
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (!finite(points[k])) throw ArgumentError("curve: non-finite sample " + std::to_string(k));
      if (k > 0 && !(points[k].imag() > 0.0))
        throw ArgumentError("curve: sample " + std::to_string(k) + " not in the open upper half-plane");
      if (k > 0 && points[k] == points[k - 1])
        throw ArgumentError("curve: repeated sample " + std::to_string(k));
    }
  }
};

inline CurveSamples curve_from_trace(const Trace& g) {
  CurveSamples c;
  for (std::size_t k = 0; k < g.pts.size(); ++k) {
    const cplx z = g.pts[k].z;
    if (k == 0) c.points.push_back(cplx(z.real(), 0.0));
    else if (z.imag() > 0.0 && z != c.points.back()) c.points.push_back(z);
  }
  return c;
}

struct UnzipStep {
  double lambda = 0.0;
  double dt = 0.0;
};

inline UnzipStep unzip_step(cplx w) {
  if (!finite(w)) throw ArgumentError("unzip_step: non-finite point");
  if (w.imag() < 0.0) throw DomainError("unzip_step: point below the real axis");
  return {w.real(), 0.25 * w.imag() * w.imag()};
}

struct DrivenCurve {
  DrivingTerm driving;
  MapChain chain;
};

// Discrete unzipping: step j removes the vertical slit under the image of
// sample j and maps every later sample forward.  Remaining capacities are
// accumulated from the far end so they stay accurate near the horizon.
inline DrivenCurve drive_curve_with_chain(const CurveSamples& c, double below_axis_tol = 1e-12) {
  c.validate();
  std::vector<cplx> w(c.points.begin() + 1, c.points.end());
  std::vector<double> lam{c.base()}, dts;
  std::vector<SlitStep> steps;
  double scale = 0.0;
  for (const auto& p : c.points) scale = std::max(scale, std::abs(p - c.points.front()));
  for (std::size_t j = 0; j < w.size(); ++j) {
    cplx wj = w[j];
    if (wj.imag() < 0.0) {
      if (wj.imag() < -below_axis_tol * (1.0 + scale))
        throw NumericError("drive_curve: image point left the closed upper half-plane", j + 1);
      wj = cplx(wj.real(), 0.0);
    }
    const UnzipStep u = unzip_step(wj);
    if (u.dt <= 0.0) continue;
    lam.push_back(u.lambda);
    dts.push_back(u.dt);
    steps.push_back({u.lambda, u.dt});
    for (std::size_t k = j + 1; k < w.size(); ++k) w[k] = slit_forward(w[k], u.lambda, u.dt);
  }
  const std::size_t n = lam.size();
  std::vector<double> t(n, 0.0), rem(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) t[k] = t[k - 1] + dts[k - 1];
  for (std::size_t k = n - 1; k-- > 0;) rem[k] = rem[k + 1] + dts[k];
  DrivenCurve out;
  out.driving = DrivingTerm::from_samples(std::move(t), std::move(rem), std::move(lam), 0.0);
  out.driving.horizon = out.driving.T;
  out.chain = MapChain(std::move(steps));
  return out;
}

inline DrivingTerm drive_curve(const CurveSamples& c) { return drive_curve_with_chain(c).driving; }

// images of the two sides of the hull base: [x1, x2] = g(hull) on R.
// Slit bases falling outside the current interval widen it, so hulls whose
// discrete slits do not stack exactly on each other are still covered.
inline std::pair<double, double> preimage_interval(const MapChain& chain, double base,
                                                   std::size_t count) {
  if (chain.empty()) throw ArgumentError("preimage_interval: empty chain");
  count = std::min(count, chain.size());
  if (count == 0) return {base, base};
  const double eps = 1e-8 * std::sqrt(chain.total_capacity());
  double lo = base - eps, hi = base + eps;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& s = chain.steps()[k];
    lo = std::min(lo, s.center);
    hi = std::max(hi, s.center);
    lo = s.center - std::sqrt((lo - s.center) * (lo - s.center) + 4.0 * s.capacity);
    hi = s.center + std::sqrt((hi - s.center) * (hi - s.center) + 4.0 * s.capacity);
  }
  return {lo, hi};
}

inline std::pair<double, double> preimage_interval(const MapChain& chain, double base) {
  return preimage_interval(chain, base, chain.size());
}

// slit base of the first step, the natural base point of a chain's hull
inline double chain_base(const MapChain& chain) { return chain.steps().front().center; }

struct HullComparison {
  double sup_driving_gap = 0.0;
  double hcap_gap = 0.0;
  double epsilon = 0.0;  // discrete Hausdorff distance between the sample sets
};

inline double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  auto one = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double h = 0.0;
    for (const auto& p : x) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& q : y) m = std::min(m, std::abs(p - q));
      h = std::max(h, m);
    }
    return h;
  };
  return std::max(one(a, b), one(b, a));
}

inline HullComparison compare_hulls(const CurveSamples& c1, const CurveSamples& c2) {
  const DrivingTerm d1 = drive_curve(c1), d2 = drive_curve(c2);
  HullComparison h;
  const double T = std::min(d1.T, d2.T);
  auto scan = [&](const DrivingTerm& d) {
    for (double t : d.t) {
      if (t > T) break;
      h.sup_driving_gap = std::max(h.sup_driving_gap, std::fabs(d1.at(t) - d2.at(t)));
    }
  };
  scan(d1);
  scan(d2);
  h.sup_driving_gap = std::max(h.sup_driving_gap, std::fabs(d1.at(T) - d2.at(T)));
  h.hcap_gap = std::fabs(d1.T - d2.T);
  h.epsilon = hausdorff(c1.points, c2.points);
  return h;
}

}  // namespace loewner
