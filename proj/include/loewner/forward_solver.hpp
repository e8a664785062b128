#pragma once

#include <loewner/driving.hpp>

namespace loewner {

enum class GridKind { uniform_t, geometric_s };

struct SolverConfig {
  int n_steps = 1024;
  GridKind grid = GridKind::uniform_t;
  double tail_fraction = 0.5;  // geometric part covers remaining capacity below tail_fraction*horizon
  double tail_share = 0.5;     // fraction of cells spent on the geometric part
  double s_span = 40.0;        // depth of the geometric part when the term runs up to its horizon
  int refinement_levels = 1;   // levels combined by Richardson extrapolation in solve_G
};

inline void validate(const SolverConfig& c) {
  if (c.n_steps < 1) throw ArgumentError("solver config: n_steps must be >= 1");
  if (!(c.tail_fraction > 0.0 && c.tail_fraction < 1.0))
    throw ArgumentError("solver config: tail_fraction must be in (0,1)");
  if (!(c.tail_share > 0.0 && c.tail_share < 1.0))
    throw ArgumentError("solver config: tail_share must be in (0,1)");
  if (!(c.s_span > 0.0)) throw ArgumentError("solver config: s_span must be positive");
  if (c.refinement_levels < 1) throw ArgumentError("solver config: refinement_levels must be >= 1");
}

// grid nodes in capacity time, each with its remaining capacity to the horizon
struct Grid {
  std::vector<double> t, rem;
  std::size_t cells() const { return t.empty() ? 0 : t.size() - 1; }
};

inline Grid make_grid(double T, double horizon, const SolverConfig& cfg) {
  validate(cfg);
  Grid g;
  const double end_rem = horizon - T;
  const int n = cfg.n_steps;
  auto push = [&](double r) {
    g.t.push_back(horizon - r);
    g.rem.push_back(r);
  };
  const double r_tail = cfg.tail_fraction * horizon;
  if (cfg.grid == GridKind::uniform_t || end_rem >= r_tail || n < 4) {
    for (int k = 0; k <= n; ++k) {
      g.t.push_back(T * k / n);
      g.rem.push_back(end_rem + T * static_cast<double>(n - k) / n);
    }
    g.t.back() = T;
    g.rem.back() = end_rem;
    return g;
  }
  int n_tail = std::clamp(static_cast<int>(std::lround(cfg.tail_share * n)), 2, n - 1);
  const int n_lin = n - n_tail;
  const double t_split = horizon - r_tail;
  for (int k = 0; k < n_lin; ++k) {
    g.t.push_back(t_split * k / n_lin);
    g.rem.push_back(horizon - t_split * k / n_lin);
  }
  g.rem[0] = horizon;
  if (end_rem > 0.0) {
    const double ds = std::log(r_tail / end_rem) / n_tail;
    for (int j = 0; j < n_tail; ++j) push(r_tail * std::exp(-ds * j));
    push(end_rem);
  } else {
    const int n_geo = n_tail - 1;
    const double ds = cfg.s_span / n_geo;
    for (int j = 0; j <= n_geo; ++j) push(r_tail * std::exp(-ds * j));
    push(0.0);
  }
  g.t.back() = T;
  return g;
}

inline Grid make_grid(const DrivingTerm& l, const SolverConfig& cfg) {
  return make_grid(l.T, l.horizon, cfg);
}

// one vertical slit per cell, driven by the value at the cell midpoint
inline MapChain build_chain(const DrivingTerm& l, const Grid& g) {
  std::vector<SlitStep> steps;
  steps.reserve(g.cells());
  for (std::size_t k = 0; k + 1 < g.t.size(); ++k) {
    const double r_mid = 0.5 * (g.rem[k] + g.rem[k + 1]);
    const double t_mid = 0.5 * (g.t[k] + g.t[k + 1]);
    steps.push_back({l.at(t_mid, r_mid), g.rem[k] - g.rem[k + 1]});
  }
  return MapChain(std::move(steps));
}

inline MapChain build_chain(const DrivingTerm& l, const SolverConfig& cfg) {
  return build_chain(l, make_grid(l, cfg));
}

// gamma(t_k) = f_1 o ... o f_k (lambda(t_k))
inline Trace solve_trace(const DrivingTerm& l, const Grid& g, double below_axis_tol = 1e-9) {
  const MapChain chain = build_chain(l, g);
  const auto& steps = chain.steps();
  if (steps.size() != g.cells()) throw NumericError("solve_trace: degenerate grid cell", steps.size());
  Trace out;
  out.T = l.T;
  out.horizon = l.horizon;
  out.pts.resize(g.t.size());
  for (std::size_t k = 0; k < g.t.size(); ++k) {
    cplx w(l.at(g.t[k], g.rem[k]), 0.0);
    for (std::size_t j = k; j-- > 0;) {
      w = slit_inverse(w, steps[j].center, steps[j].capacity);
    }
    if (w.imag() < 0.0) {
      if (w.imag() < -below_axis_tol * (1.0 + std::abs(w)))
        throw NumericError("solve_trace: trace point left the closed upper half-plane", k);
      w = cplx(w.real(), 0.0);
    }
    out.pts[k] = TracePoint{g.t[k], g.rem[k], w};
  }
  return out;
}

inline Trace solve_trace(const DrivingTerm& l, const SolverConfig& cfg) {
  return solve_trace(l, make_grid(l, cfg));
}

// ---------------------------------------------------------------------------
// time-changed maps  G_s = g_t / sqrt(1-t)

class GMap {
 public:
  GMap() = default;
  GMap(double s, std::vector<MapChain> levels) : s_(s), levels_(std::move(levels)) {}

  double s() const { return s_; }
  double scale() const { return std::exp(0.5 * s_); }
  const MapChain& chain(std::size_t level = 0) const { return levels_.at(level); }
  std::size_t levels() const { return levels_.size(); }

  // Richardson over refinement levels with step ratio 2 and assumed order 2
  cplx forward(cplx z) const { return combine([&](const MapChain& c) { return c.forward(z) * scale(); }); }
  cplx inverse(cplx w) const { return combine([&](const MapChain& c) { return c.inverse(w / scale()); }); }

 private:
  template <class F>
  cplx combine(F f) const {
    std::vector<cplx> v;
    for (const auto& c : levels_) v.push_back(f(c));
    double p = 4.0;
    for (std::size_t m = 1; m < v.size(); ++m, p *= 2.0) {
      for (std::size_t i = v.size() - 1; i >= m; --i) v[i] = (p * v[i] - v[i - 1]) / (p - 1.0);
    }
    return v.back();
  }

  double s_ = 0.0;
  std::vector<MapChain> levels_;
};

// cells uniform in s on [0, s]; midpoint driving sigma(s_mid) sqrt(1 - t_mid)
inline MapChain sigma_chain(const SigmaTerm& sig, double s, int n) {
  std::vector<SlitStep> steps;
  steps.reserve(n);
  double r0 = 1.0;
  for (int k = 0; k < n; ++k) {
    const double r1 = std::exp(-s * (k + 1) / n);
    const double rm = 0.5 * (r0 + r1);
    steps.push_back({sig.at(-std::log(rm)) * std::sqrt(rm), r0 - r1});
    r0 = r1;
  }
  return MapChain(std::move(steps));
}

inline std::vector<GMap> solve_G(const SigmaTerm& sig, const std::vector<double>& s_grid,
                                 const SolverConfig& cfg) {
  validate(cfg);
  std::vector<GMap> out;
  for (double s : s_grid) {
    if (!(s >= 0.0)) throw ArgumentError("solve_G: s must be nonnegative");
    if (!sig.exact && s > sig.s_max() * (1.0 + 1e-12))
      throw ArgumentError("solve_G: s beyond the sampled sigma range");
    std::vector<MapChain> levels;
    if (s > 0.0) {
      for (int l = 0; l < cfg.refinement_levels; ++l) levels.push_back(sigma_chain(sig, s, cfg.n_steps << l));
    } else {
      levels.emplace_back();
    }
    out.emplace_back(s, std::move(levels));
  }
  return out;
}

}  // namespace loewner
