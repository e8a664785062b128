#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loewner {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// input outside the domain of a map (inside a slit, below R, at a pole)
struct DomainError : Error {
  using Error::Error;
};

// non-finite or malformed arguments
struct ArgumentError : Error {
  using Error::Error;
};

// caller broke a documented precondition (normalization, splicing)
struct ContractError : Error {
  using Error::Error;
};

// numerical breakdown at a known step or sample
struct NumericError : Error {
  NumericError(const std::string& what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index(index) {}
  std::size_t index;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, cplx last, double residual)
      : Error(what), last_iterate(last), residual(residual) {}
  cplx last_iterate;
  double residual;
};

struct Tolerances {
  double kernel = 1e-12;
  double integral = 1e-6;
  double below_axis = 1e-9;  // allowed Im < 0 before an image point is rejected
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// turn -0.0 imaginary parts into +0.0 so that principal branches on R
// agree with their limits from the upper half-plane
inline cplx upper(cplx z) {
  return {z.real(), z.imag() == 0.0 ? 0.0 : z.imag()};
}

// principal square root; written out so that conj(z) gives conj(result) bitwise
inline cplx principal_sqrt(cplx v) {
  const double x = v.real(), y = v.imag();
  const double m = std::sqrt(x * x + y * y);
  if (m == 0.0) return {0.0, 0.0};
  if (x >= 0.0) {
    const double a = std::sqrt(0.5 * (m + x));
    return {a, y / (2.0 * a)};
  }
  const double b = std::sqrt(0.5 * (m - x));
  return {std::fabs(y) / (2.0 * b), y < 0.0 ? -b : b};
}

// root of v in the closed upper half-plane; on R the sign follows `hint`
inline cplx upper_sqrt(cplx v, double hint) {
  cplx r = principal_sqrt(v);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && hint < 0.0)) r = -r;
  return upper(r);
}

// principal log with arg in [0, pi] for points of the closed upper half-plane
inline cplx log_upper(cplx z) { return std::log(upper(z)); }

// ---------------------------------------------------------------------------
// elementary vertical slit map
//   forward  g(z) = c + sqrt((z-c)^2 + 4D)   removes {c + iy : 0 <= y <= 2 sqrt D}
//   inverse  f(w) = c + sqrt((w-c)^2 - 4D)

enum class Direction { forward, inverse };

inline cplx slit_forward(cplx z, double c, double D) {
  const cplx u = z - c;
  return c + upper_sqrt(u * u + 4.0 * D, u.real());
}

inline cplx slit_inverse(cplx w, double c, double D) {
  const cplx u = w - c;
  return c + upper_sqrt(u * u - 4.0 * D, u.real());
}

// forward map restricted to R minus the slit base
inline double slit_forward_real(double x, double c, double D) {
  const double u = x - c;
  const double r = std::sqrt(u * u + 4.0 * D);
  return u < 0.0 ? c - r : c + r;
}

inline cplx vertical_slit_map(cplx z, double c, double D, Direction dir) {
  if (!finite(z) || !std::isfinite(c) || !std::isfinite(D))
    throw ArgumentError("vertical_slit_map: non-finite input");
  if (D < 0.0) throw ArgumentError("vertical_slit_map: negative capacity");
  if (z.imag() < 0.0) throw DomainError("vertical_slit_map: point below the real axis");
  if (D == 0.0) return z;
  if (dir == Direction::forward) {
    const double height = 2.0 * std::sqrt(D);
    if (z.real() == c && z.imag() < height && z.imag() > 0.0)
      throw DomainError("vertical_slit_map: point inside the slit");
    return slit_forward(z, c, D);
  }
  return slit_inverse(z, c, D);
}

// ---------------------------------------------------------------------------
// map chains

struct SlitStep {
  double center = 0.0;
  double capacity = 0.0;
};

class MapChain {
 public:
  MapChain() = default;

  // zero-capacity steps are dropped
  explicit MapChain(std::vector<SlitStep> steps) {
    steps_.reserve(steps.size());
    for (const auto& s : steps) {
      if (!(s.capacity >= 0.0) || !std::isfinite(s.center))
        throw ArgumentError("MapChain: invalid step");
      if (s.capacity > 0.0) {
        steps_.push_back(s);
        total_ += s.capacity;
      }
    }
  }

  const std::vector<SlitStep>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  double total_capacity() const { return total_; }

  // g = g_n o ... o g_1 applied to the first `count` steps
  cplx forward(cplx z, std::size_t count) const {
    if (z.imag() < 0.0) throw DomainError("chain forward: point below the real axis");
    count = std::min(count, steps_.size());
    for (std::size_t k = 0; k < count; ++k) {
      const auto& s = steps_[k];
      if (z.real() == s.center && z.imag() > 0.0 && z.imag() < 2.0 * std::sqrt(s.capacity))
        throw NumericError("chain forward: point entered a slit", k);
      z = slit_forward(z, s.center, s.capacity);
    }
    return z;
  }
  cplx forward(cplx z) const { return forward(z, steps_.size()); }

  // f = f_1 o ... o f_n over the first `count` steps
  cplx inverse(cplx w, std::size_t count) const {
    count = std::min(count, steps_.size());
    w = upper(w);
    for (std::size_t k = count; k-- > 0;) w = slit_inverse(w, steps_[k].center, steps_[k].capacity);
    return w;
  }
  cplx inverse(cplx w) const { return inverse(w, steps_.size()); }

  double forward_real(double x, std::size_t count) const {
    count = std::min(count, steps_.size());
    for (std::size_t k = 0; k < count; ++k) {
      if (x == steps_[k].center) throw NumericError("chain forward: real point at a slit base", k);
      x = slit_forward_real(x, steps_[k].center, steps_[k].capacity);
    }
    return x;
  }
  double forward_real(double x) const { return forward_real(x, steps_.size()); }

  MapChain then(const MapChain& next) const {
    std::vector<SlitStep> s = steps_;
    s.insert(s.end(), next.steps_.begin(), next.steps_.end());
    return MapChain(std::move(s));
  }

 private:
  std::vector<SlitStep> steps_;
  double total_ = 0.0;
};

inline cplx chain_eval(const MapChain& chain, cplx z, Direction dir) {
  if (!finite(z)) throw ArgumentError("chain_eval: non-finite input");
  return dir == Direction::forward ? chain.forward(z) : chain.inverse(z);
}

// ---------------------------------------------------------------------------
// quadrature: composite 32-point Gauss-Legendre with adaptive bisection

struct GaussRule {
  std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre32() {
  static const GaussRule rule = [] {
    constexpr int n = 32;
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      r.x[i] = x;
      r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

inline double gauss_panel(const std::function<double(double)>& f, double a, double b) {
  const auto& g = gauss_legendre32();
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(m + h * g.x[i]);
  return s * h;
}

namespace detail {
inline double adapt(const std::function<double(double)>& f, double a, double b, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double l = gauss_panel(f, a, m), r = gauss_panel(f, m, b);
  if (depth <= 0 || std::fabs(l + r - whole) <= tol) return l + r;
  return adapt(f, a, m, l, 0.5 * tol, depth - 1) + adapt(f, m, b, r, 0.5 * tol, depth - 1);
}
}  // namespace detail

// panels split dyadically wherever the 32-node estimate is not yet stable,
// which concentrates them at endpoint singularities and near-poles
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-13, int max_depth = 60) {
  if (a == b) return 0.0;
  return detail::adapt(f, a, b, gauss_panel(f, a, b), abs_tol, max_depth);
}

// ---------------------------------------------------------------------------
// half-plane capacity

enum class HcapStatus { ok, accuracy_warning };

struct HcapResult {
  double value = 0.0;
  HcapStatus status = HcapStatus::ok;
};

// which normalized map the evaluator represents: g = z + 2d/z + ... or f = z - 2d/z + ...
enum class MapSide { forward_g, inverse_f };

// d from the expansion at z = iR, with one Richardson step in R
inline HcapResult hcap_expansion(const std::function<cplx(cplx)>& map, MapSide side, double R,
                                 double hull_diameter) {
  auto est = [&](double r) {
    const cplx z(0.0, r);
    const cplx d = z * (map(z) - z) * 0.5;
    return side == MapSide::forward_g ? d.real() : -d.real();
  };
  HcapResult out;
  out.value = 2.0 * est(2.0 * R) - est(R);
  if (!(R > 10.0 * hull_diameter)) out.status = HcapStatus::accuracy_warning;
  return out;
}

// d = (1/2pi) * integral over the image interval of Im f(x)
inline HcapResult hcap_cauchy(const std::function<cplx(cplx)>& inverse_map, double x1, double x2,
                              double abs_tol = 1e-12) {
  HcapResult out;
  out.value = integrate([&](double x) { return inverse_map(cplx(x, 0.0)).imag(); }, x1, x2,
                        abs_tol) /
              (2.0 * pi);
  return out;
}

// ---------------------------------------------------------------------------
// hyperbolic distance to infinity and the interval integral

struct HyperbolicResult {
  double rho = 0.0;       // rho(z, infinity) in the complement of I
  double integral = 0.0;  // quadrature of  int_I dt/|t-z|, equal to 2 rho
};

// rho in C* minus the closed unit disk
inline double rho_disk(cplx z) {
  const double r = std::abs(z);
  if (!(r > 1.0)) throw DomainError("rho_disk: point not outside the unit disk");
  return std::log1p(2.0 / (r - 1.0));
}

// rho in C* minus [a, b], via x -> [-1,1] then the Joukowski inverse
inline double rho_interval(cplx z, double a, double b) {
  if (!(b > a)) throw ArgumentError("rho_interval: empty interval");
  const cplx zeta = (2.0 * z - (a + b)) / (b - a);
  if (zeta.imag() == 0.0 && std::fabs(zeta.real()) <= 1.0)
    throw DomainError("rho_interval: point on the interval");
  const cplx r = std::sqrt(zeta - 1.0) * std::sqrt(zeta + 1.0);
  cplx w = zeta + r;
  if (std::abs(w) < 1.0) w = zeta - r;
  return rho_disk(w);
}

inline HyperbolicResult hyperbolic_tools(cplx z, double a, double b, double abs_tol = 1e-14) {
  HyperbolicResult out;
  out.rho = rho_interval(z, a, b);
  out.integral = integrate([&](double t) { return 1.0 / std::abs(t - z); }, a, b, abs_tol);
  return out;
}

}  // namespace loewner
