#pragma once

#include <loewner/core.hpp>

#include <memory>
#include <optional>

namespace loewner {

// what is known in closed form about a driving term
//   constant:     lambda = offset
//   sqrt_family:  lambda = offset + kappa * sqrt(horizon - t)
//   scaled:       (1/ratio) * inner(ratio^2 t) of a non-closed inner form
//   analytic:     exact evaluator without a named family
//   sampled:      samples only
enum class FormKind { constant, sqrt_family, scaled, analytic, sampled };

struct FormTag {
  FormKind kind = FormKind::sampled;
  double kappa = 0.0;
  double offset = 0.0;
  double ratio = 1.0;
};

// evaluator receiving (t, horizon - t); both are passed so that forms
// near the horizon never lose digits to 1 - t cancellation
using DrivingFn = std::function<double(double, double)>;

// Capacity-parametrized real driving term on [0, T].
//
// `horizon` is the capacity toward which the term is referenced; rem[k] is
// horizon - t[k] stored independently of t[k].  For a term normalized to
// total capacity 1 the horizon is 1, also when only [0, T] with T < 1 is kept.
class DrivingTerm {
 public:
  std::vector<double> t, rem, value;
  double T = 0.0;
  double horizon = 0.0;
  FormTag tag;
  DrivingFn exact;

  static DrivingTerm from_samples(std::vector<double> ts, std::vector<double> vs) {
    DrivingTerm d;
    if (ts.empty() || ts.size() != vs.size()) throw ArgumentError("driving term: bad sample arrays");
    d.T = ts.back();
    d.horizon = d.T;
    d.rem.resize(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) d.rem[k] = d.T - ts[k];
    d.t = std::move(ts);
    d.value = std::move(vs);
    d.validate();
    return d;
  }

  // samples with remaining capacities computed independently of t
  static DrivingTerm from_samples(std::vector<double> ts, std::vector<double> rs,
                                  std::vector<double> vs, double horizon) {
    DrivingTerm d;
    if (ts.empty() || ts.size() != vs.size() || ts.size() != rs.size())
      throw ArgumentError("driving term: bad sample arrays");
    d.T = ts.back();
    d.horizon = horizon;
    d.t = std::move(ts);
    d.rem = std::move(rs);
    d.value = std::move(vs);
    d.validate();
    return d;
  }

  static DrivingTerm from_function(DrivingFn f, double T, double horizon, FormTag tag,
                                   int n_samples = 513) {
    if (!(T > 0.0) || !(horizon >= T)) throw ArgumentError("driving term: bad capacity range");
    DrivingTerm d;
    d.T = T;
    d.horizon = horizon;
    d.tag = tag;
    d.exact = std::move(f);
    d.resample(n_samples);
    return d;
  }

  static DrivingTerm constant(double c, double T = 1.0) {
    FormTag tag{FormKind::constant, 0.0, c, 1.0};
    return from_function([c](double, double) { return c; }, T, T, tag);
  }

  // offset + kappa * sqrt(horizon - t) on [0, T]
  static DrivingTerm sqrt_family(double kappa, double offset = 0.0, double horizon = 1.0,
                                 std::optional<double> T = std::nullopt) {
    FormTag tag{FormKind::sqrt_family, kappa, offset, 1.0};
    return from_function(
        [kappa, offset](double, double r) { return offset + kappa * std::sqrt(std::max(r, 0.0)); },
        T.value_or(horizon), horizon, tag);
  }

  bool has_exact() const { return static_cast<bool>(exact); }

  // evaluation by remaining capacity (preferred near the horizon)
  double at_rem(double r) const {
    if (exact) return exact(horizon - r, r);
    return interp_rem(r);
  }

  double at(double tt) const {
    if (exact) return exact(tt, horizon - tt);
    return interp_t(tt);
  }

  // evaluation when both coordinates are known
  double at(double tt, double r) const {
    if (exact) return exact(tt, r);
    return r < 0.25 * horizon ? interp_rem(r) : interp_t(tt);
  }

  double rem_at_T() const { return horizon - T; }

  void validate() const {
    if (t.empty() || t.front() != 0.0) throw ArgumentError("driving term: first sample must be t = 0");
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (!std::isfinite(t[k]) || !std::isfinite(value[k]) || !std::isfinite(rem[k]))
        throw ArgumentError("driving term: non-finite sample at index " + std::to_string(k));
      if (k > 0 && !(t[k] > t[k - 1] || rem[k] < rem[k - 1]))
        throw ArgumentError("driving term: capacities not increasing at index " + std::to_string(k));
    }
  }

  // replace display samples: uniform on the first half, geometric toward T
  void resample(int n) {
    if (!exact) return;
    n = std::max(n, 3);
    const double end_rem = horizon - T;
    t.clear();
    rem.clear();
    value.clear();
    const int n_lin = n / 2;
    const double split = 0.5 * T;
    for (int k = 0; k < n_lin; ++k) {
      const double tt = split * k / n_lin;
      push(tt, horizon - tt);
    }
    const double r0 = horizon - split;
    const double r1 = end_rem > 0.0 ? end_rem : r0 * 1e-12;
    const int n_geo = n - n_lin - (end_rem > 0.0 ? 0 : 1);
    for (int k = 0; k < n_geo; ++k) {
      double r = r0 * std::pow(r1 / r0, static_cast<double>(k) / (end_rem > 0.0 ? n_geo - 1 : n_geo));
      if (end_rem > 0.0 && k == n_geo - 1) r = end_rem;
      push(horizon - r, r);
    }
    if (end_rem <= 0.0) push(T, 0.0);
  }

 private:
  void push(double tt, double r) {
    t.push_back(tt);
    rem.push_back(r);
    value.push_back(exact(tt, r));
  }

  double interp_t(double tt) const {
    if (tt <= t.front()) return value.front();
    if (tt >= t.back()) return value.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tt);
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    const double w = (tt - t[j - 1]) / (t[j] - t[j - 1]);
    return value[j - 1] + w * (value[j] - value[j - 1]);
  }

  // rem is decreasing along the samples
  double interp_rem(double r) const {
    if (r >= rem.front()) return value.front();
    if (r <= rem.back()) return value.back();
    const auto it = std::upper_bound(rem.begin(), rem.end(), r, std::greater<double>());
    const std::size_t j = static_cast<std::size_t>(it - rem.begin());
    const double w = (rem[j - 1] - r) / (rem[j - 1] - rem[j]);
    return value[j - 1] + w * (value[j] - value[j - 1]);
  }
};

// ---------------------------------------------------------------------------
// transforms: scaling, translation, reflection, concatenation

enum class TransformKind { scale, translate, reflect, concat };

struct Transform {
  TransformKind kind;
  double amount = 0.0;                    // r for scale, x for translate
  const DrivingTerm* other = nullptr;     // for concat
};

inline DrivingTerm scale_driving(const DrivingTerm& l, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ArgumentError("scale: r must be positive");
  DrivingTerm d = l;
  const double r2 = r * r;
  d.T = l.T / r2;
  d.horizon = l.horizon / r2;
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    d.t[k] = l.t[k] / r2;
    d.rem[k] = l.rem[k] / r2;
    d.value[k] = l.value[k] / r;
  }
  if (l.exact) {
    auto inner = l.exact;
    d.exact = [inner, r, r2](double tt, double rr) { return inner(r2 * tt, r2 * rr) / r; };
  }
  switch (l.tag.kind) {
    case FormKind::constant:
    case FormKind::sqrt_family:
      d.tag.offset = l.tag.offset / r;
      break;
    case FormKind::scaled:
      d.tag.ratio = l.tag.ratio * r;
      break;
    case FormKind::analytic:
      d.tag = FormTag{FormKind::scaled, 0.0, 0.0, r};
      break;
    case FormKind::sampled:
      break;
  }
  return d;
}

inline DrivingTerm translate_driving(const DrivingTerm& l, double x) {
  DrivingTerm d = l;
  for (auto& v : d.value) v += x;
  if (l.exact) {
    auto inner = l.exact;
    d.exact = [inner, x](double tt, double rr) { return inner(tt, rr) + x; };
  }
  if (l.tag.kind == FormKind::constant || l.tag.kind == FormKind::sqrt_family) d.tag.offset += x;
  else if (l.tag.kind == FormKind::scaled) d.tag = FormTag{FormKind::analytic};
  return d;
}

inline DrivingTerm reflect_driving(const DrivingTerm& l) {
  DrivingTerm d = l;
  for (auto& v : d.value) v = -v;
  if (l.exact) {
    auto inner = l.exact;
    d.exact = [inner](double tt, double rr) { return -inner(tt, rr); };
  }
  d.tag.offset = -l.tag.offset;
  d.tag.kappa = -l.tag.kappa;
  if (l.tag.kind == FormKind::scaled) d.tag = FormTag{FormKind::analytic};
  return d;
}

inline DrivingTerm concat_driving(const DrivingTerm& l, const DrivingTerm& m, double tol = 1e-9) {
  const double a = l.at_rem(l.rem_at_T()), b = m.at(0.0, m.horizon);
  if (std::fabs(a - b) > tol * (1.0 + std::fabs(a)))
    throw ContractError("concat: endpoint mismatch " + std::to_string(a) + " vs " + std::to_string(b));
  DrivingTerm d;
  d.T = l.T + m.T;
  d.horizon = l.T + m.horizon;
  for (std::size_t k = 0; k < l.t.size(); ++k) {
    d.t.push_back(l.t[k]);
    d.rem.push_back((l.T - l.t[k]) + m.horizon);
    d.value.push_back(l.value[k]);
  }
  for (std::size_t k = 1; k < m.t.size(); ++k) {
    d.t.push_back(l.T + m.t[k]);
    d.rem.push_back(m.rem[k]);
    d.value.push_back(m.value[k]);
  }
  if (l.exact && m.exact) {
    auto f = l.exact, g = m.exact;
    const double Tl = l.T, Hl = l.horizon, Hm = m.horizon;
    d.exact = [f, g, Tl, Hl, Hm](double tt, double rr) {
      if (tt <= Tl) return f(tt, Hl - tt);
      return g(tt - Tl, rr);
    };
    d.tag = FormTag{FormKind::analytic};
    (void)Hm;
  }
  d.validate();
  return d;
}

// r * lambda on the same capacity range (not a hull transform)
inline DrivingTerm multiply_driving(const DrivingTerm& l, double r) {
  if (!std::isfinite(r)) throw ArgumentError("multiply: factor must be finite");
  DrivingTerm d = l;
  for (auto& v : d.value) v *= r;
  if (l.exact) {
    auto inner = l.exact;
    d.exact = [inner, r](double tt, double rr) { return r * inner(tt, rr); };
  }
  d.tag.offset = r * l.tag.offset;
  d.tag.kappa = r * l.tag.kappa;
  if (l.tag.kind == FormKind::scaled) d.tag = FormTag{FormKind::analytic};
  return d;
}

inline DrivingTerm transform_driving(const DrivingTerm& l, const Transform& op) {
  switch (op.kind) {
    case TransformKind::scale: return scale_driving(l, op.amount);
    case TransformKind::translate: return translate_driving(l, op.amount);
    case TransformKind::reflect: return reflect_driving(l);
    case TransformKind::concat:
      if (!op.other) throw ArgumentError("concat: missing second term");
      return concat_driving(l, *op.other);
  }
  throw ArgumentError("transform_driving: unknown op");
}

// restriction to [0, t_end]; t_end given by its remaining capacity
inline DrivingTerm truncate_driving(const DrivingTerm& l, double rem_end) {
  if (!(rem_end >= l.rem_at_T()) || !(rem_end < l.horizon))
    throw ArgumentError("truncate: end outside the term");
  DrivingTerm d;
  d.horizon = l.horizon;
  d.tag = l.tag;
  d.exact = l.exact;
  for (std::size_t k = 0; k < l.t.size() && l.rem[k] > rem_end; ++k) {
    d.t.push_back(l.t[k]);
    d.rem.push_back(l.rem[k]);
    d.value.push_back(l.value[k]);
  }
  d.t.push_back(l.horizon - rem_end);
  d.rem.push_back(rem_end);
  d.value.push_back(l.at_rem(rem_end));
  d.T = d.t.back();
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// time change  s = log 1/(1-t),  sigma(s) = e^{s/2} lambda(1 - e^{-s})

class SigmaTerm {
 public:
  std::vector<double> s, value;
  std::function<double(double)> exact;

  static SigmaTerm from_function(std::function<double(double)> f, double s_max, int n = 513) {
    SigmaTerm out;
    out.exact = std::move(f);
    for (int k = 0; k < n; ++k) {
      const double sk = s_max * k / (n - 1);
      out.s.push_back(sk);
      out.value.push_back(out.exact(sk));
    }
    return out;
  }

  double s_max() const { return s.empty() ? 0.0 : s.back(); }

  double at(double x) const {
    if (exact) return exact(x);
    if (x <= s.front()) return value.front();
    if (x >= s.back()) return value.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - s.begin());
    const double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
    return value[j - 1] + w * (value[j] - value[j - 1]);
  }

  // sigma_u(s) = sigma(u + s)
  SigmaTerm shifted(double u) const {
    SigmaTerm out;
    if (exact) {
      auto f = exact;
      out.exact = [f, u](double x) { return f(u + x); };
    }
    out.s.push_back(0.0);
    out.value.push_back(at(u));
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] > u) {
        out.s.push_back(s[k] - u);
        out.value.push_back(value[k]);
      }
    }
    return out;
  }
};

inline void require_normalized(const DrivingTerm& l, const char* who) {
  if (std::fabs(l.horizon - 1.0) > 1e-12)
    throw ContractError(std::string(who) +
                        ": driving term must be normalized to total capacity 1 (scale by sqrt of its capacity first)");
}

inline SigmaTerm time_change(const DrivingTerm& l) {
  require_normalized(l, "time_change");
  SigmaTerm out;
  for (std::size_t k = 0; k < l.t.size(); ++k) {
    if (!(l.rem[k] > 0.0)) break;
    out.s.push_back(-std::log(l.rem[k]));
    out.value.push_back(l.value[k] / std::sqrt(l.rem[k]));
  }
  if (l.exact) {
    auto f = l.exact;
    out.exact = [f](double x) {
      const double r = std::exp(-x);
      return f(-std::expm1(-x), r) / std::sqrt(r);
    };
  }
  return out;
}

// lambda(t) = sigma(s) sqrt(1-t) on [0, 1 - e^{-s_max}]
inline DrivingTerm driving_from_sigma(const SigmaTerm& sig) {
  DrivingTerm d;
  d.horizon = 1.0;
  for (std::size_t k = 0; k < sig.s.size(); ++k) {
    const double r = std::exp(-sig.s[k]);
    d.t.push_back(-std::expm1(-sig.s[k]));
    d.rem.push_back(r);
    d.value.push_back(sig.value[k] * std::sqrt(r));
  }
  d.T = d.t.back();
  if (sig.exact) {
    auto f = sig.exact;
    d.exact = [f](double, double r) { return f(-std::log(r)) * std::sqrt(r); };
    d.tag = FormTag{FormKind::analytic};
  }
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// traces

struct TracePoint {
  double t = 0.0;
  double rem = 0.0;  // horizon - t
  cplx z;
};

struct Trace {
  std::vector<TracePoint> pts;
  double T = 0.0;
  double horizon = 0.0;

  std::size_t size() const { return pts.size(); }
};

inline Trace mirror(const Trace& g) {
  Trace out = g;
  for (auto& p : out.pts) p.z = upper(cplx(-p.z.real(), p.z.imag()));
  return out;
}

}  // namespace loewner
