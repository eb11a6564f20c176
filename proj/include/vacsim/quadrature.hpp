#ifndef VACSIM_QUADRATURE_HPP
#define VACSIM_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace vacsim {

using cplx = std::complex<double>;

inline constexpr double default_rel_tol = 1e-9;
inline constexpr double default_abs_tol = 1e-12;
inline constexpr std::size_t default_eval_budget = 1'000'000;

enum class DomainKind { finite, semi_infinite_up, semi_infinite_down, full_line };

/** \brief Integration range. `breakpoints` are optional interior split points. */
struct IntegrationDomain {
  DomainKind kind = DomainKind::finite;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> breakpoints;

  static IntegrationDomain finite(double a, double b, std::vector<double> breaks = {}) {
    if (!(a < b)) throw std::invalid_argument("finite domain requires lo < hi");
    IntegrationDomain d{DomainKind::finite, a, b, {}};
    for (double x : breaks)
      if (x > a && x < b) d.breakpoints.push_back(x);
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
    d.breakpoints.erase(std::unique(d.breakpoints.begin(), d.breakpoints.end()), d.breakpoints.end());
    return d;
  }
  /// [a, +inf)
  static IntegrationDomain upper(double a) { return {DomainKind::semi_infinite_up, a, 0.0, {}}; }
  /// (-inf, b]
  static IntegrationDomain lower(double b) { return {DomainKind::semi_infinite_down, 0.0, b, {}}; }
  static IntegrationDomain full_line() { return {DomainKind::full_line, 0.0, 0.0, {}}; }
};

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Thrown when the evaluation budget is exhausted before the tolerance is met.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, cplx best, double err)
      : std::runtime_error(what), best_estimate(best), error_bound(err) {}
  cplx best_estimate;
  double error_bound;
};

/// Thrown when the integrand returns NaN or infinity.
class NonFiniteIntegrand : public std::runtime_error {
 public:
  explicit NonFiniteIntegrand(double x)
      : std::runtime_error(message(x)), abscissa(x) {}
  double abscissa;

 private:
  static std::string message(double x) {
    std::ostringstream os;
    os.precision(17);
    os << "integrand is not finite at x = " << x;
    return os.str();
  }
};

namespace detail {

template <std::size_t K>
using Values = std::array<cplx, K>;

template <std::size_t K>
struct Segment {
  double a, b;
  Values<K> value;
  std::array<double, K> err;
  double priority;  // largest tolerance-relative error over components
  bool operator<(const Segment& o) const { return priority < o.priority; }
};

inline bool finite_value(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Gauss-Kronrod 10/21 on [a,b]; g maps t -> (x, jacobian).
template <std::size_t K, class F, class Map>
Segment<K> gk21(F& f, const Map& map, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  Values<K> kron{}, gauss{};
  std::array<double, K> resabs{};
  auto eval = [&](double t) {
    auto [x, jac] = map(t);
    Values<K> v = f(x);
    for (std::size_t k = 0; k < K; ++k) {
      if (!finite_value(v[k])) throw NonFiniteIntegrand(x);
      v[k] *= jac;
    }
    return v;
  };
  {
    Values<K> v = eval(c);
    for (std::size_t k = 0; k < K; ++k) {
      kron[k] += wk[0] * v[k];
      resabs[k] += wk[0] * std::abs(v[k]);
    }
  }
  for (std::size_t i = 1; i < xk.size(); ++i) {
    Values<K> v1 = eval(c - h * xk[i]);
    Values<K> v2 = eval(c + h * xk[i]);
    for (std::size_t k = 0; k < K; ++k) {
      cplx s = v1[k] + v2[k];
      kron[k] += wk[i] * s;
      resabs[k] += wk[i] * (std::abs(v1[k]) + std::abs(v2[k]));
      if (i % 2 == 1) gauss[k] += wg[i / 2] * s;
    }
  }
  Segment<K> seg{a, b, {}, {}, 0.0};
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < K; ++k) {
    seg.value[k] = kron[k] * h;
    double e = std::abs((kron[k] - gauss[k]) * h);
    seg.err[k] = std::max(e, 50.0 * eps * resabs[k] * std::abs(h));
  }
  return seg;
}

template <std::size_t K>
struct AdaptiveOutcome {
  Values<K> value{};
  std::array<double, K> err{};
  std::size_t evaluations = 0;
};

template <std::size_t K, class F, class Map>
AdaptiveOutcome<K> adaptive(F& f, const Map& map, const std::vector<double>& cuts, double rel_tol,
                            double abs_tol, std::size_t budget) {
  if (!(rel_tol > 0.0 || abs_tol > 0.0))
    throw std::invalid_argument("integrate: rel_tol or abs_tol must be positive");
  constexpr std::size_t per_segment = 21;
  std::priority_queue<Segment<K>> heap;
  AdaptiveOutcome<K> out;

  auto total = [&]() {
    Values<K> v{};
    std::array<double, K> e{};
    auto copy = heap;
    while (!copy.empty()) {
      const auto& s = copy.top();
      for (std::size_t k = 0; k < K; ++k) {
        v[k] += s.value[k];
        e[k] += s.err[k];
      }
      copy.pop();
    }
    return std::make_pair(v, e);
  };

  std::vector<Segment<K>> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    segs.push_back(gk21<K>(f, map, cuts[i], cuts[i + 1]));
    out.evaluations += per_segment;
  }
  Values<K> sum{};
  std::array<double, K> esum{};
  for (const auto& s : segs)
    for (std::size_t k = 0; k < K; ++k) {
      sum[k] += s.value[k];
      esum[k] += s.err[k];
    }

  auto tolerance = [&](std::size_t k, const Values<K>& v) {
    return std::max(abs_tol, rel_tol * std::abs(v[k]));
  };
  auto prioritize = [&](Segment<K>& s, const Values<K>& v) {
    double p = 0.0;
    for (std::size_t k = 0; k < K; ++k) p = std::max(p, s.err[k] / tolerance(k, v));
    s.priority = p;
  };
  for (auto& s : segs) {
    prioritize(s, sum);
    heap.push(s);
  }

  auto converged = [&]() {
    for (std::size_t k = 0; k < K; ++k)
      if (esum[k] > tolerance(k, sum)) return false;
    return true;
  };

  std::size_t since_resum = 0;
  while (!converged()) {
    if (out.evaluations + 2 * per_segment > budget) {
      auto [v, e] = total();
      std::ostringstream os;
      os << "integrate: evaluation budget of " << budget << " exhausted; estimate " << v[0]
         << " with error bound " << e[0];
      throw QuadratureError(os.str(), v[0], e[0]);
    }
    Segment<K> worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval cannot be split further in double precision
      worst.priority = 0.0;
      heap.push(worst);
      if (heap.top().priority == 0.0) break;
      continue;
    }
    Segment<K> left = gk21<K>(f, map, worst.a, mid);
    Segment<K> right = gk21<K>(f, map, mid, worst.b);
    out.evaluations += 2 * per_segment;
    for (std::size_t k = 0; k < K; ++k) {
      sum[k] += left.value[k] + right.value[k] - worst.value[k];
      esum[k] += left.err[k] + right.err[k] - worst.err[k];
    }
    prioritize(left, sum);
    prioritize(right, sum);
    heap.push(left);
    heap.push(right);
    // running sums drift; rebuild them now and then
    if (++since_resum == 200) {
      since_resum = 0;
      auto [v, e] = total();
      sum = v;
      esum = e;
    }
  }
  auto [v, e] = total();
  out.value = v;
  out.err = e;
  return out;
}

struct Identity {
  std::pair<double, double> operator()(double t) const { return {t, 1.0}; }
};

// x = a + t/(1-t), t in [0,1)
struct UpperMap {
  double a;
  std::pair<double, double> operator()(double t) const {
    double u = 1.0 - t;
    return {a + t / u, 1.0 / (u * u)};
  }
};

// x = b - t/(1-t), t in [0,1)
struct LowerMap {
  double b;
  std::pair<double, double> operator()(double t) const {
    double u = 1.0 - t;
    return {b - t / u, 1.0 / (u * u)};
  }
};

template <std::size_t K, class F>
AdaptiveOutcome<K> integrate_domain(F& f, const IntegrationDomain& dom, double rel_tol, double abs_tol,
                                    std::size_t budget) {
  switch (dom.kind) {
    case DomainKind::finite: {
      if (!(dom.lo < dom.hi)) throw std::invalid_argument("finite domain requires lo < hi");
      std::vector<double> cuts{dom.lo};
      for (double x : dom.breakpoints)
        if (x > cuts.back() && x < dom.hi) cuts.push_back(x);
      cuts.push_back(dom.hi);
      return adaptive<K>(f, Identity{}, cuts, rel_tol, abs_tol, budget);
    }
    case DomainKind::semi_infinite_up:
      return adaptive<K>(f, UpperMap{dom.lo}, {0.0, 0.5, 1.0}, rel_tol, abs_tol, budget);
    case DomainKind::semi_infinite_down:
      return adaptive<K>(f, LowerMap{dom.hi}, {0.0, 0.5, 1.0}, rel_tol, abs_tol, budget);
    case DomainKind::full_line: {
      auto up = adaptive<K>(f, UpperMap{0.0}, {0.0, 0.5, 1.0}, rel_tol, abs_tol, budget);
      auto down = adaptive<K>(f, LowerMap{0.0}, {0.0, 0.5, 1.0}, rel_tol, abs_tol,
                              budget > up.evaluations ? budget - up.evaluations : 0);
      AdaptiveOutcome<K> out;
      for (std::size_t k = 0; k < K; ++k) {
        out.value[k] = up.value[k] + down.value[k];
        out.err[k] = up.err[k] + down.err[k];
      }
      out.evaluations = up.evaluations + down.evaluations;
      return out;
    }
  }
  throw std::logic_error("unknown domain kind");
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (10/21) integration of a complex-valued integrand.
/// Semi-infinite ranges use x = a + t/(1-t); the full line is split at 0.
template <class F>
QuadratureResult integrate(F&& f, const IntegrationDomain& dom, double rel_tol = default_rel_tol,
                           double abs_tol = default_abs_tol, std::size_t budget = default_eval_budget) {
  auto wrapped = [&f](double x) { return detail::Values<1>{cplx(f(x))}; };
  auto r = detail::integrate_domain<1>(wrapped, dom, rel_tol, abs_tol, budget);
  return {r.value[0], r.err[0], r.evaluations};
}

/// Integrates K components sharing one set of abscissae; every component must meet the tolerance.
template <std::size_t K, class F>
std::array<QuadratureResult, K> integrate_many(F&& f, const IntegrationDomain& dom,
                                               double rel_tol = default_rel_tol,
                                               double abs_tol = default_abs_tol,
                                               std::size_t budget = default_eval_budget) {
  auto r = detail::integrate_domain<K>(f, dom, rel_tol, abs_tol, budget);
  std::array<QuadratureResult, K> out;
  for (std::size_t k = 0; k < K; ++k) out[k] = {r.value[k], r.err[k], r.evaluations};
  return out;
}

/// Iterated integral over domA x domB; the inner error bounds are integrated alongside the value.
template <class F>
QuadratureResult integrate_2d(F&& f, const IntegrationDomain& domA, const IntegrationDomain& domB,
                              double rel_tol = default_rel_tol, double abs_tol = default_abs_tol,
                              std::size_t budget = default_eval_budget) {
  std::size_t inner_evals = 0;
  auto outer = [&](double x) {
    auto inner = integrate([&](double y) { return f(x, y); }, domB, rel_tol, abs_tol, budget);
    inner_evals += inner.evaluations;
    return detail::Values<2>{inner.value, cplx(inner.abs_error_estimate, 0.0)};
  };
  auto r = detail::integrate_domain<2>(outer, domA, rel_tol, std::max(abs_tol, 1e-300), budget);
  QuadratureResult out;
  out.value = r.value[0];
  out.abs_error_estimate = r.err[0] + std::abs(r.value[1]) + r.err[1];
  out.evaluations = inner_evals;
  return out;
}

/// Node/weight pair for fixed composite rules.
struct Node {
  double x;
  double w;
};

/// Composite 10-point Gauss-Legendre rule on [a,b] with `panels` equal panels per segment between cuts.
inline std::vector<Node> composite_gauss_legendre(double a, double b, std::size_t panels,
                                                  const std::vector<double>& cuts = {}) {
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xg = G::abscissa();
  const auto& wg = G::weights();
  std::vector<double> edges{a};
  for (double c : cuts)
    if (c > edges.back() && c < b) edges.push_back(c);
  edges.push_back(b);
  std::vector<Node> nodes;
  const double total = b - a;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double lo = edges[s], hi = edges[s + 1];
    auto np = static_cast<std::size_t>(std::ceil(panels * (hi - lo) / total));
    np = std::max<std::size_t>(np, 1);
    double h = (hi - lo) / static_cast<double>(np);
    for (std::size_t p = 0; p < np; ++p) {
      double c = lo + (p + 0.5) * h, r = 0.5 * h;
      for (std::size_t i = 0; i < xg.size(); ++i) {
        nodes.push_back({c - r * xg[i], r * wg[i]});
        nodes.push_back({c + r * xg[i], r * wg[i]});
      }
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& l, const Node& r) { return l.x < r.x; });
  return nodes;
}

}  // namespace vacsim

#endif  // VACSIM_QUADRATURE_HPP
