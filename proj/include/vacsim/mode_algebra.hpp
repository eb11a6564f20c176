#ifndef VACSIM_MODE_ALGEBRA_HPP
#define VACSIM_MODE_ALGEBRA_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>

#include "constants.hpp"
#include "quadrature.hpp"

namespace vacsim {

/** \brief Gaussian subcycle mode: carrier omega0, inverse duration sigma (rad/s), peak time t0 (s). */
struct GaussianModeParams {
  double omega0 = 1.0;
  double sigma = 1.0;
  double t0 = 0.0;

  void validate() const {
    if (!(omega0 > 0.0)) throw std::invalid_argument("GaussianModeParams: omega0 must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("GaussianModeParams: sigma must be positive");
  }
};

/** \brief Coefficient function f(omega) of a_f = int f(omega) a_omega domega, with a_{-omega} = a_omega^dagger.
 *  `window` is a finite positive-frequency range containing the support of |f(omega)| and |f(-omega)|. */
struct SpectralAmplitude {
  std::function<cplx(double)> eval;
  IntegrationDomain window = IntegrationDomain::finite(0.0, 1.0);

  cplx operator()(double omega) const { return eval(omega); }
};

struct ModeSplit {
  double theta_g = 0.0;
  double theta_perp = 0.0;
  double phi_perp = 0.0;
};

struct SecondMoments {
  double n = 0.0;   // <a^dagger a>
  cplx a_sq{0.0};   // <a^2>
};

/** \brief Quadrature variance of a linear form on the vacuum, Var(phi) = a + 2 Re[b e^{-2i phi}]. */
struct VarianceForm {
  double a = 1.0;
  cplx b{0.0};

  double at(double phi) const { return a + 2.0 * std::real(b * std::exp(cplx(0.0, -2.0 * phi))); }
  double minor() const { return a - 2.0 * std::abs(b); }
  double major() const { return a + 2.0 * std::abs(b); }
  /// Angle of the minor axis.
  double minor_angle() const { return 0.5 * std::arg(b) + 0.5 * pi; }
};

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline SpectralAmplitude gaussian_amplitude(const GaussianModeParams& p) {
  p.validate();
  const double norm = std::pow(two_pi, -0.25) / std::sqrt(p.omega0 * p.sigma);
  SpectralAmplitude f;
  f.eval = [p, norm](double w) -> cplx {
    const double d = w - p.omega0;
    const double mag = norm * sign(w) * std::sqrt(std::abs(w)) * std::exp(-d * d / (4.0 * p.sigma * p.sigma));
    return mag * std::exp(cplx(0.0, -p.t0 * d));
  };
  f.window = IntegrationDomain::finite(std::max(0.0, p.omega0 - 12.0 * p.sigma), p.omega0 + 12.0 * p.sigma,
                                       {p.omega0});
  return f;
}

/// f = plus on [lo, hi] and f = minus on [-hi, -lo].
inline SpectralAmplitude rectangle_amplitude(double lo, double hi, cplx plus, cplx minus = 0.0) {
  if (!(0.0 <= lo && lo < hi)) throw std::invalid_argument("rectangle_amplitude: need 0 <= lo < hi");
  SpectralAmplitude f;
  f.eval = [=](double w) -> cplx {
    const double a = std::abs(w);
    if (a < lo || a > hi) return 0.0;
    return w > 0.0 ? plus : minus;
  };
  f.window = IntegrationDomain::finite(lo, hi);
  return f;
}

/// int sign(omega) |f|^2 domega = [a_f, a_f^dagger].
inline double bosonic_norm(const SpectralAmplitude& f, double rel_tol = default_rel_tol,
                           double abs_tol = default_abs_tol) {
  auto r = integrate(
      [&f](double w) { return std::norm(f(w)) - std::norm(f(-w)); }, f.window, rel_tol, abs_tol);
  return r.value.real();
}

/// int_0^inf |f|^2 domega.
inline double positive_weight(const SpectralAmplitude& f, double rel_tol = default_rel_tol,
                              double abs_tol = default_abs_tol) {
  return integrate([&f](double w) { return std::norm(f(w)); }, f.window, rel_tol, abs_tol).value.real();
}

/// theta with cosh^2(theta) = int_0^inf |f|^2 domega.
inline double theta_from_positive_weight(double w) {
  if (w < 1.0 - 1e-9)
    throw std::domain_error("theta_g: positive-frequency weight below 1; amplitude is not normalized");
  if (w < 1.0) w = 1.0;
  return std::acosh(std::sqrt(w));
}

inline double theta_g(const SpectralAmplitude& f, double rel_tol = default_rel_tol,
                      double abs_tol = default_abs_tol) {
  return theta_from_positive_weight(positive_weight(f, rel_tol, abs_tol));
}

/// int_0^inf f(omega) f(-omega) domega.
inline cplx pm_overlap(const SpectralAmplitude& f, double rel_tol = default_rel_tol,
                       double abs_tol = default_abs_tol) {
  return integrate([&f](double w) { return f(w) * f(-w); }, f.window, rel_tol, abs_tol).value;
}

inline double wrap_phase(double phi) {
  double p = std::remainder(phi, two_pi);
  if (p <= -pi) p += two_pi;
  return p;
}

/// Split from the positive-frequency weight and the +/- overlap.
inline ModeSplit mode_split_from(double positive_w, cplx overlap) {
  ModeSplit ms;
  ms.theta_g = theta_from_positive_weight(positive_w);
  if (ms.theta_g == 0.0) return ms;
  const double cs = std::cosh(ms.theta_g) * std::sinh(ms.theta_g);
  const double s = std::min(1.0, std::abs(overlap) / cs);
  ms.theta_perp = std::asin(s);
  ms.phi_perp = s == 0.0 ? 0.0 : wrap_phase(std::arg(overlap));
  if (ms.phi_perp == -pi) ms.phi_perp = pi;
  return ms;
}

inline ModeSplit mode_split(const SpectralAmplitude& f, double rel_tol = default_rel_tol,
                            double abs_tol = default_abs_tol) {
  auto r = integrate_many<2>(
      [&f](double w) {
        const cplx p = f(w), m = f(-w);
        return std::array<cplx, 2>{cplx(std::norm(p)), p * m};
      },
      f.window, rel_tol, abs_tol);
  return mode_split_from(r[0].value.real(), r[1].value);
}

inline SecondMoments second_moments(const ModeSplit& ms) {
  const double sh = std::sinh(ms.theta_g), ch = std::cosh(ms.theta_g);
  SecondMoments m;
  m.n = sh * sh;
  m.a_sq = ch * sh * std::sin(ms.theta_perp) * std::exp(cplx(0.0, ms.phi_perp));
  return m;
}

inline VarianceForm variance_form(const SecondMoments& m) { return {1.0 + 2.0 * m.n, m.a_sq}; }

inline double quadrature_variance(const SecondMoments& m, double phi) { return variance_form(m).at(phi); }

inline double quadrature_correlation(const SecondMoments& m) { return 2.0 * std::abs(m.a_sq); }

/// 2 pi / omega0 > sqrt(8) / sigma.
inline bool is_subcycle(const GaussianModeParams& p) {
  p.validate();
  return two_pi / p.omega0 > std::sqrt(8.0) / p.sigma;
}

}  // namespace vacsim

#endif  // VACSIM_MODE_ALGEBRA_HPP
