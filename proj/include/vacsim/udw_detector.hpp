#ifndef VACSIM_UDW_DETECTOR_HPP
#define VACSIM_UDW_DETECTOR_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include "constants.hpp"
#include "mode_algebra.hpp"
#include "quadrature.hpp"

namespace vacsim {

/** \brief Gaussian switching of a detector on the worldline (t, x) = (tau, 0). */
struct SwitchingParams {
  double eta = 0.0;
  double sigma_u = 1.0;  // rad/s
  double t_u = 0.0;      // s
};

struct DetectorParams {
  double omega_u = 1.0;  // rad/s
};

inline void validate(const SwitchingParams& s, const DetectorParams& d) {
  if (!(s.sigma_u > 0.0)) throw std::invalid_argument("SwitchingParams: sigma_u must be positive");
  if (!(d.omega_u > 0.0)) throw std::invalid_argument("DetectorParams: omega_u must be positive");
}

/// Closed-form coupling for a switching matched to the sampled Gaussian mode.
inline double effective_theta_u(const SwitchingParams& s, const DetectorParams& d) {
  validate(s, d);
  return -0.5 * s.eta * std::sqrt(d.omega_u / s.sigma_u) * std::pow(pi / 2.0, 0.25);
}

/// Field coefficient g(omega) that the switched interaction attaches to u^dagger.
inline cplx switching_coefficient(const SwitchingParams& s, const DetectorParams& d, double w) {
  const double dw = w - d.omega_u;
  const double mag = -sign(w) * s.eta / (2.0 * s.sigma_u) * std::sqrt(std::abs(w) / 2.0) *
                     std::exp(-dw * dw / (4.0 * s.sigma_u * s.sigma_u));
  return mag * std::exp(cplx(0.0, -dw * s.t_u));
}

inline IntegrationDomain switching_window(const SwitchingParams& s, const DetectorParams& d) {
  return IntegrationDomain::finite(std::max(0.0, d.omega_u - 12.0 * s.sigma_u), d.omega_u + 12.0 * s.sigma_u,
                                   {d.omega_u});
}

/// [g a, f^dagger] = int sign(omega) g(omega) f*(omega) domega: coupling of the detector to mode f.
inline cplx theta_u_overlap(const SwitchingParams& s, const DetectorParams& d, const SpectralAmplitude& f,
                            double rel_tol = default_rel_tol, double abs_tol = default_abs_tol) {
  validate(s, d);
  auto r = integrate(
      [&](double w) {
        return switching_coefficient(s, d, w) * std::conj(f(w)) -
               switching_coefficient(s, d, -w) * std::conj(f(-w));
      },
      switching_window(s, d), rel_tol, abs_tol);
  return r.value;
}

/// The normalized mode a detector samples and its coupling, for any switching width.
struct SampledMode {
  double theta_u = 0.0;
  SpectralAmplitude mode;
};

inline SampledMode switching_mode(const SwitchingParams& s, const DetectorParams& d,
                                  double rel_tol = default_rel_tol, double abs_tol = default_abs_tol) {
  validate(s, d);
  SpectralAmplitude g;
  g.eval = [s, d](double w) { return switching_coefficient(s, d, w); };
  g.window = switching_window(s, d);
  const double norm = bosonic_norm(g, rel_tol, abs_tol);
  if (!(norm > 0.0)) throw std::domain_error("switching_mode: zero coupling");
  SampledMode out;
  out.theta_u = -std::sqrt(norm);
  const double scale = 1.0 / out.theta_u;
  out.mode.eval = [g, scale](double w) { return scale * g(w); };
  out.mode.window = g.window;
  return out;
}

/// Moments of the sampled mode scaled by the detector efficiency sin^2(theta_u).
inline SecondMoments detector_moments(double theta_u, const SecondMoments& m) {
  const double eff = std::sin(theta_u) * std::sin(theta_u);
  return {eff * m.n, eff * m.a_sq};
}

inline double detector_variance(double theta_u, const SecondMoments& m, double phi) {
  return quadrature_variance(detector_moments(theta_u, m), phi);
}

inline double expected_excitations(double theta_u, const SecondMoments& m) {
  return std::sin(theta_u) * std::sin(theta_u) * m.n;
}

}  // namespace vacsim

#endif  // VACSIM_UDW_DETECTOR_HPP
