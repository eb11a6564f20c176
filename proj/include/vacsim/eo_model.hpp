#ifndef VACSIM_EO_MODEL_HPP
#define VACSIM_EO_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "constants.hpp"
#include "dispersion.hpp"
#include "mode_algebra.hpp"
#include "quadrature.hpp"

namespace vacsim {

/// Internal frequency unit of the EO integrals (1e12 rad/s).
inline constexpr double eo_unit = 1e12;

struct CrystalParams {
  double length = 7e-6;  // m
  double r41 = 4e-12;    // m/V
  double area = pi * 3e-6 * 3e-6;
  RefractiveIndexModel dispersion;

  void validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("CrystalParams: length must be positive");
    if (!(area > 0.0)) throw std::invalid_argument("CrystalParams: area must be positive");
    if (!std::isfinite(r41)) throw std::invalid_argument("CrystalParams: r41 must be finite");
    dispersion.validate();
  }
  /// d = -n^4(omega_p) r41.
  double coupling_d(double omega_p) const {
    const double n = dispersion(omega_p);
    return -n * n * n * n * r41;
  }
  /// lambda = A eps0 d / 2.
  double coupling_lambda(double omega_p, const PhysicalConstants& k = codata) const {
    return area * k.eps0 * coupling_d(omega_p) / 2.0;
  }
};

struct ProbeParams {
  double omega_p = two_pi * 255e12;
  double sigma_p = std::sqrt(2.0 * std::log(2.0)) / 5.8e-15;
  double t_p = 0.0;
  double phi_p = 0.0;
  cplx alpha{std::sqrt(5e9), 0.0};

  void validate() const {
    if (!(omega_p > 0.0)) throw std::invalid_argument("ProbeParams: omega_p must be positive");
    if (!(sigma_p > 0.0)) throw std::invalid_argument("ProbeParams: sigma_p must be positive");
    if (!std::isfinite(t_p) || !std::isfinite(phi_p) || !std::isfinite(std::abs(alpha)))
      throw std::invalid_argument("ProbeParams: non-finite field");
  }
  /// Below this photon number the mean-field replacement is questionable.
  bool mean_field_warning() const { return std::norm(alpha) < 1e3; }
  /// Spectral support half-width around omega_p.
  double support_half_width() const { return 8.0 * sigma_p; }
};

struct FilterParams {
  double omega_tilde = two_pi * 255e12;
  double delta_omega = two_pi * 1e12;

  double lo() const { return omega_tilde - 0.5 * delta_omega; }
  double hi() const { return omega_tilde + 0.5 * delta_omega; }
};

struct FrequencyPartition {
  double lambda_cut = two_pi * 100e12;
};

struct EOSetup {
  CrystalParams crystal;
  ProbeParams probe;
  FrequencyPartition partition;
  PhysicalConstants constants = codata;

  void validate() const {
    crystal.validate();
    probe.validate();
    if (!(partition.lambda_cut > 0.0)) throw std::invalid_argument("FrequencyPartition: lambda_cut must be positive");
    if (!(partition.lambda_cut < crystal.dispersion.max_angular()))
      throw std::invalid_argument("FrequencyPartition: lambda_cut beyond the dispersion validity range");
  }
  void validate(const FilterParams& f) const {
    validate();
    if (!(f.delta_omega > 0.0)) throw std::invalid_argument("FilterParams: delta_omega must be positive");
    if (!(f.lo() > partition.lambda_cut))
      throw std::invalid_argument("FilterParams: band must lie above the partition frequency");
    if (!(f.hi() < crystal.dispersion.max_angular()))
      throw std::out_of_range("FilterParams: band exceeds the dispersion validity range");
  }
};

enum class Regime { beam_splitter, squeezer };

struct RegimeClass {
  Regime regime = Regime::beam_splitter;
  double signed_value = 0.0;
};

inline std::string to_string(Regime r) { return r == Regime::beam_splitter ? "beam_splitter" : "squeezer"; }

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

/// (L/2c) [omega (n_omega - n_{omega-Omega}) - Omega (n_Omega - n_{omega-Omega})].
inline double phase_mismatch(const RefractiveIndexModel& m, double Omega, double omega, double length,
                             const PhysicalConstants& k = codata) {
  const double nd = m(omega - Omega);
  return length / (2.0 * k.c) * (omega * (m(omega) - nd) - Omega * (m(Omega) - nd));
}

/** \brief Evaluator for the probe, the phase-matching factor and the action kernel S(Omega, omega).
 *  All arguments in rad/s; S in s. */
class EOKernel {
 public:
  explicit EOKernel(const EOSetup& s) : setup_(s) {
    setup_.validate();
    const auto& p = setup_.probe;
    const auto& k = setup_.constants;
    n_p_ = setup_.crystal.dispersion(p.omega_p);
    field_pref_ = std::sqrt(k.hbar / (4.0 * pi * n_p_ * k.c * k.eps0 * setup_.crystal.area));
    zeta_pref_ = setup_.crystal.coupling_d(p.omega_p) * setup_.crystal.length / (2.0 * k.c);
    const double lo = p.omega_p - p.support_half_width(), hi = p.omega_p + p.support_half_width();
    std::vector<double> br{p.omega_p};
    if (lo < 0.0) br.push_back(0.0);
    auto r = integrate(
        [&](double w) { return cplx(sign(w) * std::exp(-gauss_arg(w))); }, IntegrationDomain::finite(lo, hi, br),
        1e-12, 0.0);
    if (!(r.value.real() > 0.0)) throw std::domain_error("probe spectrum has no positive-frequency weight");
    probe_norm_ = 1.0 / std::sqrt(r.value.real());
  }

  const EOSetup& setup() const { return setup_; }
  double n_probe() const { return n_p_; }

  /// Dimensionless probe mode amplitude with bosonic norm 1.
  cplx probe_amplitude(double w) const {
    const auto& p = setup_.probe;
    if (std::abs(w - p.omega_p) > p.support_half_width()) return 0.0;
    return probe_norm_ * std::exp(-0.5 * gauss_arg(w)) * std::exp(cplx(0.0, -(w * p.t_p + p.phi_p)));
  }

  /// Spectral probe field per unit amplitude, E_p(omega).
  cplx probe_field(double w) const {
    return cplx(0.0, 1.0) * field_pref_ * std::sqrt(std::abs(w)) * std::conj(probe_amplitude(w));
  }

  /// alpha E_p(x) + alpha^* E_p^*(-x).
  cplx alpha_p(double x) const {
    const cplx a = setup_.probe.alpha;
    return a * probe_field(x) + std::conj(a) * std::conj(probe_field(-x));
  }

  cplx zeta(double Omega, double omega) const {
    const auto& m = setup_.crystal.dispersion;
    const double s = sign(omega * Omega);
    if (s == 0.0) return 0.0;
    const double n_w = m(omega), n_W = m(Omega), n_d = m(omega - Omega);
    const double eta = setup_.crystal.length / (2.0 * setup_.constants.c) *
                       (omega * (n_w - n_d) - Omega * (n_W - n_d));
    const double mag = zeta_pref_ * std::sqrt(std::abs(omega * Omega) / (n_w * n_W)) * sinc(eta);
    return cplx(0.0, -s * mag);
  }

  /// S(Omega, omega) without the partition check.
  cplx operator()(double Omega, double omega) const {
    const cplx a = alpha_p(omega - Omega);
    if (a == 0.0) return 0.0;
    return a * zeta(Omega, omega);
  }

  cplx kernel(double Omega, double omega) const {
    const double L = setup_.partition.lambda_cut;
    if (!(std::abs(Omega) <= L && std::abs(omega) >= L))
      throw std::domain_error("action_kernel: (Omega, omega) outside |Omega| < Lambda < |omega|");
    return (*this)(Omega, omega);
  }

  /// S in units of 1/eo_unit with both arguments in eo_unit.
  cplx scaled(double X, double x) const { return (*this)(X * eo_unit, x * eo_unit) * eo_unit; }

 private:
  double gauss_arg(double w) const {
    const double d = w - setup_.probe.omega_p;
    return d * d / (2.0 * setup_.probe.sigma_p * setup_.probe.sigma_p);
  }

  EOSetup setup_;
  double n_p_ = 1.0;
  double field_pref_ = 0.0;
  double zeta_pref_ = 0.0;
  double probe_norm_ = 0.0;
};

inline SpectralAmplitude probe_spectrum(const EOSetup& s) {
  EOKernel k(s);
  SpectralAmplitude f;
  f.eval = [k](double w) { return k.probe_amplitude(w); };
  const double lo = std::max(0.0, s.probe.omega_p - s.probe.support_half_width());
  f.window = IntegrationDomain::finite(lo, s.probe.omega_p + s.probe.support_half_width(), {s.probe.omega_p});
  return f;
}

inline cplx probe_field(const EOSetup& s, double omega) { return EOKernel(s).probe_field(omega); }
inline cplx alpha_p(const EOSetup& s, double x) { return EOKernel(s).alpha_p(x); }
inline cplx zeta(const EOSetup& s, double Omega, double omega) { return EOKernel(s).zeta(Omega, omega); }
inline cplx action_kernel(const EOSetup& s, double Omega, double omega) { return EOKernel(s).kernel(Omega, omega); }

enum class WaveformMode { exact, midpoint };

struct Tolerances {
  double rel_tol = default_rel_tol;
  double abs_tol = default_abs_tol;
};

/// F(Omega) = (1/sqrt(dw)) int_band S(Omega, omega) domega, in scaled units.
inline std::array<cplx, 2> band_projection(const EOKernel& k, const FilterParams& f, double X, WaveformMode mode,
                                           const Tolerances& tol) {
  const double lo = f.lo() / eo_unit, hi = f.hi() / eo_unit, dw = f.delta_omega / eo_unit;
  if (mode == WaveformMode::midpoint) {
    const double x = f.omega_tilde / eo_unit, r = std::sqrt(dw);
    return {r * k.scaled(X, x), r * k.scaled(-X, x)};
  }
  auto r = integrate_many<2>(
      [&](double x) { return std::array<cplx, 2>{k.scaled(X, x), k.scaled(-X, x)}; },
      IntegrationDomain::finite(lo, hi), tol.rel_tol, tol.abs_tol);
  const double inv = 1.0 / std::sqrt(dw);
  return {inv * r[0].value, inv * r[1].value};
}

/** \brief W_pm = int_0^Lambda |F(pm Omega)|^2, M = int_0^Lambda F(Omega) F(-Omega). */
struct FirstOrderStats {
  double w_plus = 0.0;
  double w_minus = 0.0;
  cplx m{0.0};
  double theta1 = 0.0;
  int comm_sign = 0;
  double comm_signed = 0.0;
};

inline constexpr double regime_threshold = 1e-8;

inline FirstOrderStats first_order_from(double wp, double wm, cplx m) {
  FirstOrderStats s;
  s.w_plus = wp;
  s.w_minus = wm;
  s.m = m;
  const double d = wp - wm;
  s.theta1 = std::sqrt(std::abs(d));
  s.comm_sign = std::abs(d) < regime_threshold ? 0 : (d > 0 ? 1 : -1);
  s.comm_signed = wp + wm > 0.0 ? d / (wp + wm) : 0.0;
  return s;
}

inline FirstOrderStats first_order_stats(const EOSetup& s, const FilterParams& f,
                                         WaveformMode mode = WaveformMode::exact, const Tolerances& tol = {}) {
  s.validate(f);
  EOKernel k(s);
  const double Ls = s.partition.lambda_cut / eo_unit;
  std::vector<double> br;
  const double peak = std::abs(f.omega_tilde - s.probe.omega_p) / eo_unit;
  if (peak > 0.0 && peak < Ls) br.push_back(peak);
  auto r = integrate_many<3>(
      [&](double X) {
        auto F = band_projection(k, f, X, mode, tol);
        return std::array<cplx, 3>{cplx(std::norm(F[0])), cplx(std::norm(F[1])), F[0] * F[1]};
      },
      IntegrationDomain::finite(0.0, Ls, br), tol.rel_tol, tol.abs_tol);
  return first_order_from(r[0].value.real(), r[1].value.real(), r[2].value);
}

inline double theta1(const EOSetup& s, const FilterParams& f, const Tolerances& tol = {}) {
  return first_order_stats(s, f, WaveformMode::exact, tol).theta1;
}

inline RegimeClass regime_from(const FirstOrderStats& st) {
  if (!(st.theta1 > 0.0)) throw std::domain_error("regime_classify: zero interaction strength");
  return {st.comm_signed > 0.0 ? Regime::beam_splitter : Regime::squeezer, st.comm_signed};
}

inline RegimeClass regime_classify(const EOSetup& s, const FilterParams& f, const Tolerances& tol = {}) {
  return regime_from(first_order_stats(s, f, WaveformMode::exact, tol));
}

/// Normalized probed MIR mode f(Omega), Omega in rad/s, with int |f|^2 dOmega = 1.
inline SpectralAmplitude probed_waveform(const EOSetup& s, const FilterParams& f,
                                         WaveformMode mode = WaveformMode::exact, const Tolerances& tol = {}) {
  const FirstOrderStats st = first_order_stats(s, f, mode, tol);
  const double w = st.w_plus + st.w_minus;
  if (!(w > 0.0)) throw std::domain_error("probed_waveform: zero interaction strength");
  EOKernel k(s);
  const double scale = 1.0 / std::sqrt(w * eo_unit);
  SpectralAmplitude out;
  out.eval = [k, f, mode, tol, scale](double Omega) -> cplx {
    if (Omega == 0.0 || std::abs(Omega) > k.setup().partition.lambda_cut) return 0.0;
    const double X = std::abs(Omega) / eo_unit;
    auto F = band_projection(k, f, X, mode, tol);
    return scale * (Omega > 0.0 ? F[0] : F[1]);
  };
  out.window = IntegrationDomain::finite(0.0, s.partition.lambda_cut);
  return out;
}

/// Moments of the probed mode in its annihilation orientation.
inline SecondMoments probed_moments(const FirstOrderStats& st) {
  if (st.comm_sign == 0) return {};
  const double t2 = st.theta1 * st.theta1;
  if (st.comm_sign > 0) return {st.w_minus / t2, st.m / t2};
  return {st.w_plus / t2, std::conj(st.m) / t2};
}

/// u + [u, S] without renormalization; also the comm_sign = 0 limit of order 1.
inline VarianceForm perturbative_limit_variance(const FirstOrderStats& st) {
  return {1.0 + st.w_plus + st.w_minus, st.m};
}

/// Order-1 variance form of the evolved filtered mode.
inline VarianceForm first_order_variance(const FirstOrderStats& st) {
  if (st.comm_sign == 0) return perturbative_limit_variance(st);
  const double t = st.theta1;
  const double c = st.comm_sign > 0 ? std::cos(t) : std::cosh(t);
  const double sn = st.comm_sign > 0 ? std::sin(t) : std::sinh(t);
  const double r = sn * sn / (t * t);
  return {c * c + r * (st.w_plus + st.w_minus), r * st.m};
}

/** \brief Composite Gauss-Legendre grids for the second chain member. */
struct SecondOrderGrid {
  std::size_t mir_panels = 24;
  std::size_t nir_panels = 56;
  std::size_t band_panels = 2;
};

struct SecondOrderStats {
  FirstOrderStats first;  // on the same grid
  double theta2 = 0.0;
  int comm_sign2 = 0;
  VarianceForm variance;
};

/** \brief Second-order evolution of the filtered mode on the continuum.
 *  G(omega) = int dOmega f(Omega) sign(Omega) S(-Omega, omega) gives c2 = int G(-omega) a_omega / theta2. */
inline SecondOrderStats second_order_stats(const EOSetup& s, const FilterParams& f, WaveformMode mode = WaveformMode::exact,
                                           const SecondOrderGrid& g = {}) {
  s.validate(f);
  EOKernel k(s);
  const double Ls = s.partition.lambda_cut / eo_unit;
  const double lo = f.lo() / eo_unit, hi = f.hi() / eo_unit, dw = f.delta_omega / eo_unit;
  const double xt = f.omega_tilde / eo_unit;

  auto Wn = composite_gauss_legendre(0.0, Ls, g.mir_panels);
  auto Bn = composite_gauss_legendre(lo, hi, g.band_panels);
  const std::size_t nW = Wn.size();
  std::vector<cplx> Fp(nW), Fm(nW);
  for (std::size_t i = 0; i < nW; ++i) {
    const double X = Wn[i].x;
    cplx sp = 0.0, sm = 0.0;
    if (mode == WaveformMode::midpoint) {
      sp = dw * k.scaled(X, xt);
      sm = dw * k.scaled(-X, xt);
    } else {
      for (const auto& b : Bn) {
        sp += b.w * k.scaled(X, b.x);
        sm += b.w * k.scaled(-X, b.x);
      }
    }
    Fp[i] = sp / std::sqrt(dw);
    Fm[i] = sm / std::sqrt(dw);
  }
  double wp = 0.0, wm = 0.0;
  cplx m = 0.0;
  for (std::size_t i = 0; i < nW; ++i) {
    wp += Wn[i].w * std::norm(Fp[i]);
    wm += Wn[i].w * std::norm(Fm[i]);
    m += Wn[i].w * Fp[i] * Fm[i];
  }
  SecondOrderStats out;
  out.first = first_order_from(wp, wm, m);
  const int s1 = out.first.comm_sign;
  if (s1 == 0) {
    out.variance = perturbative_limit_variance(out.first);
    return out;
  }
  const double t1 = out.first.theta1;

  const double xmax = std::min(s.probe.omega_p + 6.0 * s.probe.sigma_p + s.partition.lambda_cut,
                               0.999999 * s.crystal.dispersion.max_angular()) / eo_unit;
  auto Nn = composite_gauss_legendre(Ls, xmax, g.nir_panels, {lo, hi});
  const std::size_t nN = Nn.size();
  // Gm[j] = G(-omega_j), Gp[j] = G(omega_j).
  std::vector<cplx> Gp(nN, 0.0), Gm(nN, 0.0);
  for (std::size_t j = 0; j < nN; ++j) {
    const double x = Nn[j].x;
    cplx gp = 0.0, gm = 0.0;
    for (std::size_t i = 0; i < nW; ++i) {
      const double X = Wn[i].x, w = Wn[i].w / t1;
      // Omega > 0 contributes f(Omega) S(-Omega, .), Omega < 0 contributes -f(-X) S(X, .).
      gp += w * (Fp[i] * k.scaled(-X, x) - Fm[i] * k.scaled(X, x));
      gm += w * (Fp[i] * k.scaled(-X, -x) - Fm[i] * k.scaled(X, -x));
    }
    Gp[j] = gp;
    Gm[j] = gm;
  }
  double sn2 = 0.0;
  for (std::size_t j = 0; j < nN; ++j) sn2 += Nn[j].w * (std::norm(Gm[j]) - std::norm(Gp[j]));
  out.theta2 = std::sqrt(std::abs(sn2));
  out.comm_sign2 = std::abs(sn2) < regime_threshold ? 0 : (sn2 > 0 ? 1 : -1);
  if (out.comm_sign2 == 0) {
    out.variance = first_order_variance(out.first);
    return out;
  }
  const double t2 = out.theta2;
  const int s12 = s1 * out.comm_sign2;
  const double a = -static_cast<double>(s12) * t1 / t2;
  const double C = s12 > 0 ? std::cos(t2) : std::cosh(t2);
  const double S = s12 > 0 ? -std::sin(t2) : std::sinh(t2);
  const double ky = a * (C - 1.0) / t2, kx = a * S / t1;

  VarianceForm v{0.0, 0.0};
  for (std::size_t i = 0; i < nW; ++i) {
    const cplx lp = kx * Fp[i], lm = kx * Fm[i];
    v.a += Wn[i].w * (std::norm(lp) + std::norm(lm));
    v.b += Wn[i].w * lp * lm;
  }
  const double rect = 1.0 / std::sqrt(dw);
  for (std::size_t j = 0; j < nN; ++j) {
    const double x = Nn[j].x;
    const double in_band = (x > lo && x < hi) ? rect : 0.0;
    const cplx lp = in_band + ky * Gm[j], lm = ky * Gp[j];
    v.a += Nn[j].w * (std::norm(lp) + std::norm(lm));
    v.b += Nn[j].w * lp * lm;
  }
  out.variance = v;
  return out;
}

enum class EOOrder { first, second, perturbative };

struct EOVariances {
  double var_q = 1.0;
  double var_p = 1.0;
  VarianceForm form;
  SecondMoments moments;
};

inline EOVariances variances_from(const VarianceForm& v, const SecondMoments& m) {
  return {v.minor(), v.major(), v, m};
}

inline EOVariances eo_variances(const EOSetup& s, const FilterParams& f, EOOrder order,
                                WaveformMode mode = WaveformMode::exact, const Tolerances& tol = {}) {
  if (s.probe.alpha == 0.0) return {};
  if (order == EOOrder::second) {
    auto st = second_order_stats(s, f, mode);
    return variances_from(st.variance, probed_moments(st.first));
  }
  auto st = first_order_stats(s, f, mode, tol);
  const VarianceForm v = order == EOOrder::first ? first_order_variance(st) : perturbative_limit_variance(st);
  return variances_from(v, probed_moments(st));
}

/** \brief Probed MIR mode and probe pulse in time at x = 0. */
struct TemporalWaveform {
  std::vector<double> t;
  std::vector<cplx> probed;  // sqrt(1/eps0) Phi(t)
  std::vector<cplx> probe;   // E_p(t)
  std::vector<double> probed_env;
  std::vector<double> probe_env;
};

inline TemporalWaveform temporal_waveform(const EOSetup& s, const FilterParams& f, const std::vector<double>& t_grid,
                                          WaveformMode mode = WaveformMode::exact, const Tolerances& tol = {}) {
  if (t_grid.size() < 2) throw std::invalid_argument("temporal_waveform: need at least two time points");
  const SpectralAmplitude fm = probed_waveform(s, f, mode, tol);
  EOKernel k(s);
  const auto& K = s.constants;
  const auto& disp = s.crystal.dispersion;
  const double L = s.partition.lambda_cut;

  // Phi_Omega(t, 0) = sqrt(hbar c / (4 pi n |Omega| A)) e^{-i Omega t}; the mode amplitude is int sign conj(f) Phi_Omega.
  auto mir = composite_gauss_legendre(0.0, L, 64);
  std::vector<double> om;
  std::vector<cplx> co;
  for (const auto& nd : mir) {
    for (double sg : {1.0, -1.0}) {
      const double W = sg * nd.x;
      const double amp = std::sqrt(K.hbar * K.c / (4.0 * pi * disp(W) * nd.x * s.crystal.area * K.eps0));
      om.push_back(W);
      co.push_back(nd.w * sg * amp * std::conj(fm(W)));
    }
  }
  const double plo = std::max(0.0, s.probe.omega_p - s.probe.support_half_width());
  auto nir = composite_gauss_legendre(plo, s.probe.omega_p + s.probe.support_half_width(), 256);
  std::vector<cplx> pe;
  for (const auto& nd : nir) pe.push_back(nd.w * k.probe_field(nd.x));

  TemporalWaveform out;
  out.t = t_grid;
  for (double t : t_grid) {
    cplx a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < om.size(); ++i) a += co[i] * std::exp(cplx(0.0, -om[i] * t));
    for (std::size_t i = 0; i < nir.size(); ++i) b += pe[i] * std::exp(cplx(0.0, -nir[i].x * t));
    out.probed.push_back(a);
    out.probe.push_back(b);
    out.probed_env.push_back(std::abs(a));
    out.probe_env.push_back(std::abs(b));
  }
  return out;
}

/// Full width at half maximum of a sampled envelope, by linear interpolation around the global peak.
inline double fwhm(const std::vector<double>& t, const std::vector<double>& env) {
  if (t.size() != env.size() || t.size() < 3) throw std::invalid_argument("fwhm: mismatched or short series");
  const std::size_t p = static_cast<std::size_t>(std::max_element(env.begin(), env.end()) - env.begin());
  const double h = 0.5 * env[p];
  std::size_t l = p, r = p;
  while (l > 0 && env[l] > h) --l;
  while (r + 1 < env.size() && env[r] > h) ++r;
  if (env[l] > h || env[r] > h) throw std::domain_error("fwhm: envelope does not fall to half maximum in the grid");
  auto cross = [&](std::size_t i, std::size_t j) { return t[i] + (h - env[i]) * (t[j] - t[i]) / (env[j] - env[i]); };
  return cross(r - 1, r) - cross(l, l + 1);
}

struct EllipsometryExpectations {
  double sum = 0.0;         // int_band |alpha_z|^2
  double sum_approx = 0.0;  // dw |alpha_z(omega_tilde)|^2
  double difference = 0.0;
  double normalized_quadrature = 0.0;
  double variance = 1.0;
};

/// Balanced read-out on the vacuum MIR input: the difference channel has zero mean.
inline EllipsometryExpectations ellipsometry_expectations(const EOSetup& s, const FilterParams& f, double phi,
                                                          EOOrder order = EOOrder::first,
                                                          const Tolerances& tol = {}) {
  s.validate(f);
  EOKernel k(s);
  const cplx a = s.probe.alpha;
  auto az = [&](double w) { return a * std::conj(k.probe_amplitude(w)) - std::conj(a) * k.probe_amplitude(-w); };
  EllipsometryExpectations e;
  e.sum = integrate([&](double w) { return cplx(std::norm(az(w))); }, IntegrationDomain::finite(f.lo(), f.hi()),
                    tol.rel_tol, 0.0)
              .value.real();
  e.sum_approx = f.delta_omega * std::norm(az(f.omega_tilde));
  e.variance = eo_variances(s, f, order, WaveformMode::exact, tol).form.at(phi);
  return e;
}

}  // namespace vacsim

#endif  // VACSIM_EO_MODEL_HPP
