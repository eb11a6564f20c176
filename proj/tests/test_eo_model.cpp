#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <vacsim/eo_model.hpp>

#include "oracles.hpp"

using namespace vacsim;

namespace {

constexpr double hbar = 1.054571817e-34, c0 = 299792458.0, eps0 = 8.8541878128e-12;

/// Index from the library model; its branches are checked against hand values in test_dispersion.
double n_of(const EOSetup& s, double w) { return s.crystal.dispersion(w); }

/// f_p(w) = (sigma sqrt(2 pi))^{-1/2} e^{-(w - wp)^2 / (4 sigma^2)}.
double fp(const EOSetup& s, double w) {
  const double d = w - s.probe.omega_p, sg = s.probe.sigma_p;
  if (std::abs(d) > 8.0 * sg) return 0.0;
  return std::pow(sg * std::sqrt(2.0 * oracle::pi), -0.5) * std::exp(-d * d / (4.0 * sg * sg));
}

oracle::cplx Ep(const EOSetup& s, double w) {
  const double np = n_of(s, s.probe.omega_p);
  return oracle::cplx(0.0, 1.0) * std::sqrt(hbar * std::abs(w) / (4.0 * oracle::pi * np * c0 * eps0 * s.crystal.area)) *
         fp(s, w);
}

oracle::cplx alpha_p_oracle(const EOSetup& s, double x) {
  return s.probe.alpha * Ep(s, x) + std::conj(s.probe.alpha) * std::conj(Ep(s, -x));
}

double eta_oracle(const EOSetup& s, double W, double w) {
  const double nw = n_of(s, w), nW = n_of(s, W), nd = n_of(s, w - W);
  return s.crystal.length / (2.0 * c0) * (w * (nw - nd) - W * (nW - nd));
}

oracle::cplx zeta_oracle(const EOSetup& s, double W, double w) {
  const double np = n_of(s, s.probe.omega_p);
  const double lambda = s.crystal.area * eps0 * (-std::pow(np, 4) * s.crystal.r41) / 2.0;
  const double pre = lambda * s.crystal.length / (s.crystal.area * c0 * eps0);
  const double e = eta_oracle(s, W, w);
  const double sc = e == 0.0 ? 1.0 : std::sin(e) / e;
  const double sgn = (w * W > 0) ? 1.0 : -1.0;
  return oracle::cplx(0.0, -sgn * pre * std::sqrt(std::abs(w * W) / (n_of(s, w) * n_of(s, W))) * sc);
}

FilterParams filter_at(const EOSetup& s, double offset_sigma) {
  return {s.probe.omega_p + offset_sigma * s.probe.sigma_p, two_pi * 1e12};
}

}  // namespace

TEST(EOSetup, ValidationErrors) {
  EOSetup s;
  EXPECT_NO_THROW(s.validate(filter_at(s, 0.0)));
  EXPECT_THROW(s.validate(FilterParams{two_pi * 90e12, two_pi * 1e12}), std::invalid_argument);
  EXPECT_THROW(s.validate(FilterParams{two_pi * 560e12, two_pi * 1e12}), std::out_of_range);
  EXPECT_THROW(s.validate(FilterParams{two_pi * 255e12, 0.0}), std::invalid_argument);
  EOSetup bad;
  bad.crystal.length = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EOSetup bad2;
  bad2.probe.sigma_p = -1.0;
  EXPECT_THROW(bad2.validate(), std::invalid_argument);
}

TEST(EOSetup, ReferenceParameters) {
  EOSetup s;
  EXPECT_NEAR(s.probe.sigma_p / 1e12, 203.0, 0.5);
  EXPECT_NEAR(std::norm(s.probe.alpha), 5e9, 1e-3);
  EXPECT_FALSE(s.probe.mean_field_warning());
  EOSetup w;
  w.probe.alpha = 1.0;
  EXPECT_TRUE(w.probe.mean_field_warning());
  EXPECT_NEAR(s.crystal.coupling_lambda(s.probe.omega_p),
              s.crystal.area * eps0 * s.crystal.coupling_d(s.probe.omega_p) / 2.0, 1e-40);
}

TEST(Probe, SpectrumIsNormalized) {
  EOSetup s;
  EXPECT_NEAR(bosonic_norm(probe_spectrum(s)), 1.0, 1e-9);
  for (double d : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
    const double w = s.probe.omega_p + d * s.probe.sigma_p;
    EXPECT_NEAR(std::abs(probe_spectrum(s)(w)), fp(s, w), 1e-12 * fp(s, s.probe.omega_p));
  }
}

TEST(Kernel, MatchesIndependentEvaluation) {
  EOSetup s;
  EOKernel k(s);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> mir(-s.partition.lambda_cut, s.partition.lambda_cut);
  std::uniform_real_distribution<double> nir(s.partition.lambda_cut, s.probe.omega_p + 4.0 * s.probe.sigma_p);
  double smax = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double W = mir(rng), w = (i % 2 ? 1.0 : -1.0) * nir(rng);
    const oracle::cplx want = alpha_p_oracle(s, w - W) * zeta_oracle(s, W, w);
    const oracle::cplx got = action_kernel(s, W, w);
    smax = std::max(smax, std::abs(want));
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-9 * std::abs(want) + 1e-30);
    EXPECT_NEAR(phase_mismatch(s.crystal.dispersion, W, w, s.crystal.length), eta_oracle(s, W, w), 1e-12);
  }
  EXPECT_GT(smax, 0.0);
}

TEST(Kernel, AntiHermiticity) {
  EOSetup s;
  EOKernel k(s);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mir(-s.partition.lambda_cut, s.partition.lambda_cut);
  std::uniform_real_distribution<double> nir(s.partition.lambda_cut, s.probe.omega_p + 4.0 * s.probe.sigma_p);
  std::vector<std::pair<double, double>> pts;
  double smax = 0.0;
  for (int i = 0; i < 2000; ++i) {
    pts.push_back({mir(rng), nir(rng)});
    smax = std::max(smax, std::abs(k.kernel(pts.back().first, pts.back().second)));
  }
  double worst = 0.0;
  for (auto [W, w] : pts) worst = std::max(worst, std::abs(k.kernel(W, w) + std::conj(k.kernel(-W, -w))));
  EXPECT_LT(worst, 1e-12 * smax);
}

TEST(Kernel, DomainAndZeroCoupling) {
  EOSetup s;
  EXPECT_THROW(action_kernel(s, 2.0 * s.partition.lambda_cut, s.probe.omega_p), std::domain_error);
  EXPECT_THROW(action_kernel(s, 0.1 * s.partition.lambda_cut, 0.5 * s.partition.lambda_cut), std::domain_error);
  s.probe.alpha = 0.0;
  EXPECT_EQ(std::abs(action_kernel(s, 1e14, s.probe.omega_p)), 0.0);
}

TEST(Kernel, AlphaPSymmetry) {
  EOSetup s;
  s.probe.alpha = oracle::cplx(3.0, -2.0);
  s.probe.t_p = 2e-15;
  for (double x : {1e14, 1.2e15, 1.7e15}) {
    EXPECT_NEAR(std::abs(alpha_p(s, x) - std::conj(alpha_p(s, -x))), 0.0, 1e-12 * std::abs(alpha_p(s, x)) + 1e-300);
  }
}

TEST(PhaseMatching, SincAndDispersionless) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(1e-4 * 0.999), std::sin(0.999e-4) / 0.999e-4, 1e-16);
  EXPECT_NEAR(sinc(2.0), std::sin(2.0) / 2.0, 1e-16);
  const auto m = RefractiveIndexModel::uniform(2.76);
  EXPECT_EQ(phase_mismatch(m, 1e14, 1.6e15, 7e-6), 0.0);
}

TEST(EOVariancesProperty, ShotNoiseLimit) {
  EOSetup s;
  s.probe.alpha = 1.0;
  for (double off : {-1.5, 0.0, 1.5}) {
    const FilterParams f = filter_at(s, off);
    for (EOOrder o : {EOOrder::first, EOOrder::second, EOOrder::perturbative}) {
      const EOVariances v = eo_variances(s, f, o);
      EXPECT_NEAR(v.var_q, 1.0, 1e-6);
      EXPECT_NEAR(v.var_p, 1.0, 1e-6);
    }
  }
  s.probe.alpha = 0.0;
  const EOVariances z = eo_variances(s, filter_at(s, 0.5), EOOrder::second);
  EXPECT_EQ(z.var_q, 1.0);
  EXPECT_EQ(z.var_p, 1.0);
  EXPECT_THROW(regime_classify(s, filter_at(s, 0.5)), std::domain_error);
}

TEST(EOVariancesProperty, UncertaintyFloor) {
  EOSetup s;
  for (double off : {-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0}) {
    const FilterParams f = filter_at(s, off);
    for (EOOrder o : {EOOrder::first, EOOrder::second}) {
      const EOVariances v = eo_variances(s, f, o);
      EXPECT_GE(v.var_q * v.var_p, 1.0 - 1e-6) << off;
      EXPECT_LE(v.var_q, v.var_p);
    }
  }
}

TEST(FirstOrder, MidpointApproachesExactForNarrowFilter) {
  EOSetup s;
  FilterParams f = filter_at(s, 0.8);
  f.delta_omega = two_pi * 0.05e12;
  const FirstOrderStats a = first_order_stats(s, f, WaveformMode::exact);
  const FirstOrderStats b = first_order_stats(s, f, WaveformMode::midpoint);
  EXPECT_NEAR(a.theta1, b.theta1, 1e-4 * a.theta1);
}

TEST(FirstOrder, ThetaScalesWithFieldAmplitude) {
  // S is linear in alpha, so theta1 scales as |alpha| and the signed measure is invariant.
  EOSetup s;
  const FilterParams f = filter_at(s, 1.0);
  const FirstOrderStats a = first_order_stats(s, f);
  s.probe.alpha *= 2.0;
  const FirstOrderStats b = first_order_stats(s, f);
  EXPECT_NEAR(b.theta1, 2.0 * a.theta1, 1e-7 * a.theta1);
  EXPECT_NEAR(b.comm_signed, a.comm_signed, 1e-7);
}

TEST(FirstOrder, RegimeMatchesSignedMeasure) {
  EOSetup s;
  for (double off : {-1.5, 1.5}) {
    const FirstOrderStats st = first_order_stats(s, filter_at(s, off));
    const RegimeClass r = regime_from(st);
    EXPECT_EQ(r.regime == Regime::beam_splitter, st.w_plus > st.w_minus);
    EXPECT_EQ(r.signed_value, st.comm_signed);
  }
}

TEST(FirstOrder, ProbedWaveformIsNormalized) {
  EOSetup s;
  const FilterParams f = filter_at(s, 1.5);
  const SpectralAmplitude m = probed_waveform(s, f);
  const auto r = integrate([&](double W) { return std::norm(m(W)) + std::norm(m(-W)); }, m.window, 1e-8, 0.0);
  EXPECT_NEAR(r.value.real(), 1.0, 1e-6);
}

TEST(SecondOrder, GridConvergence) {
  EOSetup s;
  for (double off : {-1.0, 0.1, 1.2}) {
    const FilterParams f = filter_at(s, off);
    const SecondOrderStats a = second_order_stats(s, f);
    const SecondOrderStats b = second_order_stats(s, f, WaveformMode::exact, {48, 112, 4});
    EXPECT_NEAR(a.variance.minor(), b.variance.minor(), 1e-6);
    EXPECT_NEAR(a.variance.major(), b.variance.major(), 1e-6);
    EXPECT_NEAR(a.theta2, b.theta2, 1e-6 * b.theta2);
    EXPECT_NEAR(a.first.theta1, first_order_stats(s, f).theta1, 1e-8);
  }
}

TEST(Dispersionless, ProbedModeReducesToProbeShape) {
  EOSetup s;
  s.crystal.dispersion = RefractiveIndexModel::uniform(2.76);
  const FilterParams f = filter_at(s, 1.5);
  const SpectralAmplitude m = probed_waveform(s, f, WaveformMode::midpoint);
  auto shape = [&](double W) {
    const double x = f.omega_tilde - W - s.probe.omega_p;
    return sign(W) * std::sqrt(std::abs(W)) * std::sqrt(std::abs(f.omega_tilde - W)) *
           std::exp(-x * x / (4.0 * s.probe.sigma_p * s.probe.sigma_p));
  };
  const double L = s.partition.lambda_cut;
  const oracle::cplx ref = m(0.4 * L) / shape(0.4 * L);
  for (double r : {-0.9, -0.5, -0.1, 0.05, 0.3, 0.7, 0.95}) {
    const double W = r * L;
    EXPECT_NEAR(std::abs(m(W) / shape(W) - ref), 0.0, 1e-9 * std::abs(ref)) << r;
  }
}

TEST(Waveform, FwhmOfGaussianEnvelope) {
  std::vector<double> t, e;
  const double sg = 3.0;
  for (int i = -400; i <= 400; ++i) {
    t.push_back(0.05 * i);
    e.push_back(std::exp(-t.back() * t.back() / (2 * sg * sg)));
  }
  EXPECT_NEAR(fwhm(t, e), 2.0 * std::sqrt(2.0 * std::log(2.0)) * sg, 1e-3);
  EXPECT_THROW(fwhm({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}), std::domain_error);
}

TEST(Waveform, ProbeEnvelopeWidth) {
  // |E_p(t)| ~ e^{-sigma^2 t^2}: its FWHM is sqrt(2) times the 5.8 fs intensity FWHM, up to the sqrt(omega) factor.
  EOSetup s;
  std::vector<double> t;
  for (int i = -200; i <= 200; ++i) t.push_back(0.1e-15 * i);
  const TemporalWaveform w = temporal_waveform(s, filter_at(s, 1.5), t);
  EXPECT_NEAR(fwhm(w.t, w.probe_env) / 1e-15, 5.8 * std::sqrt(2.0), 0.02 * 5.8 * std::sqrt(2.0));
}

TEST(Ellipsometry, VacuumExpectations) {
  EOSetup s;
  const FilterParams f = filter_at(s, 1.0);
  const EllipsometryExpectations e = ellipsometry_expectations(s, f, 0.0);
  EXPECT_EQ(e.difference, 0.0);
  EXPECT_EQ(e.normalized_quadrature, 0.0);
  EXPECT_NEAR(e.sum, e.sum_approx, 1e-4 * e.sum);
  const EllipsometryExpectations q = ellipsometry_expectations(s, f, oracle::pi / 2);
  const EOVariances v = eo_variances(s, f, EOOrder::first);
  EXPECT_NEAR(e.variance, v.form.at(0.0), 1e-12);
  EXPECT_NEAR(q.variance, v.form.at(oracle::pi / 2), 1e-12);
  EXPECT_GE(e.variance * q.variance, 1.0 - 1e-6);
}
