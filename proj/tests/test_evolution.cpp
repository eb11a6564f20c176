#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <vacsim/evolution.hpp>

#include "oracles.hpp"

using namespace vacsim;

namespace {

/// Normalized annihilation-type combination of modes [lo, hi).
LinearForm random_mode(std::mt19937_64& rng, Eigen::Index n, Eigen::Index lo, Eigen::Index hi) {
  LinearForm u(n);
  for (Eigen::Index i = lo; i < hi; ++i) u.ann(i) = oracle::random_complex(rng);
  return (1.0 / std::sqrt(signed_norm(u))) * u;
}

/** Weak bipartite instance: 4 "MIR" modes coupled to 4 "NIR" modes, probed from a NIR mode,
 *  rescaled so theta1 is uniform in [0.01, 0.1]. */
struct Instance {
  QuadraticForm s;
  LinearForm u0;
  double theta1 = 0.0;
};

Instance weak_instance(std::mt19937_64& rng, bool beam_splitter) {
  std::uniform_real_distribution<double> target(0.01, 0.1);
  Instance in{oracle::random_bipartite(rng, 4, 4, beam_splitter, 0.3), random_mode(rng, 8, 4, 8), 0.0};
  const double t = std::sqrt(std::abs(signed_norm(commutator(in.u0, in.s))));
  in.theta1 = target(rng);
  in.s *= in.theta1 / t;
  return in;
}

double gram_defect(const std::vector<LinearForm>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      d = std::max(d, std::abs(oracle::bracket(b[i], b[j].dagger()) - (i == j ? 1.0 : 0.0)));
      d = std::max(d, std::abs(oracle::bracket(b[i], b[j])));
    }
  return d;
}

double var_gap(const LinearForm& x, const LinearForm& y) {
  const VarianceForm a = variance_form(x), b = variance_form(y);
  return std::max(std::abs(a.at(0.0) - b.at(0.0)), std::abs(a.at(oracle::pi / 2) - b.at(oracle::pi / 2)));
}

}  // namespace

TEST(BuildChain, RejectsBadInput) {
  QuadraticForm s(2);
  EXPECT_THROW(build_chain(s, 2.0 * LinearForm::annihilator(2, 0), 2), std::invalid_argument);
  EXPECT_THROW(build_chain(s, LinearForm::annihilator(2, 0), 0), std::invalid_argument);
}

TEST(BuildChain, ZeroActionTerminates) {
  const auto chain = build_chain(QuadraticForm(2), LinearForm::annihilator(2, 0), 3);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(chain[1].comm_sign, 0);
  EXPECT_EQ(live_length(chain), 1u);
  EXPECT_LT(oracle::max_abs_diff(evolve_first_order(chain).coeffs, chain[0].coeffs), 1e-15);
}

TEST(ExactBogoliubov, ZeroActionIsIdentity) {
  const BogoliubovMap m = exact_bogoliubov(QuadraticForm(3));
  EXPECT_LT((m.A - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(m.B.cwiseAbs().maxCoeff(), 0.0);
  const LinearForm u = LinearForm::annihilator(3, 1);
  EXPECT_NEAR(vacuum_covariance(m, u, 0.3), 1.0, 1e-15);
}

TEST(ExactBogoliubov, RankOneBeamSplitterRotation) {
  const double th = 0.7;
  QuadraticForm s(2);
  s.ad_a(0, 1) = th;   // th a0^dag a1
  s.ad_a(1, 0) = -th;  // -th a1^dag a0
  const BogoliubovMap m = exact_bogoliubov(s);
  const LinearForm out = apply(m, LinearForm::annihilator(2, 0));
  EXPECT_NEAR(std::abs(out.ann(0) - std::cos(th)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out.ann(1) - std::sin(th)), 0.0, 1e-14);
  EXPECT_LT(out.cre.norm(), 1e-15);
  const auto chain = build_chain(s, LinearForm::annihilator(2, 0), 2);
  EXPECT_EQ(chain[1].comm_sign, 1);
  EXPECT_NEAR(chain[1].theta, th, 1e-15);
  EXPECT_LT(oracle::max_abs_diff(evolve_first_order(chain).coeffs, out), 1e-14);
}

TEST(ExactBogoliubov, SingleModeSqueezer) {
  const double r = 0.4;
  QuadraticForm s(1);
  s.adad(0, 0) = 0.5 * r;
  s.aa(0, 0) = -0.5 * r;
  const BogoliubovMap m = exact_bogoliubov(s);
  const LinearForm a = LinearForm::annihilator(1, 0);
  EXPECT_NEAR(vacuum_covariance(m, a, 0.0), std::exp(2 * r), 1e-13);
  EXPECT_NEAR(vacuum_covariance(m, a, oracle::pi / 2), std::exp(-2 * r), 1e-13);
  const auto chain = build_chain(s, a, 2);
  EXPECT_EQ(chain[1].comm_sign, -1);
  EXPECT_LT(var_gap(evolve_first_order(chain).coeffs, apply(m, a)), 1e-13);
}

TEST(ExactBogoliubov, SymplecticOnRandomActions) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> scale(0.01, 0.1);
  for (int t = 0; t < 1000; ++t) {
    QuadraticForm s = oracle::random_anti_hermitian(rng, 8);
    s *= scale(rng) / s.max_abs();
    ASSERT_LT(symplectic_defect(exact_bogoliubov(s)), 1e-10);
  }
}

TEST(ExactBogoliubov, VacuumCovarianceIsPhysical) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    QuadraticForm s = oracle::random_anti_hermitian(rng, 6);
    s *= 0.3 / s.max_abs();
    const BogoliubovMap m = exact_bogoliubov(s);
    const LinearForm u = random_mode(rng, 6, 0, 6);
    const VarianceForm v = variance_form(apply(m, u));
    EXPECT_GE(v.minor() * v.major(), 1.0 - 1e-8);
    EXPECT_GT(v.minor(), 0.0);
  }
}

TEST(FirstOrder, CommutatorPreserved) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const Instance in = weak_instance(rng, t % 2 == 0);
    const auto chain = build_chain(in.s, in.u0, 1);
    const LinearForm e = evolve_first_order(chain).coeffs;
    EXPECT_NEAR(signed_norm(e), 1.0, 1e-12);
  }
  const double th = 1.234;
  const auto e = evolve_first_order(th, 1, LinearForm::annihilator(2, 0), LinearForm::annihilator(2, 1));
  EXPECT_EQ(std::norm(e.coeffs.ann(0)) + std::norm(e.coeffs.ann(1)), std::cos(th) * std::cos(th) + std::sin(th) * std::sin(th));
  EXPECT_THROW(evolve_first_order(-0.1, 1, e.coeffs, e.coeffs), std::invalid_argument);
}

TEST(SecondOrder, FourCaseEqualsMForm) {
  std::mt19937_64 rng(24);
  int seen[2][2] = {{0, 0}, {0, 0}};
  for (int t = 0; t < 400; ++t) {
    QuadraticForm s = oracle::random_bipartite(rng, 4, 4, t % 2 == 0, 0.3 + 0.7 * ((t / 2) % 2));
    const LinearForm u0 = random_mode(rng, 8, 4, 8);
    const auto chain = build_chain(s, u0, 2);
    if (live_length(chain) < 3) continue;
    ++seen[chain[1].comm_sign > 0][chain[2].comm_sign > 0];
    const LinearForm four = evolve_second_order(chain).coeffs;
    EXPECT_LT(oracle::max_abs_diff(four, evolve_second_order_m(chain).coeffs), 1e-12 * std::max(1.0, four.norm()));
  }
  for (auto& row : seen)
    for (int c : row) EXPECT_GT(c, 0);
}

TEST(SecondOrder, MatchesExactEvolutionUnderProjectedAction) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 100; ++t) {
    Instance in = weak_instance(rng, t % 2 == 0);
    in.s *= 10.0;  // strong coupling: the two routes must agree at any strength
    const auto chain = build_chain(in.s, in.u0, 2);
    const auto ortho = orthogonalize_chain(chain);
    ASSERT_EQ(live_length(ortho), 3u);
    const LinearForm closed2 = evolve_second_order(chain).coeffs;
    const LinearForm proj2 = evolve_projected(in.s, ortho, 3, in.u0, Order::second).coeffs;
    EXPECT_LT(oracle::max_abs_diff(closed2, proj2), 1e-9);
    const LinearForm closed1 = evolve_first_order(chain).coeffs;
    const LinearForm proj1 = evolve_projected(in.s, ortho, 2, in.u0, Order::first).coeffs;
    EXPECT_LT(oracle::max_abs_diff(closed1, proj1), 1e-9);
  }
}

TEST(Chain, OrthonormalAfterGramSchmidt) {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 100; ++t) {
    QuadraticForm s = oracle::random_anti_hermitian(rng, 8);
    const auto chain = build_chain(s, random_mode(rng, 8, 0, 8), 4);
    const auto hats = chain_hats(orthogonalize_chain(chain));
    EXPECT_GE(hats.size(), 3u);
    EXPECT_LT(gram_defect(hats), 1e-10);
  }
}

TEST(Chain, ActionPropositionsHold) {
  std::mt19937_64 rng(27);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    QuadraticForm s = oracle::random_anti_hermitian(rng, 8);
    const auto chain = build_chain(s, random_mode(rng, 8, 0, 8), 4);
    const auto ortho = orthogonalize_chain(chain);
    for (std::size_t n = 1; n <= 3; ++n) {
      if (live_length(ortho) < n + 1) continue;
      std::vector<LinearForm> hats = chain_hats(ortho);
      hats.resize(n + 1);
      const auto basis = oracle::complete_basis(hats, 8);
      ASSERT_EQ(basis.size(), 8u);
      ASSERT_LT(gram_defect(basis), 1e-9);
      QuadraticForm s_n(8), s_n_perp(8), s_perp(8);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = i; j < 8; ++j) {
          const QuadraticForm p = pair_component(s, basis, i, j);
          if (j <= n)
            s_n += p;
          else if (i <= n)
            s_n_perp += p;
          else
            s_perp += p;
        }
      const double scale = oracle::decomposition_scale(s, basis);
      ASSERT_LT(max_abs_difference(s_n + s_n_perp + s_perp, s), 1e-10 * scale);
      for (std::size_t m = 0; m < n; ++m) {
        const LinearForm& c = chain[m].coeffs;
        const double cs = scale * std::max(1.0, c.norm());
        EXPECT_LT(oracle::bracket(c.dagger(), s_perp).norm(), 1e-10 * cs);
        EXPECT_LT(oracle::bracket(c, s_perp).norm(), 1e-10 * cs);
        EXPECT_LT(oracle::bracket(c.dagger(), s_n_perp).norm(), 1e-10 * cs);
        EXPECT_LT(oracle::bracket(c, s_n_perp).norm(), 1e-10 * cs);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Chain, TerminatedMemberEndsChain) {
  // u0 couples to a1 only; a1 couples back to u0 only
  QuadraticForm s(3);
  s.ad_a(0, 1) = 0.2;
  s.ad_a(1, 0) = -0.2;
  const auto chain = build_chain(s, LinearForm::annihilator(3, 0), 4);
  EXPECT_EQ(live_length(chain), 5u);
  const auto ortho = orthogonalize_chain(chain);
  EXPECT_EQ(live_length(ortho), 2u);
}

TEST(Baseline, IsFirstBchTerm) {
  std::mt19937_64 rng(28);
  const Instance in = weak_instance(rng, true);
  const LinearForm b = perturbation_baseline(in.s, in.u0).coeffs;
  EXPECT_LT(oracle::max_abs_diff(b, in.u0 + oracle::bracket(in.u0, in.s)), 1e-15);
}

TEST(BchProperty, TaylorAgreementOrders) {
  // D(e) = evolve(eS) - sum_{k<=n} [u, eS]^(k)/k! must shrink as e^(n+1).
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    const Instance in = weak_instance(rng, t % 2 == 0);
    double prev1 = 0.0, prev2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double e = std::pow(0.5, k);
      QuadraticForm s = e * in.s;
      const LinearForm c1 = oracle::bracket(in.u0, s);
      const LinearForm c2 = oracle::bracket(c1, s);
      const auto chain = build_chain(s, in.u0, 2);
      const double d1 = oracle::max_abs_diff(evolve_first_order(chain).coeffs, in.u0 + c1);
      const double d2 = oracle::max_abs_diff(evolve_second_order(chain).coeffs, in.u0 + c1 + 0.5 * c2);
      if (k > 0) {
        EXPECT_NEAR(prev1 / d1, 4.0, 0.5);
        EXPECT_NEAR(prev2 / d2, 8.0, 1.0);
      }
      prev1 = d1;
      prev2 = d2;
    }
  }
}

TEST(OracleProperty, WeakCouplingAgreement) {
  // eps: operator norm of the adjoint action
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> target(0.01, 0.1);
  double worst1 = 0.0, worst2 = 0.0;
  for (int t = 0; t < 100; ++t) {
    QuadraticForm s = t % 2 == 0 ? oracle::random_anti_hermitian(rng, 8)
                                 : oracle::random_bipartite(rng, 4, 4, t % 4 == 1, 0.3);
    const LinearForm u0 = random_mode(rng, 8, t % 2 == 0 ? 0 : 4, 8);
    const double eps = target(rng);
    s *= eps / Eigen::JacobiSVD<Eigen::MatrixXcd>(adjoint_matrix(s)).singularValues()(0);
    const BogoliubovMap m = exact_bogoliubov(s);
    ASSERT_LT(symplectic_defect(m), 1e-10);
    const LinearForm exact = apply(m, u0);
    const auto chain = build_chain(s, u0, 2);
    const double g1 = var_gap(evolve_first_order(chain).coeffs, exact);
    const double g2 = var_gap(evolve_second_order(chain).coeffs, exact);
    worst1 = std::max(worst1, g1 / (eps * eps));
    worst2 = std::max(worst2, g2 / (eps * eps * eps));
    EXPECT_LE(g1, 5.0 * eps * eps);
    EXPECT_LE(g2, 5.0 * eps * eps * eps);
  }
  std::printf("max gap/eps^2 (order 1) = %.3g, max gap/eps^3 (order 2) = %.3g\n", worst1, worst2);
}
