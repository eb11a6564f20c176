#ifndef VACSIM_EVOLUTION_HPP
#define VACSIM_EVOLUTION_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "mode_algebra.hpp"
#include "operator_forms.hpp"

namespace vacsim {

/// |signed commutator| below this marks a chain member as terminated.
inline constexpr double comm_sign_threshold = 1e-8;

enum class Order { first, second, perturbative, exact };

inline std::string to_string(Order o) {
  switch (o) {
    case Order::first: return "1";
    case Order::second: return "2";
    case Order::perturbative: return "pert";
    case Order::exact: return "exact";
  }
  return "?";
}

/** \brief Chain member c^(n) = [c^(n-1), S] / theta^(n), kept in its "bar" orientation.
 *  comm_sign is [c, c^dagger] (+1, -1) or 0 for a terminated member. */
struct ChainMode {
  LinearForm coeffs;
  double theta = 0.0;
  int comm_sign = 0;
};

/// The annihilation-type operator of a chain member: c if comm_sign = +1, c^dagger if -1.
inline LinearForm hat(const ChainMode& m) { return m.comm_sign < 0 ? m.coeffs.dagger() : m.coeffs; }

struct EvolvedOperator {
  LinearForm coeffs;
  Order order = Order::first;
};

/** \brief b_j -> sum_k A_jk b_k + B_jk b_k^dagger. */
struct BogoliubovMap {
  Eigen::MatrixXcd A;
  Eigen::MatrixXcd B;
};

inline int classify_sign(double signed_value) {
  if (std::abs(signed_value) < comm_sign_threshold) return 0;
  return signed_value > 0.0 ? 1 : -1;
}

/// Quadrature variance Var(phi) = a + 2 Re[b e^{-2i phi}] of a linear form on the mode vacuum.
inline VarianceForm variance_form(const LinearForm& x) {
  return {x.ann.squaredNorm() + x.cre.squaredNorm(), (x.ann.array() * x.cre.array()).sum()};
}

inline std::vector<ChainMode> build_chain(const QuadraticForm& s, const LinearForm& u0, int n_max) {
  if (n_max < 1) throw std::invalid_argument("build_chain: n_max must be >= 1");
  const double norm0 = signed_norm(u0);
  if (std::abs(std::abs(norm0) - 1.0) > 1e-10) throw std::invalid_argument("build_chain: u0 is not normalized");
  std::vector<ChainMode> chain{{u0, 0.0, norm0 > 0 ? 1 : -1}};
  for (int n = 1; n <= n_max; ++n) {
    LinearForm raw = commutator(chain.back().coeffs, s);
    const double sn = signed_norm(raw);
    const int sg = classify_sign(sn);
    if (sg == 0) {
      chain.push_back({raw, 0.0, 0});
      break;
    }
    const double theta = std::sqrt(std::abs(sn));
    chain.push_back({(1.0 / theta) * raw, theta, sg});
  }
  return chain;
}

/// Chain members that are live (comm_sign != 0); a terminated member ends the list.
inline std::size_t live_length(const std::vector<ChainMode>& chain) {
  std::size_t n = 0;
  while (n < chain.size() && chain[n].comm_sign != 0) ++n;
  return n;
}

/// Gram-Schmidt under the commutator product. Members that become isotropic are
/// returned with comm_sign 0 and excluded from later projections.
inline std::vector<ChainMode> orthogonalize_chain(const std::vector<ChainMode>& chain, double tol = 1e-10) {
  std::vector<ChainMode> out;
  std::vector<LinearForm> hats;
  for (const auto& m : chain) {
    if (m.comm_sign == 0) {
      out.push_back(m);
      continue;
    }
    LinearForm v = m.coeffs;
    for (const auto& e : hats) {
      const cplx c_ann = commutator(v, e.dagger());
      const cplx c_cre = commutator(e, v);
      v -= c_ann * e;
      v -= c_cre * e.dagger();
    }
    const double sn = signed_norm(v);
    if (std::abs(sn) < tol) {
      out.push_back({v, m.theta, 0});
      continue;
    }
    ChainMode o{(1.0 / std::sqrt(std::abs(sn))) * v, m.theta, sn > 0 ? 1 : -1};
    hats.push_back(hat(o));
    out.push_back(o);
  }
  return out;
}

/// Annihilation-type operators of the live members of an orthonormal chain.
inline std::vector<LinearForm> chain_hats(const std::vector<ChainMode>& ortho) {
  std::vector<LinearForm> h;
  for (const auto& m : ortho)
    if (m.comm_sign != 0) h.push_back(hat(m));
  return h;
}

/// u' = cos u0 + sin a1 for comm_sign = +1, cosh u0 + sinh a1 for -1; identity for 0.
inline EvolvedOperator evolve_first_order(double theta1, int comm_sign, const LinearForm& u0, const LinearForm& a1) {
  if (theta1 < 0.0) throw std::invalid_argument("evolve_first_order: theta1 must be >= 0");
  EvolvedOperator e{u0, Order::first};
  if (comm_sign > 0) e.coeffs = std::cos(theta1) * u0 + std::sin(theta1) * a1;
  if (comm_sign < 0) e.coeffs = std::cosh(theta1) * u0 + std::sinh(theta1) * a1;
  return e;
}

inline EvolvedOperator evolve_first_order(const std::vector<ChainMode>& chain) {
  if (live_length(chain) < 2) return {chain.front().coeffs, Order::first};
  return evolve_first_order(chain[1].theta, chain[1].comm_sign, chain[0].coeffs, chain[1].coeffs);
}

/** \brief Scalars of u' = u + M0 ((M2 - 1) c2 + M1 c1), where c1, c2 are the bar chain members. */
struct SecondOrderCoefficients {
  cplx m0{0.0};
  double m1 = 0.0;
  double m2 = 1.0;
};

/// M-coefficients from the chain signs, theta2, and the two overlaps [u, c2hat^dagger], [c2hat, u].
inline SecondOrderCoefficients second_order_coefficients(int s1, int s2, double theta2, cplx u_c2hat_dag,
                                                         cplx c2hat_u) {
  const double plus = std::abs(static_cast<double>(s1 + s2)) / 2.0;   // |[c1+c2, c1^dag+c2^dag]|/2
  const double minus = std::abs(static_cast<double>(s1 - s2)) / 2.0;  // |[c1+c2, c1^dag-c2^dag]|/2
  SecondOrderCoefficients m;
  m.m0 = u_c2hat_dag + c2hat_u;
  m.m2 = plus * std::cos(theta2) + minus * std::cosh(theta2);
  m.m1 = -plus * std::sin(theta2) + minus * std::sinh(theta2);
  return m;
}

/// Second order written with M-coefficients. Needs the raw (non-orthogonalized) chain u, c1, c2.
inline EvolvedOperator evolve_second_order_m(const std::vector<ChainMode>& chain) {
  if (live_length(chain) < 3) {
    EvolvedOperator e = evolve_first_order(chain);
    e.order = Order::second;
    return e;
  }
  const LinearForm& u = chain[0].coeffs;
  const LinearForm& c1 = chain[1].coeffs;
  const LinearForm& c2 = chain[2].coeffs;
  const LinearForm h2 = hat(chain[2]);
  auto m = second_order_coefficients(chain[1].comm_sign, chain[2].comm_sign, chain[2].theta,
                                     commutator(u, h2.dagger()), commutator(h2, u));
  LinearForm out = u + m.m0 * ((m.m2 - 1.0) * c2 + m.m1 * c1);
  return {out, Order::second};
}

/// Second order by sign case. Same preconditions as evolve_second_order_m.
inline EvolvedOperator evolve_second_order(const std::vector<ChainMode>& chain) {
  if (live_length(chain) < 3) {
    EvolvedOperator e = evolve_first_order(chain);
    e.order = Order::second;
    return e;
  }
  const LinearForm& u = chain[0].coeffs;
  const int s1 = chain[1].comm_sign, s2 = chain[2].comm_sign;
  const double t2 = chain[2].theta;
  const LinearForm h1 = hat(chain[1]);
  const LinearForm h2 = hat(chain[2]);
  LinearForm out;
  if (s1 > 0 && s2 > 0)
    out = u + commutator(u, h2.dagger()) * ((std::cos(t2) - 1.0) * h2 - std::sin(t2) * h1);
  else if (s1 > 0 && s2 < 0)
    out = u + commutator(h2, u) * ((std::cosh(t2) - 1.0) * h2.dagger() + std::sinh(t2) * h1);
  else if (s1 < 0 && s2 > 0)
    out = u + commutator(u, h2.dagger()) * ((std::cosh(t2) - 1.0) * h2 + std::sinh(t2) * h1.dagger());
  else
    out = u + commutator(h2, u) * ((std::cos(t2) - 1.0) * h2.dagger() - std::sin(t2) * h1.dagger());
  return {out, Order::second};
}

/// u + [u, S] without renormalization.
inline EvolvedOperator perturbation_baseline(const QuadraticForm& s, const LinearForm& u0) {
  return {u0 + commutator(u0, s), Order::perturbative};
}

/// exp of the adjoint action; columns are the evolved basis operators on stacked coefficients.
inline Eigen::MatrixXcd evolution_matrix(const QuadraticForm& s) {
  Eigen::MatrixXcd e = adjoint_matrix(s).exp();
  if (!e.allFinite()) throw std::runtime_error("matrix exponential produced non-finite entries");
  return e;
}

inline BogoliubovMap exact_bogoliubov(const QuadraticForm& s) {
  const Eigen::Index n = s.modes();
  Eigen::MatrixXcd e = evolution_matrix(s);
  BogoliubovMap m;
  m.A = e.topLeftCorner(n, n).transpose();
  m.B = e.bottomLeftCorner(n, n).transpose();
  return m;
}

/// max |A A^dag - B B^dag - I| and max |A B^T - B A^T|.
inline double symplectic_defect(const BogoliubovMap& m) {
  const Eigen::Index n = m.A.rows();
  Eigen::MatrixXcd d1 = m.A * m.A.adjoint() - m.B * m.B.adjoint() - Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd d2 = m.A * m.B.transpose() - m.B * m.A.transpose();
  return std::max(d1.cwiseAbs().maxCoeff(), d2.cwiseAbs().maxCoeff());
}

/// Heisenberg image of the linear form `target` under the map.
inline LinearForm apply(const BogoliubovMap& m, const LinearForm& target) {
  LinearForm out;
  out.ann = m.A.transpose() * target.ann + m.B.adjoint() * target.cre;
  out.cre = m.B.transpose() * target.ann + m.A.adjoint() * target.cre;
  return out;
}

inline double vacuum_covariance(const BogoliubovMap& m, const LinearForm& target, double phi) {
  return variance_form(apply(m, target)).at(phi);
}

/// Exact evolution of u0 under the action restricted to the first `count` orthonormal chain modes.
inline EvolvedOperator evolve_projected(const QuadraticForm& s, const std::vector<ChainMode>& ortho,
                                        std::size_t count, const LinearForm& u0, Order tag) {
  std::vector<LinearForm> hats = chain_hats(ortho);
  count = std::min(count, hats.size());
  QuadraticForm sn = project_onto(s, hats, count);
  Eigen::VectorXcd v = evolution_matrix(sn) * u0.stacked();
  return {LinearForm::from_stacked(v), tag};
}

}  // namespace vacsim

#endif  // VACSIM_EVOLUTION_HPP
