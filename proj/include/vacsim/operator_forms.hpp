#ifndef VACSIM_OPERATOR_FORMS_HPP
#define VACSIM_OPERATOR_FORMS_HPP

// Linear and normally ordered quadratic forms in a finite set of bosonic
// modes a_1..a_N, with the commutator calculus needed to decompose and
// parallelize them. C-number terms produced by reordering are dropped:
// only commutators of these forms are ever used.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace vacsim {

using cplx = std::complex<double>;

/** \brief X = sum_i ann_i a_i + cre_i a_i^dagger. */
struct LinearForm {
  Eigen::VectorXcd ann;
  Eigen::VectorXcd cre;

  LinearForm() = default;
  explicit LinearForm(Eigen::Index n) : ann(Eigen::VectorXcd::Zero(n)), cre(Eigen::VectorXcd::Zero(n)) {}
  LinearForm(Eigen::VectorXcd a, Eigen::VectorXcd c) : ann(std::move(a)), cre(std::move(c)) {
    if (ann.size() != cre.size()) throw std::invalid_argument("LinearForm: block sizes differ");
  }

  Eigen::Index modes() const { return ann.size(); }

  static LinearForm annihilator(Eigen::Index n, Eigen::Index i) {
    LinearForm x(n);
    x.ann(i) = 1.0;
    return x;
  }
  static LinearForm creator(Eigen::Index n, Eigen::Index i) {
    LinearForm x(n);
    x.cre(i) = 1.0;
    return x;
  }

  LinearForm dagger() const { return {cre.conjugate(), ann.conjugate()}; }

  /// Stacked coefficient vector (ann; cre).
  Eigen::VectorXcd stacked() const {
    Eigen::VectorXcd v(2 * modes());
    v << ann, cre;
    return v;
  }
  static LinearForm from_stacked(const Eigen::VectorXcd& v) {
    const Eigen::Index n = v.size() / 2;
    return {v.head(n), v.tail(n)};
  }

  double norm() const { return std::sqrt(ann.squaredNorm() + cre.squaredNorm()); }

  LinearForm& operator+=(const LinearForm& o) {
    ann += o.ann;
    cre += o.cre;
    return *this;
  }
  LinearForm& operator-=(const LinearForm& o) {
    ann -= o.ann;
    cre -= o.cre;
    return *this;
  }
  LinearForm& operator*=(cplx s) {
    ann *= s;
    cre *= s;
    return *this;
  }
};

inline LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
inline LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
inline LinearForm operator*(cplx s, LinearForm a) { return a *= s; }
inline LinearForm operator*(LinearForm a, cplx s) { return a *= s; }

/// [X, Y] (a c-number).
inline cplx commutator(const LinearForm& x, const LinearForm& y) {
  return (x.ann.array() * y.cre.array()).sum() - (x.cre.array() * y.ann.array()).sum();
}

/// [X, X^dagger]; +1 for a normalized annihilator, -1 for a normalized creator.
inline double signed_norm(const LinearForm& x) { return x.ann.squaredNorm() - x.cre.squaredNorm(); }

/** \brief Q = sum_{i<=j} aa_ij a_i a_j + sum_ij ad_a_ij a_i^dagger a_j + sum_{i<=j} adad_ij a_i^dagger a_j^dagger.
 *  Strictly lower triangles of aa and adad stay zero. */
struct QuadraticForm {
  Eigen::MatrixXcd aa;
  Eigen::MatrixXcd ad_a;
  Eigen::MatrixXcd adad;

  QuadraticForm() = default;
  explicit QuadraticForm(Eigen::Index n)
      : aa(Eigen::MatrixXcd::Zero(n, n)), ad_a(Eigen::MatrixXcd::Zero(n, n)), adad(Eigen::MatrixXcd::Zero(n, n)) {}

  Eigen::Index modes() const { return ad_a.rows(); }

  void add_aa(Eigen::Index i, Eigen::Index j, cplx c) {
    if (i > j) std::swap(i, j);
    aa(i, j) += c;
  }
  void add_adad(Eigen::Index i, Eigen::Index j, cplx c) {
    if (i > j) std::swap(i, j);
    adad(i, j) += c;
  }

  /// aa + aa^T, i.e. the symmetric kernel with doubled diagonal.
  Eigen::MatrixXcd aa_sym() const { return aa + aa.transpose(); }
  Eigen::MatrixXcd adad_sym() const { return adad + adad.transpose(); }

  QuadraticForm dagger() const {
    QuadraticForm q(modes());
    q.aa = adad.conjugate();
    q.adad = aa.conjugate();
    q.ad_a = ad_a.adjoint();
    return q;
  }

  double max_abs() const {
    return std::max({aa.cwiseAbs().maxCoeff(), ad_a.cwiseAbs().maxCoeff(), adad.cwiseAbs().maxCoeff()});
  }

  QuadraticForm& operator+=(const QuadraticForm& o) {
    aa += o.aa;
    ad_a += o.ad_a;
    adad += o.adad;
    return *this;
  }
  QuadraticForm& operator-=(const QuadraticForm& o) {
    aa -= o.aa;
    ad_a -= o.ad_a;
    adad -= o.adad;
    return *this;
  }
  QuadraticForm& operator*=(cplx s) {
    aa *= s;
    ad_a *= s;
    adad *= s;
    return *this;
  }
};

inline QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
inline QuadraticForm operator-(QuadraticForm a, const QuadraticForm& b) { return a -= b; }
inline QuadraticForm operator*(cplx s, QuadraticForm a) { return a *= s; }

inline double max_abs_difference(const QuadraticForm& a, const QuadraticForm& b) { return (a - b).max_abs(); }

inline bool is_anti_hermitian(const QuadraticForm& q, double tol) {
  QuadraticForm s = q + q.dagger();
  return s.max_abs() <= tol;
}

/// [X, Q] as a linear form.
inline LinearForm commutator(const LinearForm& x, const QuadraticForm& q) {
  LinearForm r;
  r.ann = -q.aa_sym() * x.cre + q.ad_a.transpose() * x.ann;
  r.cre = -q.ad_a * x.cre + q.adad_sym() * x.ann;
  return r;
}

/// [Q, X] as a linear form.
inline LinearForm commutator(const QuadraticForm& q, const LinearForm& x) { return -1.0 * commutator(x, q); }

/// Normally ordered X Y with the c-number from reordering dropped.
inline QuadraticForm product(const LinearForm& x, const LinearForm& y) {
  const Eigen::Index n = x.modes();
  QuadraticForm q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      q.add_aa(i, j, x.ann(i) * y.ann(j));
      q.ad_a(j, i) += x.ann(i) * y.cre(j);  // a_i a_j^dagger -> a_j^dagger a_i
      q.ad_a(i, j) += x.cre(i) * y.ann(j);
      q.add_adad(i, j, x.cre(i) * y.cre(j));
    }
  }
  return q;
}

/// Matrix L with [X, Q] = L X on stacked coefficients (ann; cre).
inline Eigen::MatrixXcd adjoint_matrix(const QuadraticForm& q) {
  const Eigen::Index n = q.modes();
  Eigen::MatrixXcd L(2 * n, 2 * n);
  L.topLeftCorner(n, n) = q.ad_a.transpose();
  L.topRightCorner(n, n) = -q.aa_sym();
  L.bottomLeftCorner(n, n) = q.adad_sym();
  L.bottomRightCorner(n, n) = -q.ad_a;
  return L;
}

/// Throws unless [e_i, e_j^dagger] = delta_ij and [e_i, e_j] = 0 within tol.
inline void require_orthonormal(const std::vector<LinearForm>& basis, double tol = 1e-10) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      cplx cd = commutator(basis[i], basis[j].dagger());
      cplx cc = commutator(basis[i], basis[j]);
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(cd - want) > tol || std::abs(cc) > tol)
        throw std::invalid_argument("basis is not orthonormal under the commutator");
    }
  }
}

/// Coefficients (A_i, A'_i) with A = sum_i A_i e_i + A'_i e_i^dagger, A_i = [A, e_i^dagger], A'_i = [e_i, A].
inline LinearForm decompose_linear(const LinearForm& a, const std::vector<LinearForm>& basis) {
  require_orthonormal(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  LinearForm c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.ann(i) = commutator(a, basis[i].dagger());
    c.cre(i) = commutator(basis[i], a);
  }
  return c;
}

/// Inverse of decompose_linear.
inline LinearForm reconstruct_linear(const LinearForm& coeffs, const std::vector<LinearForm>& basis) {
  LinearForm x(basis.front().modes());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    x += coeffs.ann(k) * basis[i];
    x += coeffs.cre(k) * basis[i].dagger();
  }
  return x;
}

/// Coefficients of B in an orthonormal basis {e_i}:
/// B_ij = [[B, e_i^dagger], e_j^dagger]/(1+delta_ij), B'_ij = [[e_i, B], e_j^dagger], B''_ij = [e_j, [e_i, B]]/(1+delta_ij).
inline QuadraticForm decompose_quadratic(const QuadraticForm& b, const std::vector<LinearForm>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  QuadraticForm c(n);
  std::vector<LinearForm> b_edag, ei_b;
  for (const auto& e : basis) {
    b_edag.push_back(commutator(b, e.dagger()));
    ei_b.push_back(commutator(e, b));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double sym = i == j ? 0.5 : 1.0;
      if (i <= j) {
        c.aa(i, j) = sym * commutator(b_edag[i], basis[j].dagger());
        c.adad(i, j) = sym * commutator(basis[j], ei_b[i]);
      }
      c.ad_a(i, j) = commutator(ei_b[i], basis[j].dagger());
    }
  }
  return c;
}

/// The part of B acting on the pair (e_k, e_k2), k <= k2, written in the original modes.
inline QuadraticForm pair_component(const QuadraticForm& b, const std::vector<LinearForm>& basis, std::size_t k,
                                    std::size_t k2) {
  if (k > k2) std::swap(k, k2);
  const LinearForm& e1 = basis[k];
  const LinearForm& e2 = basis[k2];
  LinearForm b_e1dag = commutator(b, e1.dagger());
  LinearForm e1_b = commutator(e1, b);
  LinearForm e2_b = commutator(e2, b);
  const double sym = k == k2 ? 0.5 : 1.0;
  cplx c_aa = sym * commutator(b_e1dag, e2.dagger());
  cplx c_ad_a = commutator(e1_b, e2.dagger());
  cplx c_adad = sym * commutator(e2, e1_b);
  QuadraticForm q = c_aa * product(e1, e2);
  q += c_ad_a * product(e1.dagger(), e2);
  q += c_adad * product(e1.dagger(), e2.dagger());
  if (k != k2) {
    cplx c_ad_a_rev = commutator(e2_b, e1.dagger());
    q += c_ad_a_rev * product(e2.dagger(), e1);
  }
  return q;
}

/// Sum of pair components over all pairs m <= m' < count of the leading basis members.
inline QuadraticForm project_onto(const QuadraticForm& b, const std::vector<LinearForm>& basis, std::size_t count) {
  QuadraticForm q(b.modes());
  for (std::size_t m = 0; m < count; ++m)
    for (std::size_t m2 = m; m2 < count; ++m2) q += pair_component(b, basis, m, m2);
  return q;
}

inline std::vector<LinearForm> standard_basis(Eigen::Index n) {
  std::vector<LinearForm> basis;
  for (Eigen::Index i = 0; i < n; ++i) basis.push_back(LinearForm::annihilator(n, i));
  return basis;
}

/// Parallel part B_par_k = [B, a_k^dagger] a_k + a_k^dagger [a_k, B] minus the doubly counted diagonal terms.
inline std::pair<QuadraticForm, QuadraticForm> parallelize_quadratic(const QuadraticForm& b, Eigen::Index k) {
  const Eigen::Index n = b.modes();
  if (k < 0 || k >= n) throw std::out_of_range("parallelize_quadratic: mode index");
  LinearForm ak = LinearForm::annihilator(n, k);
  QuadraticForm par = product(commutator(b, ak.dagger()), ak);
  par += product(ak.dagger(), commutator(ak, b));
  par.aa(k, k) -= b.aa(k, k);
  par.ad_a(k, k) -= b.ad_a(k, k);
  par.adad(k, k) -= b.adad(k, k);
  return {par, b - par};
}

/// B_par_{kk'} in the original mode basis.
inline QuadraticForm parallelize_pair(const QuadraticForm& b, Eigen::Index k, Eigen::Index k2) {
  return pair_component(b, standard_basis(b.modes()), static_cast<std::size_t>(k), static_cast<std::size_t>(k2));
}

}  // namespace vacsim

#endif  // VACSIM_OPERATOR_FORMS_HPP
