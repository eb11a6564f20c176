#ifndef VACSIM_EO_GRID_HPP
#define VACSIM_EO_GRID_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eo_model.hpp"
#include "operator_forms.hpp"

namespace vacsim {

enum class Band { mir, nir };

/** \brief Positive-frequency bins; a bin operator is (1/sqrt(width)) int_bin a_omega domega. */
struct DiscreteGrid {
  std::vector<double> centers;  // rad/s, sorted within each band
  std::vector<double> widths;   // rad/s
  std::vector<Band> band;
  Eigen::Index filter_bin = -1;  // NIR bin that coincides with the filter band

  Eigen::Index size() const { return static_cast<Eigen::Index>(centers.size()); }
  Eigen::Index mir_count() const {
    Eigen::Index n = 0;
    for (Band b : band) n += b == Band::mir ? 1 : 0;
    return n;
  }
};

inline void append_bins(DiscreteGrid& g, double lo, double hi, std::size_t count, Band b) {
  const double h = (hi - lo) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    g.centers.push_back(lo + (static_cast<double>(i) + 0.5) * h);
    g.widths.push_back(h);
    g.band.push_back(b);
  }
}

/// MIR bins over (0, Lambda]; NIR bins over [omega_tilde - span, omega_tilde + span] with the filter band as one bin.
inline DiscreteGrid make_grid(const EOSetup& s, const FilterParams& f, std::size_t mir_bins = 64,
                              std::size_t nir_bins = 64, double nir_half_span_sigma = 5.0) {
  s.validate(f);
  if (mir_bins < 1 || nir_bins < 2) throw std::invalid_argument("make_grid: too few bins");
  const double L = s.partition.lambda_cut;
  double lo = f.omega_tilde - nir_half_span_sigma * s.probe.sigma_p;
  double hi = f.omega_tilde + nir_half_span_sigma * s.probe.sigma_p;
  lo = std::max(lo, L);
  hi = std::min(hi, 0.999999 * s.crystal.dispersion.max_angular());
  if (!(lo < f.lo() && f.hi() < hi)) throw std::invalid_argument("make_grid: NIR span does not contain the filter band");
  DiscreteGrid g;
  append_bins(g, 0.0, L, mir_bins, Band::mir);
  const std::size_t left =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(nir_bins * (f.lo() - lo) / (hi - lo))));
  const std::size_t right = std::max<std::size_t>(1, nir_bins - left);
  append_bins(g, lo, f.lo(), left, Band::nir);
  g.filter_bin = g.size();
  g.centers.push_back(f.omega_tilde);
  g.widths.push_back(f.delta_omega);
  g.band.push_back(Band::nir);
  append_bins(g, f.hi(), hi, right, Band::nir);
  return g;
}

/** \brief P = S(Omega_m, omega_n) sqrt(d_m d_n) and Q = S(-Omega_m, omega_n) sqrt(d_m d_n), MIR x NIR. */
struct KernelMatrix {
  Eigen::MatrixXcd P;
  Eigen::MatrixXcd Q;
  std::vector<Eigen::Index> mir_index;
  std::vector<Eigen::Index> nir_index;
};

inline KernelMatrix discretize_action(const EOSetup& s, const DiscreteGrid& g) {
  EOKernel k(s);
  const double L = s.partition.lambda_cut;
  KernelMatrix km;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double c = g.centers[i], h = g.widths[i];
    if (g.band[i] == Band::mir) {
      if (!(c - 0.5 * h >= -1e-9 * L && c + 0.5 * h <= L * (1.0 + 1e-12)))
        throw std::invalid_argument("discretize_action: MIR bin crosses the partition");
      km.mir_index.push_back(i);
    } else {
      if (!(c - 0.5 * h >= L)) throw std::invalid_argument("discretize_action: NIR bin crosses the partition");
      km.nir_index.push_back(i);
    }
  }
  const auto M = static_cast<Eigen::Index>(km.mir_index.size());
  const auto N = static_cast<Eigen::Index>(km.nir_index.size());
  km.P.resize(M, N);
  km.Q.resize(M, N);
  for (Eigen::Index m = 0; m < M; ++m) {
    const Eigen::Index im = km.mir_index[m];
    for (Eigen::Index n = 0; n < N; ++n) {
      const Eigen::Index in = km.nir_index[n];
      const double r = std::sqrt(g.widths[im] * g.widths[in]);
      km.P(m, n) = r * k(g.centers[im], g.centers[in]);
      km.Q(m, n) = r * k(-g.centers[im], g.centers[in]);
    }
  }
  return km;
}

/// S = sum P c_n^dag b_m + Q b_m^dag c_n^dag - Q^* b_m c_n - P^* b_m^dag c_n over grid modes.
inline QuadraticForm to_quadratic(const KernelMatrix& km, Eigen::Index modes) {
  QuadraticForm q(modes);
  for (std::size_t m = 0; m < km.mir_index.size(); ++m) {
    const Eigen::Index im = km.mir_index[m];
    for (std::size_t n = 0; n < km.nir_index.size(); ++n) {
      const Eigen::Index in = km.nir_index[n];
      const cplx P = km.P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      const cplx Q = km.Q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      q.ad_a(in, im) += P;
      q.add_adad(im, in, Q);
      q.ad_a(im, in) += -std::conj(P);
      q.add_aa(im, in, -std::conj(Q));
    }
  }
  return q;
}

}  // namespace vacsim

#endif  // VACSIM_EO_GRID_HPP
