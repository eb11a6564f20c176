#ifndef VACSIM_DISPERSION_HPP
#define VACSIM_DISPERSION_HPP

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "constants.hpp"

namespace vacsim {

/** \brief Even refractive index n(omega) of the crystal.
 *
 *  Below the blend window: n = sum_k c_k nu^(2k) with nu in cyclic THz.
 *  Above it: n^2 = A + B lambda^2 / (lambda^2 - C2), lambda in micrometres.
 *  Inside: cubic Hermite join matching value and slope of both branches. */
struct RefractiveIndexModel {
  std::vector<double> mir_coefficients{2.55, 0.04 / 3600.0};
  double mir_valid_hi_thz = 60.0;
  double sellmeier_a = 4.27;
  double sellmeier_b = 3.01;
  double sellmeier_c2 = 0.142;
  double nir_valid_lo_thz = 90.0;
  double nir_valid_hi_thz = 550.0;
  std::optional<double> constant;

  static RefractiveIndexModel uniform(double n) {
    RefractiveIndexModel m;
    m.constant = n;
    return m;
  }

  void validate() const {
    if (constant) {
      if (!(*constant >= 1.0)) throw std::invalid_argument("refractive index must be >= 1");
      return;
    }
    if (mir_coefficients.empty()) throw std::invalid_argument("dispersion: empty MIR coefficient list");
    if (!(0.0 < mir_valid_hi_thz && mir_valid_hi_thz < nir_valid_lo_thz && nir_valid_lo_thz < nir_valid_hi_thz))
      throw std::invalid_argument("dispersion: validity ranges must satisfy 0 < mir_hi < nir_lo < nir_hi");
    if (!(nir_lo_lambda_sq() > sellmeier_c2))
      throw std::invalid_argument("dispersion: Sellmeier pole inside the NIR validity range");
  }

  /// Largest |omega| (rad/s) accepted.
  double max_angular() const { return constant ? INFINITY : angular_from_thz(nir_valid_hi_thz); }

  double mir_branch(double nu) const {
    double n = 0.0, p = 1.0;
    for (double c : mir_coefficients) {
      n += c * p;
      p *= nu * nu;
    }
    return n;
  }
  double mir_slope(double nu) const {
    double d = 0.0, p = nu;  // d/dnu of nu^(2k) = 2k nu^(2k-1)
    for (std::size_t k = 1; k < mir_coefficients.size(); ++k) {
      d += 2.0 * static_cast<double>(k) * mir_coefficients[k] * p;
      p *= nu * nu;
    }
    return d;
  }
  double nir_branch(double nu) const {
    const double lam = codata.c / (nu * thz) * 1e6;  // micrometres
    const double l2 = lam * lam;
    return std::sqrt(sellmeier_a + sellmeier_b * l2 / (l2 - sellmeier_c2));
  }
  double nir_slope(double nu) const {
    const double h = 1e-4 * nu;
    return (nir_branch(nu + h) - nir_branch(nu - h)) / (2.0 * h);
  }

  /// n at cyclic frequency |nu| in THz.
  double at_thz(double nu) const {
    nu = std::abs(nu);
    if (constant) return *constant;
    if (nu > nir_valid_hi_thz) {
      std::ostringstream os;
      os << "refractive_index: |omega|/2pi = " << nu << " THz exceeds the validity bound " << nir_valid_hi_thz
         << " THz";
      throw std::out_of_range(os.str());
    }
    if (nu <= mir_valid_hi_thz) return mir_branch(nu);
    if (nu >= nir_valid_lo_thz) return nir_branch(nu);
    const double a = mir_valid_hi_thz, b = nir_valid_lo_thz, h = b - a;
    const double t = (nu - a) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * mir_branch(a) + (t3 - 2 * t2 + t) * h * mir_slope(a) +
           (-2 * t3 + 3 * t2) * nir_branch(b) + (t3 - t2) * h * nir_slope(b);
  }

  double operator()(double omega) const { return at_thz(thz_from_angular(omega)); }

  /// 0 below the blend window, 1 inside it, 2 above it.
  int branch_at_thz(double nu) const {
    nu = std::abs(nu);
    if (constant || nu <= mir_valid_hi_thz) return 0;
    return nu >= nir_valid_lo_thz ? 2 : 1;
  }

  bool operator==(const RefractiveIndexModel&) const = default;

 private:
  double nir_lo_lambda_sq() const {
    const double lam = codata.c / (nir_valid_hi_thz * thz) * 1e6;
    return lam * lam;
  }
};

inline double refractive_index(const RefractiveIndexModel& m, double omega) { return m(omega); }

/// Schema:
/// { "mir": {"coefficients": [c0, c1, ...], "valid_over_2pi_thz": [0, hi]},
///   "nir": {"sellmeier": [A, B, C2_um2], "valid_over_2pi_thz": [lo, hi]} }
/// or { "constant": n }.
inline RefractiveIndexModel dispersion_from_json(const nlohmann::json& j) {
  RefractiveIndexModel m;
  if (j.contains("constant")) {
    m = RefractiveIndexModel::uniform(j.at("constant").get<double>());
    m.validate();
    return m;
  }
  const auto& mir = j.at("mir");
  m.mir_coefficients = mir.at("coefficients").get<std::vector<double>>();
  auto mv = mir.at("valid_over_2pi_thz").get<std::vector<double>>();
  if (mv.size() != 2 || mv[0] != 0.0) throw std::invalid_argument("dispersion: MIR validity must be [0, hi]");
  m.mir_valid_hi_thz = mv[1];
  const auto& nir = j.at("nir");
  auto s = nir.at("sellmeier").get<std::vector<double>>();
  if (s.size() != 3) throw std::invalid_argument("dispersion: Sellmeier needs [A, B, C2]");
  m.sellmeier_a = s[0];
  m.sellmeier_b = s[1];
  m.sellmeier_c2 = s[2];
  auto nv = nir.at("valid_over_2pi_thz").get<std::vector<double>>();
  if (nv.size() != 2) throw std::invalid_argument("dispersion: NIR validity must be [lo, hi]");
  m.nir_valid_lo_thz = nv[0];
  m.nir_valid_hi_thz = nv[1];
  m.validate();
  return m;
}

inline nlohmann::json dispersion_to_json(const RefractiveIndexModel& m) {
  if (m.constant) return {{"constant", *m.constant}};
  return {{"mir", {{"coefficients", m.mir_coefficients}, {"valid_over_2pi_thz", {0.0, m.mir_valid_hi_thz}}}},
          {"nir",
           {{"sellmeier", {m.sellmeier_a, m.sellmeier_b, m.sellmeier_c2}},
            {"valid_over_2pi_thz", {m.nir_valid_lo_thz, m.nir_valid_hi_thz}}}}};
}

inline RefractiveIndexModel load_dispersion(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dispersion file: " + path);
  return dispersion_from_json(nlohmann::json::parse(in));
}

}  // namespace vacsim

#endif  // VACSIM_DISPERSION_HPP
