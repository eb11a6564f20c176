#ifndef VACSIM_CONSTANTS_HPP
#define VACSIM_CONSTANTS_HPP

#include <numbers>

namespace vacsim {

/// CODATA 2018 values in SI units.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;  // J s
  double c = 299792458.0;         // m/s
  double eps0 = 8.8541878128e-12; // F/m
};

inline constexpr PhysicalConstants codata{};

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double thz = 1e12;

/// Cyclic frequency in THz to angular frequency in rad/s.
constexpr double angular_from_thz(double nu_thz) { return two_pi * nu_thz * thz; }
/// Angular frequency in rad/s to cyclic THz.
constexpr double thz_from_angular(double omega) { return omega / (two_pi * thz); }

}  // namespace vacsim

#endif  // VACSIM_CONSTANTS_HPP
