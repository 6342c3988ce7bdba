#pragma once

#include <numbers>

// Unit conventions: frequencies are angular (rad/s) inside the library,
// fields are in gauss, times in seconds. Config files and reports use
// Hz / MHz / gauss with the unit spelled out in the key name.
namespace qmem::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double gauss_per_tesla = 1.0e4;

constexpr double hz_to_rad(double hz) { return two_pi * hz; }
constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / two_pi; }
constexpr double mhz_to_rad(double mhz) { return two_pi * mhz * 1.0e6; }
constexpr double rad_to_mhz(double rad_per_s) { return rad_per_s / (two_pi * 1.0e6); }

constexpr double tesla_to_gauss(double t) { return t * gauss_per_tesla; }
constexpr double gauss_to_tesla(double g) { return g / gauss_per_tesla; }

}  // namespace qmem::units
