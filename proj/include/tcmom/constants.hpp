#pragma once

namespace tcmom {

// Free-space constants. Lengths are millimeters and frequencies GHz
// throughout the geometry layer; c is exact in those units.
constexpr double kSpeedOfLight_mmGHz = 299.792458;
constexpr double kEta0_ohm = 376.730313668;

constexpr double kPi = 3.14159265358979323846;

// mm -> m, applied once at assembly entry so the operator lives in SI.
constexpr double kMmToM = 1e-3;

inline double wavenumber_per_mm(double freq_GHz) {
  return 2.0 * kPi * freq_GHz / kSpeedOfLight_mmGHz;
}

inline double wavenumber_per_m(double freq_GHz) {
  return wavenumber_per_mm(freq_GHz) / kMmToM;
}

}  // namespace tcmom
