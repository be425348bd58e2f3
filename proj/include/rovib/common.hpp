#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rovib {

using cxd = std::complex<double>;

// Unit conversions. Internal arithmetic is in Hartree atomic units; all
// spectroscopic I/O is in cm^-1 through this single boundary.
namespace units {
inline constexpr double hartree_per_cm1 = 4.556335e-6;
inline constexpr double me_per_u = 1822.888486209;   // electron masses per amu
inline constexpr double fs_per_au = 0.024188843265;  // time
inline double cm1_to_au(double e_cm1) { return e_cm1 * hartree_per_cm1; }
inline double au_to_cm1(double e_au) { return e_au / hartree_per_cm1; }
}  // namespace units

// Thrown when input data or requested parameters violate a documented
// contract (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a numerical consistency check fails, e.g. an anti-Hermitian
// residue above tolerance (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

enum class Exec { Serial, Parallel };

// Deterministic uniform double in [0,1) from raw 64-bit state.
inline double canonical_u01(std::uint64_t r) {
  return static_cast<double>(r >> 11) * 0x1.0p-53;
}

}  // namespace rovib
