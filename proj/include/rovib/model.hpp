#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "rovib/common.hpp"

namespace rovib {

struct Atom {
  std::string symbol;
  double mass_u = 0.0;                 // unified atomic mass units
  Eigen::Vector3d re_bohr;             // equilibrium position, molecular frame
};

// Molecular input data: geometry, normal modes and the reduced anharmonic
// force field (cm^-1 constants multiplying dimensionless normal coordinates).
struct MoleculeModel {
  std::string name;
  std::array<char, 3> axes{'a', 'b', 'c'};
  std::vector<Atom> atoms;
  std::vector<double> omega_cm1;       // harmonic frequencies, one per mode
  Eigen::MatrixXd L;                   // (3*n_atoms) x n_modes, rows atom-major (a,b,c)
  std::map<std::vector<int>, double> cubic_cm1;    // sorted 0-based mode indices
  std::map<std::vector<int>, double> quartic_cm1;
  int vmax = 0;

  int n_atoms() const { return static_cast<int>(atoms.size()); }
  int n_modes() const { return static_cast<int>(omega_cm1.size()); }
  double mass_au(int n) const { return atoms[n].mass_u * units::me_per_u; }
};

// Frame quantities derived from the model: equilibrium inertia tensor,
// rotational constants, Coriolis zeta matrices, a_k matrices and the
// polynomial coefficient tables of the mu-tensor expansion.
struct DerivedFrame {
  Eigen::Matrix3d Ie;                              // a.u., diagonal
  double A_cm1 = 0, B_cm1 = 0, C_cm1 = 0;          // hbar^2/(2 I_aa) etc.
  std::vector<Eigen::MatrixXd> zeta;               // [axis](k,l), antisymmetric
  std::vector<Eigen::Matrix3d> a_k;                // one symmetric 3x3 per mode
  // mu_l expansion in dimensionless coordinates: for each order l = 0..4 a
  // table of (sorted mode multi-index -> 3x3 coefficient matrix, a.u.)
  std::array<std::map<std::vector<int>, Eigen::Matrix3d>, 5> mu;

  double rot_const_cm1(int axis) const {
    return axis == 0 ? A_cm1 : (axis == 1 ? B_cm1 : C_cm1);
  }
};

MoleculeModel load_model(const std::string& path);
MoleculeModel parse_model(const std::string& json_text);
void validate_model(const MoleculeModel& m);

// Individual frame computations (each checks its own contract).
Eigen::Matrix3d equilibrium_inertia(const MoleculeModel& m);
std::vector<Eigen::MatrixXd> coriolis_coefficients(const MoleculeModel& m);
std::vector<Eigen::Matrix3d> a_matrices(const MoleculeModel& m);

DerivedFrame derive_frame(const MoleculeModel& m);

// mu_l coefficient table for one order (0..4); entries carry the c_l factor.
std::map<std::vector<int>, Eigen::Matrix3d> mu_expansion(const MoleculeModel& m,
                                                         const DerivedFrame& f, int order);

// Instantaneous inertia tensor at mass-scaled displacement Q (test oracle support).
Eigen::Matrix3d inertia_at(const MoleculeModel& m, const Eigen::VectorXd& Q);
Eigen::Matrix3d iprime_at(const MoleculeModel& m, const DerivedFrame& f,
                          const Eigen::VectorXd& Q);

}  // namespace rovib
