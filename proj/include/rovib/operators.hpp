#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rovib/common.hpp"
#include "rovib/model.hpp"

namespace rovib {

// Single-mode operators in the dimensionless convention
// <v|q|v+1> = sqrt((v+1)/2), <v|p|v+1> = -i sqrt((v+1)/2).
// Every product is evaluated in an oversized space and truncated afterwards,
// so matrix elements <v|.|v'> are exact for v,v' < d.
Eigen::MatrixXd q_power_matrix(int d, int ell);
Eigen::MatrixXcd momentum_matrix(int d);
Eigen::MatrixXcd momentum_squared_matrix(int d);

// Exact matrix of an ordered product of single-mode factors, e.g. "qp" or
// "pqq" (leftmost factor acts last, as written in operator products).
Eigen::MatrixXcd chain_matrix(const std::string& chain, int d);

// Molecular-frame angular momentum in the |J,K> basis (K = -J..J ascending,
// units of hbar). The frame components obey [Ja,Jb] = -i Jc and cyclic;
// J+ = Ja + i Jb lowers K.
struct AngularMomentumSet {
  int J = 0;
  Eigen::MatrixXcd Ja, Jb, Jc;
};

AngularMomentumSet angular_momentum(int J);

// Rigid-rotor level with its asymmetric-top label J_{Ka Kc}.
struct RotorLevel {
  double energy_cm1 = 0;
  int Ka = 0, Kc = 0;
  Eigen::VectorXcd vec;  // in the |J,K> basis
};

// Eigenpairs of A Ja^2 + B Jb^2 + C Jc^2 sorted by energy, labeled in the
// sequence J_{0,J}, J_{1,J}, J_{1,J-1}, ..., J_{J,0}.
std::vector<RotorLevel> asymmetric_top_solve(const DerivedFrame& f, int J);

}  // namespace rovib
