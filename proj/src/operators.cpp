#include "rovib/operators.hpp"

#include <cmath>

namespace rovib {

namespace {
constexpr int kOversize = 4;  // largest operator power appearing in H

Eigen::MatrixXcd ladder_q(int d) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(d, d);
  for (int v = 0; v + 1 < d; ++v) {
    const double x = std::sqrt(0.5 * (v + 1));
    q(v, v + 1) = x;
    q(v + 1, v) = x;
  }
  return q;
}

Eigen::MatrixXcd ladder_p(int d) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
  for (int v = 0; v + 1 < d; ++v) {
    const double x = std::sqrt(0.5 * (v + 1));
    p(v, v + 1) = cxd(0, -x);
    p(v + 1, v) = cxd(0, +x);
  }
  return p;
}
}  // namespace

Eigen::MatrixXcd chain_matrix(const std::string& chain, int d) {
  if (d < 1) throw ValidationError("operator dimension must be >= 1");
  const int D = d + kOversize;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(D, D);
  const Eigen::MatrixXcd q = ladder_q(D);
  const Eigen::MatrixXcd p = ladder_p(D);
  for (char c : chain) {
    if (c == 'q')
      M = M * q;
    else if (c == 'p')
      M = M * p;
    else
      throw ValidationError(std::string("unknown operator factor '") + c + "'");
  }
  return M.topLeftCorner(d, d);
}

Eigen::MatrixXd q_power_matrix(int d, int ell) {
  if (ell < 1 || ell > 4) throw ValidationError("q power must be in 1..4");
  return chain_matrix(std::string(ell, 'q'), d).real();
}

Eigen::MatrixXcd momentum_matrix(int d) { return chain_matrix("p", d); }

Eigen::MatrixXcd momentum_squared_matrix(int d) { return chain_matrix("pp", d); }

AngularMomentumSet angular_momentum(int J) {
  if (J < 0) throw ValidationError("J must be non-negative");
  const int dim = 2 * J + 1;
  AngularMomentumSet s;
  s.J = J;
  Eigen::MatrixXcd Jp = Eigen::MatrixXcd::Zero(dim, dim);  // lowers K
  Eigen::MatrixXcd Jc = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) {
    const int K = m - J;
    Jc(m, m) = K;
    if (K - 1 >= -J) Jp(m - 1, m) = std::sqrt(double(J) * (J + 1) - double(K) * (K - 1));
  }
  const Eigen::MatrixXcd Jm = Jp.adjoint();
  s.Ja = 0.5 * (Jp + Jm);
  s.Jb = cxd(0, -0.5) * (Jp - Jm);
  s.Jc = Jc;
  return s;
}

std::vector<RotorLevel> asymmetric_top_solve(const DerivedFrame& f, int J) {
  const auto am = angular_momentum(J);
  Eigen::MatrixXcd H = f.A_cm1 * am.Ja * am.Ja + f.B_cm1 * am.Jb * am.Jb +
                       f.C_cm1 * am.Jc * am.Jc;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  std::vector<RotorLevel> out(2 * J + 1);
  for (int i = 0; i <= 2 * J; ++i) {
    out[i].energy_cm1 = es.eigenvalues()(i);
    out[i].Ka = (i + 1) / 2;
    out[i].Kc = J - i / 2;
    out[i].vec = es.eigenvectors().col(i);
  }
  return out;
}

}  // namespace rovib
