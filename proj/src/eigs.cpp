#include "rovib/eigs.hpp"

#include <cmath>
#include <random>

namespace rovib {

ExtremalEigs lanczos_lowest(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply, int dim,
    int n_lowest, double tol, int max_iter, std::uint64_t seed) {
  if (n_lowest < 1 || n_lowest > dim) throw ValidationError("bad eigenpair count");
  if (max_iter <= 0) max_iter = dim;  // a full Krylov space is exact

  std::mt19937_64 rng(seed);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i)
    v[i] = cxd(2.0 * canonical_u01(rng()) - 1.0, 2.0 * canonical_u01(rng()) - 1.0);
  v.normalize();

  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w(dim), scratch(dim);

  for (int it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    apply(v, w);
    const double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= a * v;
    if (!beta.empty()) w -= beta.back() * basis[basis.size() - 2];
    // full reorthogonalization keeps the Krylov basis clean
    for (const auto& b : basis) w -= b.dot(w) * b;
    for (const auto& b : basis) w -= b.dot(w) * b;
    const double bnorm = w.norm();
    const int k = static_cast<int>(alpha.size());
    const bool exhausted = bnorm < 1e-13 || k == dim || it == max_iter - 1;

    if (k >= n_lowest) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      bool converged = true;
      for (int j = 0; j < n_lowest && converged; ++j)
        if (std::abs(bnorm * es.eigenvectors()(k - 1, j)) > tol) converged = false;

      if (converged || exhausted) {
        ExtremalEigs out;
        out.values = es.eigenvalues().head(n_lowest);
        out.vectors.resize(dim, n_lowest);
        for (int j = 0; j < n_lowest; ++j) {
          Eigen::VectorXcd u = Eigen::VectorXcd::Zero(dim);
          for (int i = 0; i < k; ++i) u += es.eigenvectors()(i, j) * basis[i];
          out.vectors.col(j) = u.normalized();
        }
        bool verified = true;
        for (int j = 0; j < n_lowest && verified; ++j) {
          apply(out.vectors.col(j), scratch);
          if ((scratch - out.values[j] * out.vectors.col(j)).norm() > 10 * tol)
            verified = false;
        }
        if (verified || exhausted) {
          if (!verified)
            throw NumericalError("Lanczos exhausted the space without reaching tolerance");
          return out;
        }
      }
    }

    if (bnorm < 1e-13) {
      // invariant subspace found; restart against the current basis
      for (int i = 0; i < dim; ++i)
        w[i] = cxd(2.0 * canonical_u01(rng()) - 1.0, 2.0 * canonical_u01(rng()) - 1.0);
      for (const auto& b : basis) w -= b.dot(w) * b;
      for (const auto& b : basis) w -= b.dot(w) * b;
      beta.push_back(0.0);
      v = w.normalized();
    } else {
      beta.push_back(bnorm);
      v = w / bnorm;
    }
  }
  throw NumericalError("Lanczos failed to converge to residual tolerance");
}

}  // namespace rovib
