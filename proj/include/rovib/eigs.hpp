#pragma once

#include <Eigen/Dense>
#include <functional>

#include "rovib/common.hpp"

namespace rovib {

// Lowest eigenpairs of a Hermitian operator given by its action y = H x.
// Lanczos with full reorthogonalization; residuals ||H v - e v|| < tol.
struct ExtremalEigs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

ExtremalEigs lanczos_lowest(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
                            int dim, int n_lowest, double tol = 1e-10, int max_iter = 0,
                            std::uint64_t seed = 1234);

// Threshold above which subspace solves switch to the iterative path.
inline constexpr int kIterativeThreshold = 2000;

}  // namespace rovib
