// Scalar, vector and matrix aliases shared by every module.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>

namespace ssblab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

inline constexpr cplx kI{0.0, 1.0};

}  // namespace ssblab
