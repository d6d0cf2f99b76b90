#pragma once

#include <complex>

#include <Eigen/Dense>

namespace slmulti {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

}  // namespace slmulti
