#pragma once

#include <Eigen/Dense>

namespace dna {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Everything outside the templated kernels runs in double precision.
using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Index = Eigen::Index;

}  // namespace dna
