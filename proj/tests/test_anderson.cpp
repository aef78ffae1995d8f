#include <gtest/gtest.h>

#include "dna/extrapolate.hpp"
#include "test_util.hpp"

namespace dna {
namespace {

using test::gaussian_matrix;
using test::gaussian_vector;

// Phi(x) = Mx + b with ||M|| = 0.9.
struct Affine {
  Matrix M;
  Vector b;
  Affine(Index n, std::uint64_t seed) : b(gaussian_vector(n, seed + 1)) {
    Matrix G = gaussian_matrix(n, n, seed);
    Eigen::JacobiSVD<Matrix> svd(G);
    M = 0.9 * G / svd.singularValues()(0);
  }
  Vector operator()(const Vector& x) const { return M * x + b; }
};

TEST(Anderson, FullDepthConvergesOnAffineContraction) {
  Affine phi(10, 1);
  const auto run = anderson_iterate<double>(phi, Vector(Vector::Zero(10)), 10, 12, 1e-8);
  ASSERT_LE(run.iterates.size(), 13u);
  EXPECT_LE(run.residual_norms.back(), 1e-8);
  const Vector& x = run.iterates.back();
  EXPECT_LE((phi(x) - x).norm(), 1e-8);
}

TEST(Anderson, DepthZeroIsPicardIteration) {
  Affine phi(10, 2);
  const auto run = anderson_iterate<double>(phi, Vector(Vector::Ones(10)), 0, 25);
  Vector x = Vector::Ones(10);
  ASSERT_EQ(run.iterates.size(), 26u);
  for (std::size_t k = 0; k < run.iterates.size(); ++k) {
    EXPECT_TRUE((run.iterates[k].array() == x.array()).all()) << "k=" << k;
    x = phi(x);
  }
}

TEST(Anderson, StepMatchesBorderedNormalEquations) {
  const Matrix F = gaussian_matrix(12, 4, 3);
  const Matrix G = gaussian_matrix(12, 4, 4);
  // min ||Fc|| s.t. 1'c = 1:  [F'F 1; 1' 0][c; nu] = [0; 1].
  Matrix K = Matrix::Zero(5, 5);
  K.topLeftCorner(4, 4) = F.transpose() * F;
  K.block(0, 4, 4, 1).setOnes();
  K.block(4, 0, 1, 4).setOnes();
  Vector rhs = Vector::Zero(5);
  rhs(4) = 1;
  const Vector c = K.inverse() * rhs;
  const auto step = anderson_step<double>(G, F);
  EXPECT_LE((step.coefficients - c.head(4)).norm(), 1e-10);
  EXPECT_LE((step.next - G * c.head(4)).norm(), 1e-10 * step.next.norm());
  EXPECT_FALSE(step.fallback);
}

TEST(Anderson, ZeroResidualsFallBackToPlainStep) {
  const Matrix G = gaussian_matrix(5, 3, 5);
  const auto step = anderson_step<double>(G, Matrix(Matrix::Zero(5, 3)));
  EXPECT_TRUE(step.fallback);
  EXPECT_EQ(step.next, G.col(2));
}

TEST(Anderson, DependentResidualsStayFinite) {
  Matrix F = gaussian_matrix(6, 3, 6);
  F.col(1) = F.col(0);
  const auto step = anderson_step<double>(gaussian_matrix(6, 3, 7), F);
  EXPECT_TRUE(step.next.allFinite());
  EXPECT_NEAR(step.coefficients.sum(), 1.0, 1e-12);
}

TEST(Anderson, RejectsBadShapes) {
  EXPECT_THROW(anderson_step<double>(Matrix(3, 2), Matrix(3, 3)), ArgumentError);
  Affine phi(3, 8);
  EXPECT_THROW(anderson_iterate<double>(phi, Vector(Vector::Zero(3)), -1, 5), ArgumentError);
}

}  // namespace
}  // namespace dna
