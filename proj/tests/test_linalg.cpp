#include <gtest/gtest.h>

#include <limits>

#include "dna/linalg.hpp"
#include "test_util.hpp"

namespace dna {
namespace {

using test::gaussian_matrix;
using test::gaussian_vector;

TEST(SolveSquare, MatchesExplicitInverse) {
  const Matrix M = gaussian_matrix(6, 6, 1) + 6 * Matrix::Identity(6, 6);
  const Vector b = gaussian_vector(6, 2);
  const auto r = solve_square(M, b);
  const Vector expected = M.inverse() * b;
  EXPECT_LE((r.solution - expected).norm(), 1e-12 * expected.norm());
  EXPECT_EQ(r.effective_rank, 6);
  EXPECT_FALSE(r.used_pseudoinverse);
  EXPECT_LE(r.residual_norm, 1e-12 * b.norm());
}

TEST(SolveSquare, SingularGivesMinimumNormSolution) {
  Matrix M(2, 2);
  M << 1, 1, 1, 1;
  const auto r = solve_square(M, Vector(Vector::Constant(2, 2.0)));
  EXPECT_TRUE(r.used_pseudoinverse);
  EXPECT_EQ(r.effective_rank, 1);
  EXPECT_NEAR(r.solution(0), 1.0, 1e-14);
  EXPECT_NEAR(r.solution(1), 1.0, 1e-14);
  EXPECT_TRUE(std::isinf(r.condition_estimate));
}

TEST(SolveSquare, ZeroMatrixDoesNotThrow) {
  const auto r = solve_square(Matrix(Matrix::Zero(3, 3)), Vector(Vector::Ones(3)));
  EXPECT_EQ(r.effective_rank, 0);
  EXPECT_TRUE(r.solution.isZero());
}

TEST(SolveSquare, RejectsNonFiniteInput) {
  Matrix M = Matrix::Identity(2, 2);
  M(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_square(M, Vector(Vector::Ones(2))), ArgumentError);
  EXPECT_THROW(solve_square(Matrix(Matrix::Identity(2, 3)), Vector(Vector::Ones(2))), ArgumentError);
}

TEST(LeastSquares, MatchesNormalEquations) {
  const Matrix A = gaussian_matrix(20, 5, 3);
  const Vector b = gaussian_vector(20, 4);
  const Vector expected = (A.transpose() * A).inverse() * (A.transpose() * b);
  const auto r = least_squares(A, b);
  EXPECT_LE((r.solution - expected).norm(), 1e-10 * expected.norm());
  EXPECT_NEAR(r.residual_norm, (A * expected - b).norm(), 1e-10);
}

TEST(LeastSquares, EmptyColumnSet) {
  const auto r = least_squares(Matrix(4, 0), Vector(Vector::Ones(4)));
  EXPECT_EQ(r.solution.size(), 0);
  EXPECT_DOUBLE_EQ(r.residual_norm, 2.0);
}

TEST(PseudoInverse, PenroseConditions) {
  Matrix A = gaussian_matrix(7, 4, 5);
  A.col(3) = A.col(0) + A.col(1);  // rank 3
  const Matrix P = pseudo_inverse(A);
  EXPECT_LE((A * P * A - A).norm(), 1e-12 * A.norm());
  EXPECT_LE((P * A * P - P).norm(), 1e-12 * P.norm());
  EXPECT_LE((A * P - (A * P).transpose()).norm(), 1e-12);
  EXPECT_LE((P * A - (P * A).transpose()).norm(), 1e-12);
}

TEST(ConditionNumber, FullAndDeficientRank) {
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << 100, 10, 1;
  EXPECT_NEAR(condition_number(D), 100.0, 1e-12);
  D(2, 2) = 0;
  EXPECT_TRUE(std::isinf(condition_number(D)));
  EXPECT_TRUE(std::isinf(condition_number(Matrix(Matrix::Ones(2, 3)))));
}

TEST(Synthetic, GeometricSpectrum) {
  const Vector s = geometric_singular_values<double>(5, 1e4);
  EXPECT_DOUBLE_EQ(s(0), 1e4);
  EXPECT_DOUBLE_EQ(s(4), 1.0);
  for (Index i = 1; i < 5; ++i) EXPECT_NEAR(s(i - 1) / s(i), 10.0, 1e-12);
  EXPECT_THROW(geometric_singular_values<double>(0, 10.0), ArgumentError);
  EXPECT_THROW(geometric_singular_values<double>(3, 0.5), ArgumentError);
}

TEST(Synthetic, PrescribedSingularValuesAndDeterminism) {
  SyntheticSpec<double> spec{40, 12, geometric_singular_values<double>(12, 1e4), 99};
  const Matrix A = make_conditioned_matrix(spec);
  const Matrix B = make_conditioned_matrix(spec);
  EXPECT_TRUE((A.array() == B.array()).all());
  Eigen::JacobiSVD<Matrix> svd(A);
  for (Index i = 0; i < 12; ++i)
    EXPECT_NEAR(svd.singularValues()(i) / spec.singular_values(i), 1.0, 1e-10) << "i=" << i;
  EXPECT_NEAR(condition_number(A), 1e4, 1e-6);
  spec.seed = 100;
  EXPECT_FALSE((make_conditioned_matrix(spec).array() == A.array()).all());
}

TEST(Synthetic, ValidatesSpec) {
  SyntheticSpec<double> spec{4, 3, Vector(Vector::Ones(2)), 0};
  EXPECT_THROW(make_conditioned_matrix(spec), ArgumentError);
  spec.singular_values = Vector(3);
  spec.singular_values << 1, 2, 3;
  EXPECT_THROW(make_conditioned_matrix(spec), ArgumentError);
  spec.singular_values << 3, 2, 0;
  EXPECT_THROW(make_conditioned_matrix(spec), ArgumentError);
}

TEST(WeightedNorms, MatchExplicitInverse) {
  const Matrix A = test::spd(5, 30.0, 7);
  const Vector z = gaussian_vector(5, 8);
  const auto w = weighted_norms(z, A);
  EXPECT_NEAR(w.euclidean, z.norm(), 1e-14);
  EXPECT_NEAR(w.energy, std::sqrt(z.dot(A * z)), 1e-12);
  EXPECT_NEAR(w.dual, std::sqrt(z.dot(A.inverse() * z)), 1e-12);
  Matrix N = A;
  N(0, 1) += 1.0;
  EXPECT_THROW(weighted_norms(z, N), ArgumentError);
}

TEST(SymmetricPower, SquareRootAndInverseSquareRoot) {
  const Matrix A = test::spd(6, 100.0, 9);
  const Matrix H = symmetric_power(A, 0.5);
  const Matrix Hi = symmetric_power(A, -0.5);
  EXPECT_LE((H * H - A).norm(), 1e-12 * A.norm());
  EXPECT_LE((Hi * A * Hi - Matrix::Identity(6, 6)).norm(), 1e-12);
  EXPECT_LE((symmetric_power(A, 2.0) - A * A).norm(), 1e-10 * (A * A).norm());
}

TEST(IsSymmetric, Tolerance) {
  Matrix A = Matrix::Identity(3, 3);
  EXPECT_TRUE(is_symmetric(A));
  A(0, 2) = 1e-13;
  EXPECT_TRUE(is_symmetric(A));
  A(0, 2) = 1e-6;
  EXPECT_FALSE(is_symmetric(A));
  EXPECT_FALSE(is_symmetric(Matrix(Matrix::Ones(2, 3))));
}

}  // namespace
}  // namespace dna
