#include <gtest/gtest.h>

#include <cmath>

#include "povmkit/errors.hpp"
#include "povmkit/operator_core.hpp"
#include "test_random.hpp"

using namespace povmkit;
namespace tr = povmkit::testing;
using tr::Rng;

namespace {

Matrix diag(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v.cast<cplx>().asDiagonal();
}

Matrix plus_projector() {
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return m;
}

}  // namespace

TEST(IsHermitian, Examples) {
  EXPECT_TRUE(is_hermitian(identity(3), 1e-9));
  Matrix upper(2, 2);
  upper << 0.0, 1.0, 0.0, 0.0;
  EXPECT_FALSE(is_hermitian(upper, 1e-9));
  EXPECT_TRUE(is_hermitian(pauli_y(), 1e-9));
}

TEST(IsHermitian, NonSquareIsDimensionError) {
  EXPECT_THROW(is_hermitian(Matrix::Zero(2, 3), 1e-9), DimensionError);
}

TEST(EigHermitian, DegenerateDiagonal) {
  const auto s = eig_hermitian(diag({3, 3, 5}), 1e-8);
  ASSERT_EQ(s.eigenspaces.size(), 2u);
  EXPECT_DOUBLE_EQ(s.eigenspaces[0].value, 3.0);
  EXPECT_DOUBLE_EQ(s.eigenspaces[1].value, 5.0);
  EXPECT_LT((s.eigenspaces[0].projector - diag({1, 1, 0})).norm(), 1e-12);
  EXPECT_LT((s.eigenspaces[1].projector - diag({0, 0, 1})).norm(), 1e-12);
}

TEST(EigHermitian, PauliZ) {
  const auto s = eig_hermitian(pauli_z());
  ASSERT_EQ(s.eigenspaces.size(), 2u);
  EXPECT_DOUBLE_EQ(s.eigenspaces[0].value, -1.0);
  EXPECT_LT((s.eigenspaces[0].projector - diag({0, 1})).norm(), 1e-12);
  EXPECT_LT((s.eigenspaces[1].projector - diag({1, 0})).norm(), 1e-12);
}

TEST(EigHermitian, PauliXProjectorsSatisfyEigenEquation) {
  const auto s = eig_hermitian(pauli_x());
  ASSERT_EQ(s.eigenspaces.size(), 2u);
  Matrix minus(2, 2), plus(2, 2);
  minus << 0.5, -0.5, -0.5, 0.5;
  plus << 0.5, 0.5, 0.5, 0.5;
  EXPECT_NEAR(s.eigenspaces[0].value, -1.0, 1e-14);
  EXPECT_NEAR(s.eigenspaces[1].value, 1.0, 1e-14);
  EXPECT_LT((s.eigenspaces[0].projector - minus).norm(), 1e-12);
  EXPECT_LT((s.eigenspaces[1].projector - plus).norm(), 1e-12);
  // Oracle: H P_k = lambda_k P_k by direct multiplication.
  for (const auto& e : s.eigenspaces) {
    EXPECT_LT((pauli_x() * e.projector - e.value * e.projector).norm(), 1e-12);
  }
}

TEST(EigHermitian, NearDegeneracyIsGrouped) {
  const auto s = eig_hermitian(diag({2, 2 + 1e-12, 7}), 1e-8);
  ASSERT_EQ(s.eigenspaces.size(), 2u);
  EXPECT_NEAR(s.eigenspaces[0].projector.trace().real(), 2.0, 1e-12);
}

TEST(EigHermitian, RejectsNonHermitian) {
  Matrix upper(2, 2);
  upper << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(eig_hermitian(upper), ValidationError);
}

TEST(EigHermitian, RandomReconstructionAndProjectorAlgebra) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 1, 8);
    const Matrix h = tr::random_hermitian(d, rng);
    const auto s = eig_hermitian(h);
    EXPECT_LE(operator_norm(s.reconstruct() - h), 1e-9);
    EXPECT_LE(operator_norm(s.eigenvectors.adjoint() * s.eigenvectors - identity(d)), 1e-9);
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < s.eigenspaces.size(); ++j) {
      sum += s.eigenspaces[j].projector;
      for (std::size_t k = 0; k < s.eigenspaces.size(); ++k) {
        const Matrix expected = j == k ? s.eigenspaces[j].projector : Matrix::Zero(d, d);
        EXPECT_LE(operator_norm(s.eigenspaces[j].projector * s.eigenspaces[k].projector - expected), 1e-8);
      }
    }
    EXPECT_LE(operator_norm(sum - identity(d)), 1e-9);
    for (Eigen::Index k = 1; k < d; ++k) EXPECT_LE(s.eigenvalues(k - 1), s.eigenvalues(k));
  }
}

TEST(PositiveSemidefinite, Examples) {
  EXPECT_TRUE(is_positive_semidefinite(Matrix::Zero(2, 2)));
  EXPECT_FALSE(is_positive_semidefinite(diag({0.5, -0.01}), 1e-9));
  EXPECT_TRUE(is_positive_semidefinite(plus_projector()));
  Matrix upper(2, 2);
  upper << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(is_positive_semidefinite(upper), ValidationError);
}

TEST(Tensor, Examples) {
  EXPECT_EQ(tensor(identity(2), identity(2)), identity(4));
  EXPECT_EQ(tensor(diag({1, 0}), diag({1, 0})), diag({1, 0, 0, 0}));
  Matrix expected = Matrix::Zero(4, 4);
  expected.block(0, 0, 2, 2) = pauli_x();
  expected.block(2, 2, 2, 2) = -pauli_x();
  EXPECT_EQ(tensor(pauli_z(), pauli_x()), expected);
}

TEST(Tensor, CapacityLimit) {
  EXPECT_THROW(tensor(identity(8), identity(9)), CapacityError);
  EXPECT_NO_THROW(tensor(identity(8), identity(8)));
}

namespace {

// Small Gaussian integers, so every entry product is exact in double precision
// and any difference between groupings would be an indexing error.
Matrix gaussian_integers(Eigen::Index d, Rng& rng) {
  std::uniform_int_distribution<int> u(-8, 8);
  Matrix m(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = cplx(u(rng), u(rng));
  return m;
}

}  // namespace

TEST(Tensor, AssociativeExactlyAndMixedProduct) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix ia = gaussian_integers(2, rng), ib = gaussian_integers(3, rng), ic = gaussian_integers(2, rng);
    EXPECT_EQ(tensor(tensor(ia, ib), ic), tensor(ia, tensor(ib, ic)));
    const Matrix a = tr::ginibre(2, rng), b = tr::ginibre(3, rng), c = tr::ginibre(2, rng);
    EXPECT_LE((tensor(tensor(a, b), c) - tensor(a, tensor(b, c))).cwiseAbs().maxCoeff(), 1e-13);
    const Matrix a2 = tr::ginibre(2, rng), b2 = tr::ginibre(3, rng);
    EXPECT_LE((tensor(a, b) * tensor(a2, b2) - tensor(a * a2, b * b2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SqrtPsd, Examples) {
  EXPECT_LT((sqrt_psd(identity(3)) - identity(3)).norm(), 1e-14);
  EXPECT_LT((sqrt_psd(diag({4, 9})) - diag({2, 3})).norm(), 1e-14);
  EXPECT_LT((sqrt_psd(plus_projector()) - plus_projector()).norm(), 1e-14);
}

TEST(SqrtPsd, ClampsTinyNegativeAndRejectsLarge) {
  EXPECT_LT((sqrt_psd(diag({1, -1e-12})) - diag({1, 0})).norm(), 1e-14);
  EXPECT_THROW(sqrt_psd(diag({1, -1e-3})), ValidationError);
}

TEST(SqrtPsd, RandomSquaresBack) {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 1, 8);
    Matrix h = tr::random_psd(d, rng);
    h /= operator_norm(h);
    const Matrix r = sqrt_psd(h);
    EXPECT_LE(operator_norm(r * r - h), 1e-9);
    EXPECT_TRUE(is_positive_semidefinite(r));
    EXPECT_LE(commutator_norm(r, h), 1e-9);
  }
}

TEST(MeetProjectors, Examples) {
  const Matrix p = diag({1, 0});
  EXPECT_LT((meet_projectors(p, p) - p).norm(), 1e-12);
  EXPECT_LT(meet_projectors(p, identity(2) - p).norm(), 1e-12);
  // Two distinct lines in C^2 meet trivially: the stacked complements have full rank.
  const Matrix m = meet_projectors(p, plus_projector());
  EXPECT_LT(m.norm(), 1e-12);
  Matrix stacked(4, 2);
  stacked << identity(2) - p, identity(2) - plus_projector();
  EXPECT_EQ(Eigen::FullPivLU<Matrix>(stacked).rank(), 2);
}

TEST(MeetProjectors, RejectsNonProjector) {
  EXPECT_THROW(meet_projectors(diag({0.5, 0}), diag({1, 0})), ValidationError);
}

TEST(MeetProjectors, PropertiesOnRandomSubspaces) {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 2, 6);
    const Matrix p1 = tr::random_projector(d, tr::random_dim(rng, 0, d), rng);
    const Matrix p2 = tr::random_projector(d, tr::random_dim(rng, 0, d), rng);
    EXPECT_LE(operator_norm(meet_projectors(p1, p2) - meet_projectors(p2, p1)), 1e-9);
    EXPECT_LE(operator_norm(meet_projectors(p1, identity(d)) - p1), 1e-9);
    EXPECT_LE(operator_norm(meet_projectors(p1, Matrix::Zero(d, d))), 1e-9);
    EXPECT_TRUE(is_projector(meet_projectors(p1, p2), 1e-9));
  }
}

TEST(MeetProjectors, SharedSubspaceIsRecovered) {
  Rng rng(15);
  // range(P1) and range(P2) both contain the first column of a unitary.
  const Matrix u = tr::random_unitary_matrix(4, rng);
  const Matrix p1 = u.leftCols(2) * u.leftCols(2).adjoint();
  Matrix v(4, 2);
  v << u.col(0), u.col(2);
  const Matrix p2 = v * v.adjoint();
  const Matrix expected = u.col(0) * u.col(0).adjoint();
  EXPECT_LE(operator_norm(meet_projectors(p1, p2) - expected), 1e-9);
}

TEST(RequireOperator, RejectsNonFiniteAndOversize) {
  Matrix m = identity(2);
  m(0, 1) = std::nan("");
  EXPECT_THROW(require_operator(m, "m"), ValidationError);
  EXPECT_THROW(require_operator(identity(65), "m"), CapacityError);
}
