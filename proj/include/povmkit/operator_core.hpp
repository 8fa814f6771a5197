#pragma once

// Dense complex-matrix foundation shared by every other module.

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace povmkit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Largest Hilbert-space dimension any operation will produce or accept.
inline constexpr Eigen::Index kMaxDim = 64;

/// Default validation tolerance.
inline constexpr double kDefaultTol = 1e-9;

/// Default relative gap below which eigenvalues are merged into one eigenspace.
inline constexpr double kDefaultGroupTol = 1e-8;

/// Throws DimensionError unless `m` is square with 1 <= dim <= kMaxDim, and
/// ValidationError if any entry is NaN or infinite. `what` names the operand.
void require_operator(const Matrix& m, std::string_view what);

/// Throws DimensionError unless both operators have the same dimension.
void require_same_dim(const Matrix& a, const Matrix& b, std::string_view what);

Matrix identity(Eigen::Index dim);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// Hermitian part (M + M^dagger) / 2.
Matrix hermitian_part(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Max entrywise |M - M^dagger| <= tol.
bool is_hermitian(const Matrix& m, double tol = kDefaultTol);

/// Throws ValidationError (invariant "hermitian") unless is_hermitian holds.
void require_hermitian(const Matrix& m, double tol, std::string_view what);

/// Re Tr(A B) for Hermitian `b` (or Hermitian `a`). With one factor Hermitian
/// this is the real Frobenius inner product of the interleaved storage, which
/// is what the vector kernels evaluate.
double trace_product(const Matrix& a, const Matrix& b);

/// Ascending eigenvalues of the Hermitian part of `m`.
RealVector eigenvalues_hermitian(const Matrix& m);

struct Eigenspace {
  double value;
  Matrix projector;
};

struct SpectralDecomposition {
  RealVector eigenvalues;      // ascending
  Matrix eigenvectors;         // orthonormal columns, matching eigenvalues
  std::vector<Eigenspace> eigenspaces;  // ascending, degeneracies merged

  /// Sum of value * projector over the grouped eigenspaces.
  Matrix reconstruct() const;
};

/// Spectral decomposition of a Hermitian operator. Neighbouring eigenvalues
/// with gap <= group_tol * max(1, |lambda|) share one eigenspace whose value
/// is the mean of the merged eigenvalues.
SpectralDecomposition eig_hermitian(const Matrix& h, double group_tol = kDefaultGroupTol,
                                    double tol = kDefaultTol);

/// Smallest eigenvalue >= -tol. Throws ValidationError on non-Hermitian input.
bool is_positive_semidefinite(const Matrix& h, double tol = kDefaultTol);

/// Kronecker product, system-major: (A (x) B)[i*dB + k, j*dB + l] = A[i,j] B[k,l].
Matrix tensor(const Matrix& a, const Matrix& b);

/// Positive square root. Eigenvalues in [-tol, 0) are clamped to zero;
/// anything more negative is a ValidationError.
Matrix sqrt_psd(const Matrix& h, double tol = kDefaultTol);

/// Hermitian and idempotent within tol (operator norm of P^2 - P).
bool is_projector(const Matrix& p, double tol = kDefaultTol);

/// Orthogonal projector onto range(P1) intersected with range(P2), obtained
/// from the joint null space of (I - P1) and (I - P2) by SVD.
Matrix meet_projectors(const Matrix& p1, const Matrix& p2, double tol = kDefaultTol);

/// Operator norm of the commutator AB - BA.
double commutator_norm(const Matrix& a, const Matrix& b);

}  // namespace povmkit
