#include "povmkit/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "povmkit/errors.hpp"
#include "povmkit/kernels.hpp"

namespace povmkit {

namespace {

std::string dims_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::span<const double> as_reals(const Matrix& m) {
  return {reinterpret_cast<const double*>(m.data()), static_cast<std::size_t>(2 * m.size())};
}

}  // namespace

void require_operator(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         dims_of(m));
  }
  if (m.rows() > kMaxDim) {
    throw CapacityError(std::string(what) + ": dimension " + std::to_string(m.rows()) +
                        " exceeds the supported maximum " + std::to_string(kMaxDim));
  }
  if (!m.allFinite()) {
    throw ValidationError("finite", std::string(what) + ": entries must be finite");
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + dims_of(a) + " vs " +
                         dims_of(b));
  }
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("is_hermitian: non-square input " + dims_of(m));
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const Matrix& m, double tol, std::string_view what) {
  require_operator(m, what);
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > tol) {
    throw ValidationError("hermitian",
                          std::string(what) + ": not Hermitian (max |M - M^dagger| = " +
                              std::to_string(defect) + ")",
                          defect);
  }
}

double trace_product(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "trace_product");
  // Re Tr(AB) = sum_ij Re(A_ij B_ji) = sum_ij Re(A_ij conj(B_ij)) for Hermitian B.
  return kernels::dot(as_reals(a), as_reals(b));
}

RealVector eigenvalues_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Matrix SpectralDecomposition::reconstruct() const {
  const Eigen::Index dim = eigenvectors.rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& space : eigenspaces) sum += space.value * space.projector;
  return sum;
}

SpectralDecomposition eig_hermitian(const Matrix& h, double group_tol, double tol) {
  require_hermitian(h, tol, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw ConsistencyError("eig_hermitian: eigensolver did not converge");
  }

  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  const Eigen::Index n = out.eigenvalues.size();
  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const bool split =
        k == n || out.eigenvalues(k) - out.eigenvalues(k - 1) >
                      group_tol * std::max(1.0, std::abs(out.eigenvalues(k)));
    if (!split) continue;
    const Eigen::Index count = k - start;
    const auto block = out.eigenvectors.middleCols(start, count);
    out.eigenspaces.push_back({out.eigenvalues.segment(start, count).mean(),
                               block * block.adjoint()});
    start = k;
  }
  return out;
}

bool is_positive_semidefinite(const Matrix& h, double tol) {
  require_hermitian(h, tol, "is_positive_semidefinite");
  return eigenvalues_hermitian(h)(0) >= -tol;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxDim || cols > kMaxDim) {
    throw CapacityError("tensor: product dimension " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " exceeds the supported maximum " +
                        std::to_string(kMaxDim));
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix sqrt_psd(const Matrix& h, double tol) {
  require_hermitian(h, tol, "sqrt_psd");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  RealVector values = solver.eigenvalues();
  if (values(0) < -tol) {
    throw ValidationError("positive", "sqrt_psd: eigenvalue " + std::to_string(values(0)) +
                                          " is below -tol",
                          -values(0));
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = solver.eigenvectors();
  return v * values.asDiagonal() * v.adjoint();
}

bool is_projector(const Matrix& p, double tol) {
  require_operator(p, "is_projector");
  if (!is_hermitian(p, tol)) return false;
  return operator_norm(p * p - p) <= tol;
}

Matrix meet_projectors(const Matrix& p1, const Matrix& p2, double tol) {
  require_same_dim(p1, p2, "meet_projectors");
  if (!is_projector(p1, tol)) throw ValidationError("projector", "meet_projectors: first argument is not a projector");
  if (!is_projector(p2, tol)) throw ValidationError("projector", "meet_projectors: second argument is not a projector");

  const Eigen::Index d = p1.rows();
  Matrix stacked(2 * d, d);
  stacked.topRows(d) = identity(d) - p1;
  stacked.bottomRows(d) = identity(d) - p2;

  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();  // descending, length d
  const double cutoff = std::max(tol, 1e-12);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  const auto null_basis = svd.matrixV().rightCols(d - rank);
  return null_basis * null_basis.adjoint();
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "commutator_norm");
  return operator_norm(a * b - b * a);
}

}  // namespace povmkit
