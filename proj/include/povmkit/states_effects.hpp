#pragma once

// States, effects, Born probabilities and the property taxonomy.

#include <optional>
#include <string_view>
#include <vector>

#include "povmkit/operator_core.hpp"

namespace povmkit {

/// Positive unit-trace operator. Stored as its Hermitian part.
class DensityOperator {
 public:
  /// Validates Hermiticity, positivity and unit trace within tol.
  static DensityOperator from_matrix(const Matrix& m, double tol = kDefaultTol);

  /// |psi><psi| / <psi|psi>.
  static DensityOperator pure(const Vector& psi);

  /// Projector onto basis vector `index`.
  static DensityOperator basis(Eigen::Index dim, Eigen::Index index);

  /// I / dim.
  static DensityOperator maximally_mixed(Eigen::Index dim);

  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  explicit DensityOperator(Matrix m) : matrix_(std::move(m)) {}
  Matrix matrix_;
};

/// Operator with O <= E <= I.
///
/// Holds both E and I - E; complement() swaps them, so complementing twice
/// returns the original matrix bit-for-bit.
class Effect {
 public:
  /// Validates Hermiticity and spectrum within [-tol, 1 + tol].
  static Effect from_matrix(const Matrix& m, double tol = kDefaultTol);

  static Effect zero(Eigen::Index dim);
  static Effect unit(Eigen::Index dim);

  /// (1/2) I.
  static Effect semitransparent(Eigen::Index dim);

  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  /// I - E.
  Effect complement() const { return Effect(complement_, matrix_); }

 private:
  Effect(Matrix m, Matrix c) : matrix_(std::move(m)), complement_(std::move(c)) {}
  Matrix matrix_;
  Matrix complement_;
};

enum class EffectClass {
  TrivialO,
  TrivialI,
  Semitransparent,
  SharpProjection,
  Regular,
  BelowSemitransparent,
  AboveSemitransparent,
};

std::string_view to_string(EffectClass c) noexcept;

/// Re Tr(rho E), clamped to [0, 1] when it strays past a boundary by at most tol.
double born_probability(const DensityOperator& rho, const Effect& e, double tol = kDefaultTol);

inline Effect complement(const Effect& e) { return e.complement(); }

/// Spectrum of the Hermitian operator lies in [-tol, 1 + tol].
bool is_effect(const Matrix& h, double tol = kDefaultTol);

/// E is a projection: ||E^2 - E|| <= tol.
bool is_sharp(const Effect& e, double tol = kDefaultTol);

/// Neither E <= I/2 nor E >= I/2: the spectrum of E - I/2 has a value above
/// tol and a value below -tol.
bool is_regular(const Effect& e, double tol = kDefaultTol);

/// The property is always true or always false in rho.
bool is_real_in_state(const Effect& e, const DensityOperator& rho, double tol = kDefaultTol);

/// First matching label in the order TrivialO, TrivialI, Semitransparent,
/// SharpProjection, Regular, BelowSemitransparent, AboveSemitransparent.
EffectClass classify(const Effect& e, double tol = kDefaultTol);

/// For a Hermitian operator whose spectrum leaves [0, 1] by more than tol,
/// the eigenstate of the most offending eigenvalue. Its Born "probability"
/// equals that eigenvalue and so falls outside [0, 1].
std::optional<DensityOperator> born_violation_witness(const Matrix& h, double tol = kDefaultTol);

/// d^2 pure states whose projectors span the Hermitian operators on C^d:
/// |j>, (|j> + |k>)/sqrt2 and (|j> + i|k>)/sqrt2 for j < k.
std::vector<DensityOperator> spanning_states(Eigen::Index dim);

}  // namespace povmkit
