#pragma once

// Projective dilations of effect-valued measures.
//
// Extended space ordering is system (x) ancilla, system-major: basis vector
// |s> (x) |a> has index s * ancilla_dim + a.

#include <cstdint>
#include <span>

#include "povmkit/observables.hpp"

namespace povmkit {

struct DilationResult {
  Eigen::Index system_dim = 0;
  Eigen::Index ancilla_dim = 0;
  /// (system_dim * ancilla_dim) x system_dim isometry V.
  Matrix isometry;
  /// PVM on the extended space, one projector per POVM outcome.
  ProjectiveMeasure extended_pvm;

  /// V rho V^dagger.
  Matrix embed(const DensityOperator& rho) const;

  /// ||V^dagger V - I|| (operator norm).
  double isometry_defect() const;
};

/// V psi = sum_i (sqrt(F_i) psi) (x) e_i with P_i = I (x) |e_i><e_i|.
/// Throws CapacityError when system_dim * n exceeds kMaxDim.
DilationResult dilate(const GeneralizedMeasure& povm);

/// A different dilation with the same statistics.
///
/// Seed 0, or any single-outcome POVM, pads the ancilla with one extra level
/// that V never populates and folds it into the last outcome's projector.
/// Other seeds keep the ancilla and rotate it by a seeded Haar unitary U:
/// V' = (I (x) U) V, P'_i = (I (x) U) P_i (I (x) U)^dagger.
DilationResult alternate_dilation(const GeneralizedMeasure& povm, std::uint64_t variant_seed);

/// max over states and outcomes of |Tr(V rho V^dagger P_i) - Tr(rho F_i)|; 0 for no states.
double verify_dilation(const GeneralizedMeasure& povm, const DilationResult& dilation,
                       std::span<const DensityOperator> states);

/// max_i ||P_i - P'_i|| between two dilations of the same system and outcome
/// count. A smaller ancilla is zero-padded to the larger one before comparing.
double projector_family_distance(const DilationResult& a, const DilationResult& b);

}  // namespace povmkit
