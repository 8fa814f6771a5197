#pragma once

// Sharp (projection-valued) and unsharp (effect-valued) observables.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "povmkit/operator_core.hpp"
#include "povmkit/states_effects.hpp"

namespace povmkit {

/// Finite, ordered outcome labels with optional numeric values (hbar = 1).
class OutcomeSpace {
 public:
  OutcomeSpace() = default;

  /// Throws ValidationError on duplicate labels or a value list of the wrong length.
  OutcomeSpace(std::vector<std::string> labels,
               std::optional<std::vector<double>> values = std::nullopt);

  /// Labels "0", "1", ..., "n-1" without values.
  static OutcomeSpace indexed(std::size_t n);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::optional<std::vector<double>>& values() const noexcept { return values_; }

  /// Index of `label`, if present.
  std::optional<std::size_t> find(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::optional<std::vector<double>> values_;
};

/// Effect-valued measure: effects summing to the identity.
class GeneralizedMeasure {
 public:
  const OutcomeSpace& outcomes() const noexcept { return outcomes_; }
  const std::vector<Effect>& effects() const noexcept { return effects_; }
  const Effect& effect(std::size_t i) const { return effects_.at(i); }
  std::size_t size() const noexcept { return effects_.size(); }
  Eigen::Index dim() const noexcept { return effects_.front().dim(); }

  /// Same effects under a different outcome space of equal size.
  GeneralizedMeasure relabeled(OutcomeSpace outcomes) const;

 private:
  friend GeneralizedMeasure validate_povm(const std::vector<Matrix>&, OutcomeSpace, double);
  GeneralizedMeasure(OutcomeSpace o, std::vector<Effect> e)
      : outcomes_(std::move(o)), effects_(std::move(e)) {}
  OutcomeSpace outcomes_;
  std::vector<Effect> effects_;
};

/// Projection-valued measure: mutually orthogonal projectors summing to I.
class ProjectiveMeasure {
 public:
  const OutcomeSpace& outcomes() const noexcept { return outcomes_; }
  const std::vector<Matrix>& projectors() const noexcept { return projectors_; }
  std::size_t size() const noexcept { return projectors_.size(); }
  Eigen::Index dim() const noexcept { return projectors_.front().rows(); }

  GeneralizedMeasure as_povm() const;

 private:
  friend ProjectiveMeasure validate_pvm(const std::vector<Matrix>&, OutcomeSpace, double);
  ProjectiveMeasure(OutcomeSpace o, std::vector<Matrix> p)
      : outcomes_(std::move(o)), projectors_(std::move(p)) {}
  OutcomeSpace outcomes_;
  std::vector<Matrix> projectors_;
};

/// Column-stochastic matrix: rows are output outcomes X, columns input
/// outcomes lambda, and for every lambda the column w(., lambda) is a
/// probability vector.
class StochasticKernel {
 public:
  /// Throws ValidationError on negative weights or a column sum off by > 1e-12.
  explicit StochasticKernel(RealMatrix weights);

  static StochasticKernel identity(Eigen::Index n);

  /// Binary symmetric channel [[1-eps, eps], [eps, 1-eps]].
  static StochasticKernel flip(double eps);

  const RealMatrix& weights() const noexcept { return weights_; }
  Eigen::Index outputs() const noexcept { return weights_.rows(); }
  Eigen::Index inputs() const noexcept { return weights_.cols(); }

  /// Kernel of "apply this, then `after`": after.weights() * weights().
  StochasticKernel then(const StochasticKernel& after) const;

 private:
  RealMatrix weights_;
};

struct MomentOperator {
  Matrix matrix;
};

struct Moments {
  double mean;
  double delta;
};

struct RobertsonResult {
  double lhs;  // Delta A * Delta B
  double rhs;  // |Tr(rho [A, B])| / 2
  bool holds;
};

/// Validates effects and completeness. Empty `outcomes` means indexed labels.
/// Failures name the offending element and invariant; completeness failures
/// carry the operator-norm deviation ||sum F - I|| as the magnitude.
GeneralizedMeasure validate_povm(const std::vector<Matrix>& effects, OutcomeSpace outcomes = {},
                                 double tol = kDefaultTol);

/// validate_povm plus idempotence and pairwise orthogonality.
ProjectiveMeasure validate_pvm(const std::vector<Matrix>& projectors, OutcomeSpace outcomes = {},
                               double tol = kDefaultTol);

/// Spectral measure of a Hermitian operator: one outcome per grouped
/// eigenvalue, ordered by decreasing value, labelled "%+.12g" of the value.
ProjectiveMeasure pvm_from_observable(const Matrix& h, double group_tol = kDefaultGroupTol,
                                      double tol = kDefaultTol);

/// Sharp spin-1/2 measurement along a unit direction: {(I + n.sigma)/2, (I - n.sigma)/2}.
ProjectiveMeasure spin_pvm(const std::array<double, 3>& direction);

/// ||P1 P2 - P2 P1|| <= tol for two projectors.
bool projectors_coexistent(const Matrix& p1, const Matrix& p2, double tol = kDefaultTol);

/// Four-outcome PVM (tt, tf, ft, ff) refining two commuting projectors.
/// Throws CoexistenceError when they do not commute.
ProjectiveMeasure joint_pvm(const Matrix& p1, const Matrix& p2, double tol = kDefaultTol);

/// F_x = sum_lambda w(x, lambda) E_lambda. Output labels default to the
/// input's when the kernel is square, and to indexed labels otherwise.
GeneralizedMeasure smear(const GeneralizedMeasure& measure, const StochasticKernel& kernel,
                         std::optional<OutcomeSpace> outcomes = std::nullopt);
GeneralizedMeasure smear(const ProjectiveMeasure& measure, const StochasticKernel& kernel,
                         std::optional<OutcomeSpace> outcomes = std::nullopt);

/// {(I + eta n.sigma)/2, (I - eta n.sigma)/2}, labels "+1"/"-1" with values +-1.
GeneralizedMeasure unsharp_spin(const std::array<double, 3>& direction, double eta);

/// sum_i x_i F_i. Throws ValidationError when the outcomes carry no values.
MomentOperator first_moment(const GeneralizedMeasure& povm);
MomentOperator first_moment(const ProjectiveMeasure& pvm);

/// mean = Tr(rho A), delta = sqrt(max(0, Tr(rho A^2) - mean^2)).
Moments expectation_variance(const DensityOperator& rho, const Matrix& a, double tol = kDefaultTol);

/// Delta A * Delta B against |Tr(rho [A, B])| / 2; holds when lhs >= rhs - 1e-9.
RobertsonResult robertson_check(const DensityOperator& rho, const Matrix& a, const Matrix& b,
                                double tol = kDefaultTol);

/// Effects span all d^2 real dimensions of the Hermitian operators: rank of
/// the Gram matrix Tr(F_i F_j), counting singular values above 1e-8 of the largest.
bool is_informationally_complete(const GeneralizedMeasure& povm);

/// Tr(rho [A0 B0 + A0 B1 + A1 B0 - A1 B1]) with tensor products. Observables
/// must be Hermitian with spectrum in [-1 - tol, 1 + tol]; rho lives on the
/// product of the A and B spaces.
double chsh_value(const DensityOperator& rho, const Matrix& a0, const Matrix& a1, const Matrix& b0,
                  const Matrix& b1, double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Joint measurability of two binary POVMs.

struct CoexistenceOptions {
  double tol = kDefaultTol;       // feasibility threshold on the residual
  std::uint64_t seed = 0;         // multi-start seed (dim > 2)
  int starts = 20;                // multi-start count (dim > 2)
  int grid_points = 9;            // per axis, qubit grid
  int grid_depth = 6;             // refinement levels, qubit grid
  double grid_refinement = 4.0;   // box shrink factor per level
  int polish_iterations = 4000;   // penalty-descent iterations per start
};

struct CoexistenceResult {
  bool found = false;
  /// Largest achieved value of the smallest eigenvalue over the four
  /// constraints G, A+ - G, B+ - G, I - A+ - B+ + G. Non-negative (up to tol)
  /// iff the returned G is feasible.
  double residual = 0.0;
  Matrix g;
  /// Joint POVM {G, A+ - G, B+ - G, I - A+ - B+ + G} with labels (++, +-, -+, --),
  /// present when found.
  std::optional<GeneralizedMeasure> joint;
  std::string method;
};

/// Smallest eigenvalue over the four joint-POVM constraints for a candidate G.
double coexistence_residual(const Matrix& a_plus, const Matrix& b_plus, const Matrix& g);

/// Searches for a joint four-outcome POVM whose marginals are A and B.
/// A failed search is "not found within budget", not a proof of
/// incompatibility. Throws ValidationError for non-binary input.
CoexistenceResult coexist_binary_povms(const GeneralizedMeasure& a, const GeneralizedMeasure& b,
                                       const CoexistenceOptions& options = {});

}  // namespace povmkit
