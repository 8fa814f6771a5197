#pragma once

// Ensemble semantics: Born-rule sampling, Lueders state updates, filters and
// sequences of (possibly non-coexistent) measurements.
//
// Randomness comes from CounterRng. A single ensemble draws from stream 0 of
// its seed; trajectory t of a sequence draws from stream t. Results therefore
// do not depend on how trajectories are scheduled across threads.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "povmkit/observables.hpp"
#include "povmkit/random.hpp"

namespace povmkit {

/// Probability below which conditioning on an outcome is refused.
inline constexpr double kConditioningFloor = 1e-12;

struct EnsembleConfig {
  DensityOperator state;
  GeneralizedMeasure measure;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct MeasurementRecord {
  std::vector<std::string> labels;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  std::vector<double> std_error;  // sqrt(f (1 - f) / N)
  std::vector<double> born;       // exact outcome probabilities
  std::uint64_t samples = 0;
};

struct TrajectoryStep {
  std::size_t measure_index;
  std::size_t outcome_index;
  std::string outcome;
  DensityOperator post_state;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  /// Set when a sampled outcome had probability <= kConditioningFloor; the
  /// trajectory stops before that step.
  bool terminated = false;
  std::string termination_reason;
};

struct SequenceResult {
  /// Per step: outcome counts over the trajectories that reached it. `born`
  /// holds the exact marginal distribution of that step, obtained by pushing
  /// the initial state through the non-selective updates of earlier steps.
  std::vector<MeasurementRecord> steps;
  /// outcomes[t][k] = outcome index of trajectory t at step k (-1 past termination).
  std::vector<std::vector<int>> outcomes;
  /// Full record of trajectory 0.
  Trajectory first;
  std::uint64_t terminated = 0;
};

struct FilterResult {
  bool passed;
  DensityOperator post_state;
};

/// Exact Born probabilities of every outcome; throws ConsistencyError when
/// they do not sum to 1 within 1e-9.
std::vector<double> outcome_probabilities(const DensityOperator& rho, const GeneralizedMeasure& measure);

/// N independent categorical draws. Deterministic in (state, measure, N, seed).
MeasurementRecord sample_outcomes(const EnsembleConfig& config);

/// sqrt(E) rho sqrt(E) / Tr(rho E). Throws ConditioningError when
/// Tr(rho E) <= kConditioningFloor.
DensityOperator luders_update(const DensityOperator& rho, const Effect& e);

/// Sends one object through the filter for projector P. Passes with
/// probability Tr(rho P); the post-state is conditioned on P or I - P.
FilterResult filter_pass(const DensityOperator& rho, const Matrix& projector, CounterRng& rng,
                         double tol = kDefaultTol);

/// sum_i sqrt(F_i) rho sqrt(F_i): the state after measuring without reading the result.
DensityOperator nonselective_update(const DensityOperator& rho, const GeneralizedMeasure& measure);

/// One trajectory through `measures`, drawn from stream `trajectory` of `seed`.
Trajectory sample_trajectory(const DensityOperator& rho, const std::vector<GeneralizedMeasure>& measures,
                             std::uint64_t seed, std::uint64_t trajectory = 0);

/// `trajectories` independent trajectories plus per-step statistics.
/// threads = 0 uses the hardware concurrency.
SequenceResult sequential_measurement(const DensityOperator& rho,
                                      const std::vector<GeneralizedMeasure>& measures,
                                      std::uint64_t seed, std::uint64_t trajectories,
                                      unsigned threads = 1);

}  // namespace povmkit
