#include "povmkit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "povmkit/errors.hpp"

namespace povmkit {

namespace {

void require_compatible(const DensityOperator& rho, const GeneralizedMeasure& measure) {
  if (rho.dim() != measure.dim()) {
    throw DimensionError("state dimension " + std::to_string(rho.dim()) +
                         " does not match measure dimension " + std::to_string(measure.dim()));
  }
}

std::size_t draw(const std::vector<double>& probabilities, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  // u landed in the rounding gap above the last partial sum: last outcome
  // with nonzero probability.
  for (std::size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0.0) return i;
  }
  return probabilities.size() - 1;
}

// sqrt(E) rho sqrt(E) / p with the root precomputed.
DensityOperator condition(const DensityOperator& rho, const Matrix& root, double p) {
  if (!(p > kConditioningFloor)) {
    throw ConditioningError("cannot condition on an outcome of probability " + std::to_string(p));
  }
  Matrix post = root * rho.matrix() * root.adjoint() / p;
  // Normalize away rounding in the trace before validating.
  post /= post.trace().real();
  return DensityOperator::from_matrix(hermitian_part(post), 1e-9);
}

struct PreparedMeasure {
  const GeneralizedMeasure* measure;
  std::vector<Matrix> roots;
};

std::vector<PreparedMeasure> prepare(const DensityOperator& rho, const std::vector<GeneralizedMeasure>& measures) {
  std::vector<PreparedMeasure> out;
  out.reserve(measures.size());
  for (const auto& m : measures) {
    require_compatible(rho, m);
    PreparedMeasure pm{&m, {}};
    for (const auto& e : m.effects()) pm.roots.push_back(sqrt_psd(e.matrix(), 1e-9));
    out.push_back(std::move(pm));
  }
  return out;
}

MeasurementRecord make_record(const OutcomeSpace& outcomes, std::vector<std::uint64_t> counts,
                              std::vector<double> born) {
  MeasurementRecord r;
  r.labels = outcomes.labels();
  r.samples = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  r.counts = std::move(counts);
  r.born = std::move(born);
  for (auto c : r.counts) {
    const double f = r.samples > 0 ? static_cast<double>(c) / static_cast<double>(r.samples) : 0.0;
    r.frequencies.push_back(f);
    r.std_error.push_back(r.samples > 0 ? std::sqrt(f * (1.0 - f) / static_cast<double>(r.samples)) : 0.0);
  }
  return r;
}

// Walks one trajectory; calls `visit(step, outcome, post_state)` per step.
template <typename Visit>
bool walk(const DensityOperator& rho, const std::vector<PreparedMeasure>& prepared, CounterRng& rng,
          std::string& reason, Visit&& visit) {
  DensityOperator state = rho;
  for (std::size_t k = 0; k < prepared.size(); ++k) {
    const auto p = outcome_probabilities(state, *prepared[k].measure);
    const std::size_t outcome = draw(p, rng.uniform());
    if (!(p[outcome] > kConditioningFloor)) {
      reason = "step " + std::to_string(k) + ": outcome \"" +
               prepared[k].measure->outcomes().labels()[outcome] + "\" has probability " +
               std::to_string(p[outcome]);
      return false;
    }
    state = condition(state, prepared[k].roots[outcome], p[outcome]);
    visit(k, outcome, state);
  }
  return true;
}

}  // namespace

std::vector<double> outcome_probabilities(const DensityOperator& rho, const GeneralizedMeasure& measure) {
  require_compatible(rho, measure);
  std::vector<double> p;
  p.reserve(measure.size());
  for (const auto& e : measure.effects()) p.push_back(born_probability(rho, e));
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConsistencyError("outcome probabilities sum to " + std::to_string(total));
  }
  return p;
}

MeasurementRecord sample_outcomes(const EnsembleConfig& config) {
  const auto p = outcome_probabilities(config.state, config.measure);
  std::vector<std::uint64_t> counts(p.size(), 0);
  CounterRng rng(config.seed, 0);
  for (std::uint64_t n = 0; n < config.samples; ++n) ++counts[draw(p, rng.uniform())];
  return make_record(config.measure.outcomes(), std::move(counts), p);
}

DensityOperator luders_update(const DensityOperator& rho, const Effect& e) {
  require_same_dim(rho.matrix(), e.matrix(), "luders_update");
  const double p = born_probability(rho, e);
  return condition(rho, sqrt_psd(e.matrix(), 1e-9), p);
}

FilterResult filter_pass(const DensityOperator& rho, const Matrix& projector, CounterRng& rng, double tol) {
  require_same_dim(rho.matrix(), projector, "filter_pass");
  if (!is_projector(projector, tol)) throw ValidationError("projector", "filter_pass: filter is not a projector");
  const Effect pass = Effect::from_matrix(projector, tol);
  const double p = born_probability(rho, pass);
  const bool passed = rng.uniform() < p;
  // For a projector sqrt(P) = P.
  const Effect& branch = passed ? pass : pass.complement();
  return {passed, condition(rho, branch.matrix(), passed ? p : 1.0 - p)};
}

DensityOperator nonselective_update(const DensityOperator& rho, const GeneralizedMeasure& measure) {
  require_compatible(rho, measure);
  Matrix sum = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& e : measure.effects()) {
    const Matrix root = sqrt_psd(e.matrix(), 1e-9);
    sum += root * rho.matrix() * root;
  }
  return DensityOperator::from_matrix(hermitian_part(sum), 1e-9);
}

Trajectory sample_trajectory(const DensityOperator& rho, const std::vector<GeneralizedMeasure>& measures,
                             std::uint64_t seed, std::uint64_t trajectory) {
  const auto prepared = prepare(rho, measures);
  CounterRng rng(seed, trajectory);
  Trajectory out;
  const bool complete =
      walk(rho, prepared, rng, out.termination_reason,
           [&](std::size_t k, std::size_t outcome, const DensityOperator& state) {
             out.steps.push_back({k, outcome, measures[k].outcomes().labels()[outcome], state});
           });
  out.terminated = !complete;
  return out;
}

SequenceResult sequential_measurement(const DensityOperator& rho, const std::vector<GeneralizedMeasure>& measures,
                                      std::uint64_t seed, std::uint64_t trajectories, unsigned threads) {
  const auto prepared = prepare(rho, measures);
  SequenceResult out;
  out.outcomes.assign(trajectories, std::vector<int>(measures.size(), -1));
  std::vector<char> terminated(trajectories, 0);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(seed, t);
      std::string reason;
      auto& row = out.outcomes[t];
      const bool complete = walk(rho, prepared, rng, reason, [&](std::size_t k, std::size_t outcome, const DensityOperator&) {
        row[k] = static_cast<int>(outcome);
      });
      terminated[t] = complete ? 0 : 1;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(trajectories, 1)));
  if (threads <= 1) {
    run_range(0, trajectories);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (trajectories + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = std::min(trajectories, w * chunk);
      const std::uint64_t end = std::min(trajectories, begin + chunk);
      pool.emplace_back(run_range, begin, end);
    }
  }

  out.terminated = static_cast<std::uint64_t>(std::count(terminated.begin(), terminated.end(), 1));
  DensityOperator marginal_state = rho;
  for (std::size_t k = 0; k < measures.size(); ++k) {
    std::vector<std::uint64_t> counts(measures[k].size(), 0);
    for (const auto& row : out.outcomes) {
      if (row[k] >= 0) ++counts[static_cast<std::size_t>(row[k])];
    }
    out.steps.push_back(make_record(measures[k].outcomes(), std::move(counts),
                                    outcome_probabilities(marginal_state, measures[k])));
    marginal_state = nonselective_update(marginal_state, measures[k]);
  }
  if (trajectories > 0) out.first = sample_trajectory(rho, measures, seed, 0);
  return out;
}

}  // namespace povmkit
