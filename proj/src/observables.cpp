#include "povmkit/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <span>

#include "povmkit/errors.hpp"
#include "povmkit/kernels.hpp"

namespace povmkit {

namespace {

std::span<const double> reals(const Matrix& m) {
  return {reinterpret_cast<const double*>(m.data()), static_cast<std::size_t>(2 * m.size())};
}

std::span<double> reals(Matrix& m) {
  return {reinterpret_cast<double*>(m.data()), static_cast<std::size_t>(2 * m.size())};
}

std::string element_name(const OutcomeSpace& outcomes, std::size_t i) {
  return "element " + std::to_string(i) + " (\"" + outcomes.labels()[i] + "\")";
}

Matrix spin_component(const std::array<double, 3>& n) {
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw ValidationError("unit-direction",
                          "spin direction must be a unit vector (|n| = " + std::to_string(norm) + ")",
                          std::abs(norm - 1.0));
  }
  return n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z();
}

std::vector<std::string> value_labels(const std::vector<double>& values, int digits) {
  std::vector<std::string> labels;
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%+.*g", digits, v);
    labels.emplace_back(buf);
  }
  return labels;
}

void require_spectrum_in_unit_ball(const Matrix& m, double tol, const std::string& what) {
  require_hermitian(m, tol, what);
  const RealVector spectrum = eigenvalues_hermitian(m);
  const double worst = std::max(-spectrum(0), spectrum(spectrum.size() - 1));
  if (worst > 1.0 + tol) {
    throw ValidationError("spectrum-range",
                          what + ": spectrum leaves [-1, 1] (max |eigenvalue| = " +
                              std::to_string(worst) + ")",
                          worst - 1.0);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// OutcomeSpace

OutcomeSpace::OutcomeSpace(std::vector<std::string> labels, std::optional<std::vector<double>> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw ValidationError("distinct-labels", "outcome label \"" + l + "\" appears twice");
    }
  }
  if (values_ && values_->size() != labels_.size()) {
    throw ValidationError("value-count", "outcome values (" + std::to_string(values_->size()) +
                                             ") and labels (" + std::to_string(labels_.size()) +
                                             ") differ in length");
  }
}

OutcomeSpace OutcomeSpace::indexed(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return OutcomeSpace(std::move(labels));
}

std::optional<std::size_t> OutcomeSpace::find(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// Measures

GeneralizedMeasure GeneralizedMeasure::relabeled(OutcomeSpace outcomes) const {
  if (outcomes.size() != effects_.size()) {
    throw DimensionError("relabeled: outcome count mismatch");
  }
  return GeneralizedMeasure(std::move(outcomes), effects_);
}

GeneralizedMeasure ProjectiveMeasure::as_povm() const {
  return validate_povm(projectors_, outcomes_, std::numeric_limits<double>::infinity());
}

GeneralizedMeasure validate_povm(const std::vector<Matrix>& effects, OutcomeSpace outcomes, double tol) {
  if (effects.empty()) throw ValidationError("nonempty", "measure has no elements");
  if (outcomes.size() == 0) outcomes = OutcomeSpace::indexed(effects.size());
  if (outcomes.size() != effects.size()) {
    throw ValidationError("outcome-count", "measure has " + std::to_string(effects.size()) +
                                               " elements but " + std::to_string(outcomes.size()) +
                                               " outcome labels");
  }

  // An infinite tol skips the spectral checks (used for already-validated input).
  const bool check = std::isfinite(tol);
  std::vector<Effect> validated;
  validated.reserve(effects.size());
  Matrix sum = Matrix::Zero(effects.front().rows(), effects.front().cols());
  for (std::size_t i = 0; i < effects.size(); ++i) {
    require_operator(effects[i], element_name(outcomes, i));
    require_same_dim(effects[i], effects.front(), element_name(outcomes, i));
    try {
      validated.push_back(Effect::from_matrix(effects[i], check ? tol : 1e300));
    } catch (const ValidationError& e) {
      throw ValidationError(e.invariant(), element_name(outcomes, i) + ": " + e.what(), e.magnitude());
    }
    sum += validated.back().matrix();
  }
  const double deviation = operator_norm(sum - identity(sum.rows()));
  if (check && deviation > tol) {
    throw ValidationError("completeness",
                          "elements do not sum to the identity (operator-norm deviation " +
                              std::to_string(deviation) + ")",
                          deviation);
  }
  return GeneralizedMeasure(std::move(outcomes), std::move(validated));
}

ProjectiveMeasure validate_pvm(const std::vector<Matrix>& projectors, OutcomeSpace outcomes, double tol) {
  if (projectors.empty()) throw ValidationError("nonempty", "measure has no elements");
  if (outcomes.size() == 0) outcomes = OutcomeSpace::indexed(projectors.size());

  std::vector<std::string> invariants;
  std::vector<std::string> details;
  std::optional<double> magnitude;
  auto fail = [&](const std::string& invariant, const std::string& detail, double size) {
    if (std::find(invariants.begin(), invariants.end(), invariant) == invariants.end()) {
      invariants.push_back(invariant);
    }
    details.push_back(detail);
    if (!magnitude) magnitude = size;
  };

  for (std::size_t i = 0; i < projectors.size(); ++i) {
    require_operator(projectors[i], "projector " + std::to_string(i));
    require_same_dim(projectors[i], projectors.front(), "projector " + std::to_string(i));
    require_hermitian(projectors[i], tol, "projector " + std::to_string(i));
    const Matrix& p = projectors[i];
    const double idem = operator_norm(p * p - p);
    if (idem > tol) fail("idempotent", "projector " + std::to_string(i) + " is not idempotent", idem);
  }
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    for (std::size_t j = i + 1; j < projectors.size(); ++j) {
      const double overlap = operator_norm(projectors[i] * projectors[j]);
      if (overlap > tol) {
        fail("orthogonality",
             "projectors " + std::to_string(i) + " and " + std::to_string(j) + " are not orthogonal",
             overlap);
      }
    }
  }
  Matrix sum = Matrix::Zero(projectors.front().rows(), projectors.front().cols());
  for (const auto& p : projectors) sum += p;
  const double deviation = operator_norm(sum - identity(sum.rows()));
  if (deviation > tol) {
    fail("completeness",
         "projectors do not sum to the identity (operator-norm deviation " + std::to_string(deviation) + ")",
         deviation);
  }

  if (!invariants.empty()) {
    std::string invariant, detail;
    for (const auto& s : invariants) invariant += (invariant.empty() ? "" : "+") + s;
    for (const auto& s : details) detail += (detail.empty() ? "" : "; ") + s;
    throw ValidationError(invariant, detail, magnitude);
  }

  // Shares outcome-space checks with validate_povm.
  const GeneralizedMeasure checked = validate_povm(projectors, outcomes, tol);
  std::vector<Matrix> stored;
  stored.reserve(checked.size());
  for (const auto& e : checked.effects()) stored.push_back(e.matrix());
  return ProjectiveMeasure(checked.outcomes(), std::move(stored));
}

ProjectiveMeasure pvm_from_observable(const Matrix& h, double group_tol, double tol) {
  const SpectralDecomposition spectral = eig_hermitian(h, group_tol, tol);
  std::vector<Matrix> projectors;
  std::vector<double> values;
  for (auto it = spectral.eigenspaces.rbegin(); it != spectral.eigenspaces.rend(); ++it) {
    projectors.push_back(it->projector);
    values.push_back(it->value);
  }
  auto labels = value_labels(values, 12);
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
    labels = value_labels(values, 17);
  }
  return validate_pvm(projectors, OutcomeSpace(std::move(labels), std::move(values)),
                      std::max(tol, 1e-9));
}

ProjectiveMeasure spin_pvm(const std::array<double, 3>& direction) {
  const Matrix n_sigma = spin_component(direction);
  const Matrix id = identity(2);
  return validate_pvm({0.5 * (id + n_sigma), 0.5 * (id - n_sigma)},
                      OutcomeSpace({"+1", "-1"}, std::vector<double>{1.0, -1.0}));
}

bool projectors_coexistent(const Matrix& p1, const Matrix& p2, double tol) {
  require_same_dim(p1, p2, "projectors_coexistent");
  if (!is_projector(p1, tol)) throw ValidationError("projector", "projectors_coexistent: first argument is not a projector");
  if (!is_projector(p2, tol)) throw ValidationError("projector", "projectors_coexistent: second argument is not a projector");
  return commutator_norm(p1, p2) <= tol;
}

ProjectiveMeasure joint_pvm(const Matrix& p1, const Matrix& p2, double tol) {
  if (!projectors_coexistent(p1, p2, tol)) {
    throw CoexistenceError("joint_pvm: projectors do not commute (||[P1, P2]|| = " +
                           std::to_string(commutator_norm(p1, p2)) + ")");
  }
  const Matrix id = identity(p1.rows());
  const Matrix q1 = id - p1;
  const Matrix q2 = id - p2;
  return validate_pvm({hermitian_part(p1 * p2), hermitian_part(p1 * q2), hermitian_part(q1 * p2),
                       hermitian_part(q1 * q2)},
                      OutcomeSpace({"tt", "tf", "ft", "ff"}), std::max(tol, 1e-9));
}

// ---------------------------------------------------------------------------
// Smearing

StochasticKernel::StochasticKernel(RealMatrix weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("nonempty", "kernel has no entries");
  if (!weights_.allFinite()) throw ValidationError("finite", "kernel weights must be finite");
  if (weights_.minCoeff() < 0.0) {
    throw ValidationError("nonnegative", "kernel has a negative weight", -weights_.minCoeff());
  }
  for (Eigen::Index col = 0; col < weights_.cols(); ++col) {
    const double deviation = std::abs(weights_.col(col).sum() - 1.0);
    if (deviation > 1e-12) {
      throw ValidationError("column-stochastic",
                            "kernel column " + std::to_string(col) + " sums to " +
                                std::to_string(weights_.col(col).sum()) + ", not 1",
                            deviation);
    }
  }
}

StochasticKernel StochasticKernel::identity(Eigen::Index n) {
  return StochasticKernel(RealMatrix::Identity(n, n));
}

StochasticKernel StochasticKernel::flip(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("parameter-range", "flip probability must lie in [0, 1]");
  RealMatrix w(2, 2);
  w << 1.0 - eps, eps, eps, 1.0 - eps;
  return StochasticKernel(std::move(w));
}

StochasticKernel StochasticKernel::then(const StochasticKernel& after) const {
  if (after.inputs() != outputs()) throw DimensionError("kernel composition: shape mismatch");
  return StochasticKernel(after.weights() * weights_);
}

GeneralizedMeasure smear(const GeneralizedMeasure& measure, const StochasticKernel& kernel,
                         std::optional<OutcomeSpace> outcomes) {
  if (static_cast<std::size_t>(kernel.inputs()) != measure.size()) {
    throw DimensionError("smear: kernel has " + std::to_string(kernel.inputs()) +
                         " input columns but the measure has " + std::to_string(measure.size()) +
                         " outcomes");
  }
  if (!outcomes) {
    outcomes = static_cast<std::size_t>(kernel.outputs()) == measure.size()
                   ? measure.outcomes()
                   : OutcomeSpace::indexed(static_cast<std::size_t>(kernel.outputs()));
  }
  const Eigen::Index d = measure.dim();
  std::vector<Matrix> smeared;
  smeared.reserve(static_cast<std::size_t>(kernel.outputs()));
  for (Eigen::Index x = 0; x < kernel.outputs(); ++x) {
    Matrix acc = Matrix::Zero(d, d);
    for (Eigen::Index lambda = 0; lambda < kernel.inputs(); ++lambda) {
      kernels::axpy(kernel.weights()(x, lambda), reals(measure.effect(lambda).matrix()), reals(acc));
    }
    smeared.push_back(std::move(acc));
  }
  return validate_povm(smeared, std::move(*outcomes), 1e-8);
}

GeneralizedMeasure smear(const ProjectiveMeasure& measure, const StochasticKernel& kernel,
                         std::optional<OutcomeSpace> outcomes) {
  return smear(measure.as_povm(), kernel, std::move(outcomes));
}

GeneralizedMeasure unsharp_spin(const std::array<double, 3>& direction, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ValidationError("parameter-range", "unsharpness eta must lie in [0, 1]");
  }
  const Matrix n_sigma = spin_component(direction);
  const Matrix id = identity(2);
  return validate_povm({0.5 * (id + eta * n_sigma), 0.5 * (id - eta * n_sigma)},
                       OutcomeSpace({"+1", "-1"}, std::vector<double>{1.0, -1.0}));
}

// ---------------------------------------------------------------------------
// Moments and uncertainty

MomentOperator first_moment(const GeneralizedMeasure& povm) {
  const auto& values = povm.outcomes().values();
  if (!values) throw ValidationError("outcome-values", "first_moment: outcomes carry no values");
  const Eigen::Index d = povm.dim();
  MomentOperator out{Matrix::Zero(d, d)};
  for (std::size_t i = 0; i < povm.size(); ++i) {
    kernels::axpy((*values)[i], reals(povm.effect(i).matrix()), reals(out.matrix));
  }
  return out;
}

MomentOperator first_moment(const ProjectiveMeasure& pvm) { return first_moment(pvm.as_povm()); }

Moments expectation_variance(const DensityOperator& rho, const Matrix& a, double tol) {
  require_hermitian(a, tol, "observable");
  require_same_dim(rho.matrix(), a, "expectation_variance");
  const double mean = trace_product(rho.matrix(), a);
  const double second = trace_product(rho.matrix(), a * a);
  return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

RobertsonResult robertson_check(const DensityOperator& rho, const Matrix& a, const Matrix& b, double tol) {
  const Moments ma = expectation_variance(rho, a, tol);
  const Moments mb = expectation_variance(rho, b, tol);
  const Matrix commutator = a * b - b * a;
  const double rhs = 0.5 * std::abs((rho.matrix() * commutator).trace());
  const double lhs = ma.delta * mb.delta;
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

bool is_informationally_complete(const GeneralizedMeasure& povm) {
  const auto n = static_cast<Eigen::Index>(povm.size());
  RealMatrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      gram(i, j) = gram(j, i) = trace_product(povm.effect(static_cast<std::size_t>(i)).matrix(),
                                              povm.effect(static_cast<std::size_t>(j)).matrix());
    }
  }
  Eigen::JacobiSVD<RealMatrix> svd(gram);
  const RealVector& sigma = svd.singularValues();
  const double cutoff = 1e-8 * sigma(0);
  const auto rank = (sigma.array() > cutoff).count();
  return rank == povm.dim() * povm.dim();
}

double chsh_value(const DensityOperator& rho, const Matrix& a0, const Matrix& a1, const Matrix& b0,
                  const Matrix& b1, double tol) {
  require_spectrum_in_unit_ball(a0, tol, "A0");
  require_spectrum_in_unit_ball(a1, tol, "A1");
  require_spectrum_in_unit_ball(b0, tol, "B0");
  require_spectrum_in_unit_ball(b1, tol, "B1");
  require_same_dim(a0, a1, "chsh_value (A0, A1)");
  require_same_dim(b0, b1, "chsh_value (B0, B1)");
  if (rho.dim() != a0.rows() * b0.rows()) {
    throw DimensionError("chsh_value: state dimension " + std::to_string(rho.dim()) +
                         " is not dim(A) * dim(B) = " + std::to_string(a0.rows() * b0.rows()));
  }
  const Matrix bell = tensor(a0, b0 + b1) + tensor(a1, b0 - b1);
  return trace_product(rho.matrix(), bell);
}

}  // namespace povmkit
