#include "povmkit/states_effects.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "povmkit/errors.hpp"

namespace povmkit {

DensityOperator DensityOperator::from_matrix(const Matrix& m, double tol) {
  require_hermitian(m, tol, "state");
  Matrix h = hermitian_part(m);
  const double lowest = eigenvalues_hermitian(h)(0);
  if (lowest < -tol) {
    throw ValidationError("positive",
                          "state: eigenvalue " + std::to_string(lowest) + " below 0", -lowest);
  }
  const double trace = h.trace().real();
  if (std::abs(trace - 1.0) > tol) {
    throw ValidationError("unit-trace", "state: trace " + std::to_string(trace) + " differs from 1",
                          std::abs(trace - 1.0));
  }
  return DensityOperator(std::move(h));
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("normalizable", "pure state: vector has zero or non-finite norm");
  }
  const Vector v = psi / norm;
  Matrix m = v * v.adjoint();
  require_operator(m, "pure state");
  return DensityOperator(hermitian_part(m));
}

DensityOperator DensityOperator::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw DimensionError("basis state index out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  require_operator(m, "basis state");
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
  Matrix m = identity(dim) / static_cast<double>(dim);
  require_operator(m, "maximally mixed state");
  return DensityOperator(std::move(m));
}

Effect Effect::from_matrix(const Matrix& m, double tol) {
  require_hermitian(m, tol, "effect");
  Matrix h = hermitian_part(m);
  const RealVector spectrum = eigenvalues_hermitian(h);
  const double lo = spectrum(0);
  const double hi = spectrum(spectrum.size() - 1);
  if (lo < -tol) {
    throw ValidationError("effect-lower-bound",
                          "effect: eigenvalue " + std::to_string(lo) + " below 0 (O <= E violated)",
                          -lo);
  }
  if (hi > 1.0 + tol) {
    throw ValidationError("effect-upper-bound",
                          "effect: eigenvalue " + std::to_string(hi) + " above 1 (E <= I violated)",
                          hi - 1.0);
  }
  Matrix c = identity(h.rows()) - h;
  return Effect(std::move(h), std::move(c));
}

Effect Effect::zero(Eigen::Index dim) { return from_matrix(Matrix::Zero(dim, dim)); }
Effect Effect::unit(Eigen::Index dim) { return from_matrix(identity(dim)); }
Effect Effect::semitransparent(Eigen::Index dim) { return from_matrix(0.5 * identity(dim)); }

std::string_view to_string(EffectClass c) noexcept {
  switch (c) {
    case EffectClass::TrivialO: return "Trivial-O";
    case EffectClass::TrivialI: return "Trivial-I";
    case EffectClass::Semitransparent: return "Semitransparent";
    case EffectClass::SharpProjection: return "SharpProjection";
    case EffectClass::Regular: return "Regular";
    case EffectClass::BelowSemitransparent: return "BelowSemitransparent";
    case EffectClass::AboveSemitransparent: return "AboveSemitransparent";
  }
  return "unknown";
}

double born_probability(const DensityOperator& rho, const Effect& e, double tol) {
  require_same_dim(rho.matrix(), e.matrix(), "born_probability");
  const double w = trace_product(rho.matrix(), e.matrix());
  if (w < -tol || w > 1.0 + tol) {
    throw ConsistencyError("born_probability: " + std::to_string(w) + " outside [0, 1]");
  }
  return std::clamp(w, 0.0, 1.0);
}

bool is_effect(const Matrix& h, double tol) {
  require_hermitian(h, tol, "is_effect");
  const RealVector spectrum = eigenvalues_hermitian(h);
  return spectrum(0) >= -tol && spectrum(spectrum.size() - 1) <= 1.0 + tol;
}

bool is_sharp(const Effect& e, double tol) {
  const Matrix& m = e.matrix();
  return operator_norm(m * m - m) <= tol;
}

bool is_regular(const Effect& e, double tol) {
  const RealVector shifted = eigenvalues_hermitian(e.matrix()).array() - 0.5;
  return shifted(shifted.size() - 1) > tol && shifted(0) < -tol;
}

bool is_real_in_state(const Effect& e, const DensityOperator& rho, double tol) {
  const double w = born_probability(rho, e, tol);
  return w <= tol || w >= 1.0 - tol;
}

EffectClass classify(const Effect& e, double tol) {
  const RealVector spectrum = eigenvalues_hermitian(e.matrix());
  const double lo = spectrum(0);
  const double hi = spectrum(spectrum.size() - 1);
  if (hi <= tol) return EffectClass::TrivialO;
  if (lo >= 1.0 - tol) return EffectClass::TrivialI;
  if (lo >= 0.5 - tol && hi <= 0.5 + tol) return EffectClass::Semitransparent;
  if (is_sharp(e, tol)) return EffectClass::SharpProjection;
  if (is_regular(e, tol)) return EffectClass::Regular;
  if (hi <= 0.5 + tol) return EffectClass::BelowSemitransparent;
  return EffectClass::AboveSemitransparent;
}

std::optional<DensityOperator> born_violation_witness(const Matrix& h, double tol) {
  require_hermitian(h, tol, "born_violation_witness");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  const RealVector& values = solver.eigenvalues();
  const Eigen::Index last = values.size() - 1;
  const double below = -values(0);
  const double above = values(last) - 1.0;
  if (std::max(below, above) <= tol) return std::nullopt;
  const Eigen::Index pick = above >= below ? last : 0;
  return DensityOperator::pure(solver.eigenvectors().col(pick));
}

std::vector<DensityOperator> spanning_states(Eigen::Index dim) {
  std::vector<DensityOperator> states;
  states.reserve(static_cast<std::size_t>(dim * dim));
  for (Eigen::Index j = 0; j < dim; ++j) states.push_back(DensityOperator::basis(dim, j));
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      Vector plus = Vector::Zero(dim);
      plus(j) = 1.0;
      plus(k) = 1.0;
      states.push_back(DensityOperator::pure(plus));
      Vector phase = Vector::Zero(dim);
      phase(j) = 1.0;
      phase(k) = cplx(0.0, 1.0);
      states.push_back(DensityOperator::pure(phase));
    }
  }
  return states;
}

}  // namespace povmkit
