#include "povmkit/naimark.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "povmkit/errors.hpp"
#include "povmkit/random.hpp"

namespace povmkit {

namespace {

void require_capacity(Eigen::Index system, Eigen::Index ancilla) {
  if (system * ancilla > kMaxDim) {
    throw CapacityError("dilation: extended dimension " + std::to_string(system * ancilla) +
                        " exceeds the supported maximum " + std::to_string(kMaxDim));
  }
}

// I_system (x) |e_a><e_a| summed over the given ancilla levels.
Matrix ancilla_projector(Eigen::Index system, Eigen::Index ancilla, std::initializer_list<Eigen::Index> levels) {
  Matrix p = Matrix::Zero(system * ancilla, system * ancilla);
  for (Eigen::Index s = 0; s < system; ++s) {
    for (Eigen::Index a : levels) p(s * ancilla + a, s * ancilla + a) = 1.0;
  }
  return p;
}

Matrix build_isometry(const GeneralizedMeasure& povm, Eigen::Index ancilla) {
  const Eigen::Index d = povm.dim();
  Matrix v = Matrix::Zero(d * ancilla, d);
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Matrix root = sqrt_psd(povm.effect(i).matrix(), 1e-9);
    for (Eigen::Index s = 0; s < d; ++s) {
      v.row(s * ancilla + static_cast<Eigen::Index>(i)) = root.row(s);
    }
  }
  return v;
}

Matrix pad_ancilla(const Matrix& p, Eigen::Index system, Eigen::Index from, Eigen::Index to) {
  Matrix out = Matrix::Zero(system * to, system * to);
  for (Eigen::Index s = 0; s < system; ++s) {
    for (Eigen::Index a = 0; a < from; ++a) {
      for (Eigen::Index t = 0; t < system; ++t) {
        for (Eigen::Index b = 0; b < from; ++b) out(s * to + a, t * to + b) = p(s * from + a, t * from + b);
      }
    }
  }
  return out;
}

DilationResult padded_dilation(const GeneralizedMeasure& povm) {
  const Eigen::Index d = povm.dim();
  const auto n = static_cast<Eigen::Index>(povm.size());
  const Eigen::Index ancilla = n + 1;
  require_capacity(d, ancilla);

  std::vector<Matrix> projectors;
  for (Eigen::Index i = 0; i + 1 < n; ++i) projectors.push_back(ancilla_projector(d, ancilla, {i}));
  projectors.push_back(ancilla_projector(d, ancilla, {n - 1, n}));
  return {d, ancilla, build_isometry(povm, ancilla), validate_pvm(projectors, povm.outcomes())};
}

DilationResult rotated_dilation(const GeneralizedMeasure& povm, std::uint64_t seed) {
  DilationResult base = dilate(povm);
  CounterRng rng(seed, 0);
  const Matrix u = tensor(identity(base.system_dim), random_unitary(base.ancilla_dim, rng));
  std::vector<Matrix> projectors;
  for (const auto& p : base.extended_pvm.projectors()) projectors.push_back(u * p * u.adjoint());
  base.isometry = u * base.isometry;
  base.extended_pvm = validate_pvm(projectors, povm.outcomes());
  return base;
}

}  // namespace

Matrix DilationResult::embed(const DensityOperator& rho) const {
  if (rho.dim() != system_dim) throw DimensionError("embed: state dimension does not match the dilation");
  return isometry * rho.matrix() * isometry.adjoint();
}

double DilationResult::isometry_defect() const {
  return operator_norm(isometry.adjoint() * isometry - identity(system_dim));
}

DilationResult dilate(const GeneralizedMeasure& povm) {
  const Eigen::Index d = povm.dim();
  const auto n = static_cast<Eigen::Index>(povm.size());
  require_capacity(d, n);
  std::vector<Matrix> projectors;
  for (Eigen::Index i = 0; i < n; ++i) projectors.push_back(ancilla_projector(d, n, {i}));
  return {d, n, build_isometry(povm, n), validate_pvm(projectors, povm.outcomes())};
}

DilationResult alternate_dilation(const GeneralizedMeasure& povm, std::uint64_t variant_seed) {
  if (variant_seed == 0 || povm.size() == 1) return padded_dilation(povm);
  return rotated_dilation(povm, variant_seed);
}

double verify_dilation(const GeneralizedMeasure& povm, const DilationResult& dilation,
                       std::span<const DensityOperator> states) {
  if (dilation.system_dim != povm.dim()) throw DimensionError("verify_dilation: system dimension mismatch");
  if (dilation.extended_pvm.size() != povm.size()) throw DimensionError("verify_dilation: outcome count mismatch");
  double worst = 0.0;
  for (const auto& rho : states) {
    const Matrix extended = dilation.embed(rho);
    for (std::size_t i = 0; i < povm.size(); ++i) {
      const double dilated = trace_product(extended, dilation.extended_pvm.projectors()[i]);
      const double direct = trace_product(rho.matrix(), povm.effect(i).matrix());
      worst = std::max(worst, std::abs(dilated - direct));
    }
  }
  return worst;
}

double projector_family_distance(const DilationResult& a, const DilationResult& b) {
  if (a.system_dim != b.system_dim || a.extended_pvm.size() != b.extended_pvm.size()) {
    throw DimensionError("projector_family_distance: dilations of different measures");
  }
  const Eigen::Index ancilla = std::max(a.ancilla_dim, b.ancilla_dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.extended_pvm.size(); ++i) {
    const Matrix pa = pad_ancilla(a.extended_pvm.projectors()[i], a.system_dim, a.ancilla_dim, ancilla);
    const Matrix pb = pad_ancilla(b.extended_pvm.projectors()[i], b.system_dim, b.ancilla_dim, ancilla);
    worst = std::max(worst, operator_norm(pa - pb));
  }
  return worst;
}

}  // namespace povmkit
