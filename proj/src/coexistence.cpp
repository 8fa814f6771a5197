#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "povmkit/errors.hpp"
#include "povmkit/observables.hpp"
#include "povmkit/random.hpp"

namespace povmkit {

namespace {

// Hermitian 2x2 operator as m0 I + m . sigma.
struct Bloch {
  double m0;
  std::array<double, 3> m;
};

Bloch to_bloch(const Matrix& op) {
  return {0.5 * op.trace().real(),
          {0.5 * (op * pauli_x()).trace().real(), 0.5 * (op * pauli_y()).trace().real(),
           0.5 * (op * pauli_z()).trace().real()}};
}

Matrix from_bloch(const std::array<double, 4>& p) {
  return p[0] * identity(2) + p[1] * pauli_x() + p[2] * pauli_y() + p[3] * pauli_z();
}

double length(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

// Closed-form residual for the qubit: eigenvalues of m0 I + m.sigma are m0 +- |m|.
double qubit_residual(const Bloch& a, const Bloch& b, const std::array<double, 4>& g) {
  const double r_g = g[0] - length(g[1], g[2], g[3]);
  const double r_a = (a.m0 - g[0]) - length(a.m[0] - g[1], a.m[1] - g[2], a.m[2] - g[3]);
  const double r_b = (b.m0 - g[0]) - length(b.m[0] - g[1], b.m[1] - g[2], b.m[2] - g[3]);
  const double r_c = (1.0 - a.m0 - b.m0 + g[0]) -
                     length(g[1] - a.m[0] - b.m[0], g[2] - a.m[1] - b.m[1], g[3] - a.m[2] - b.m[2]);
  return std::min({r_g, r_a, r_b, r_c});
}

struct GridBest {
  std::array<double, 4> point;
  double residual;
};

// Coarse-to-fine search over (g0, gx, gy, gz). 0 <= G <= I confines the start
// box to g0 in [0, 1] and each g_i in [-1/2, 1/2].
GridBest qubit_grid(const Matrix& a_plus, const Matrix& b_plus, const CoexistenceOptions& opt) {
  const Bloch a = to_bloch(a_plus);
  const Bloch b = to_bloch(b_plus);
  std::array<double, 4> center{0.5, 0.0, 0.0, 0.0};
  double half = 0.5;
  const int k = std::max(2, opt.grid_points);

  GridBest best{center, qubit_residual(a, b, center)};
  for (int level = 0; level < opt.grid_depth; ++level) {
    std::array<double, 4> p{};
    std::array<double, 4> lo{};
    for (int axis = 0; axis < 4; ++axis) lo[axis] = center[axis] - half;
    const double step = 2.0 * half / (k - 1);
    for (int i0 = 0; i0 < k; ++i0) {
      p[0] = lo[0] + step * i0;
      for (int i1 = 0; i1 < k; ++i1) {
        p[1] = lo[1] + step * i1;
        for (int i2 = 0; i2 < k; ++i2) {
          p[2] = lo[2] + step * i2;
          for (int i3 = 0; i3 < k; ++i3) {
            p[3] = lo[3] + step * i3;
            const double r = qubit_residual(a, b, p);
            if (r > best.residual) best = {p, r};
          }
        }
      }
    }
    center = best.point;
    half /= opt.grid_refinement;
  }
  return best;
}

struct Constraints {
  const Matrix& a_plus;
  const Matrix& b_plus;
  Matrix complement_base;  // I - A+ - B+
};

// Part of (M - delta I) below zero.
Matrix negative_part(const Matrix& m, double delta, double& penalty) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  RealVector values = solver.eigenvalues().array() - delta;
  values = values.cwiseMin(0.0);
  penalty += values.squaredNorm();
  if (values.isZero(0.0)) return Matrix::Zero(m.rows(), m.cols());
  const Matrix& v = solver.eigenvectors();
  return v * values.asDiagonal() * v.adjoint();
}

// Gradient descent on sum_k ||(M_k(G) - delta I)_-||_F^2 with
// M = {G, A+ - G, B+ - G, I - A+ - B+ + G}.
Matrix penalty_descent(Matrix g, const Constraints& c, double delta, int iterations) {
  constexpr double kStep = 0.125;  // 1 / Lipschitz constant of the gradient
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    double penalty = 0.0;
    const Matrix grad = 2.0 * (negative_part(g, delta, penalty) -
                               negative_part(c.a_plus - g, delta, penalty) -
                               negative_part(c.b_plus - g, delta, penalty) +
                               negative_part(c.complement_base + g, delta, penalty));
    if (penalty == 0.0) break;
    if (it % 100 == 99) {
      if (previous - penalty <= 1e-14 * previous) break;
      previous = penalty;
    }
    g = hermitian_part(g - kStep * grad);
  }
  return g;
}

Matrix random_start(Eigen::Index d, CounterRng& rng) {
  Matrix x(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) x(i, j) = cplx(rng.normal(), rng.normal());
  }
  Matrix w = x * x.adjoint();
  const double top = eigenvalues_hermitian(w).maxCoeff();
  return (0.5 * rng.uniform() / top) * w;
}

CoexistenceResult finish(const GeneralizedMeasure& a, const GeneralizedMeasure& b, Matrix g,
                         double residual, std::string method, double tol) {
  CoexistenceResult out;
  out.residual = residual;
  out.found = residual >= -tol;
  out.method = std::move(method);
  out.g = hermitian_part(g);
  if (out.found) {
    const Matrix& ap = a.effect(0).matrix();
    const Matrix& bp = b.effect(0).matrix();
    const Matrix id = identity(ap.rows());
    out.joint = validate_povm({out.g, ap - out.g, bp - out.g, id - ap - bp + out.g},
                              OutcomeSpace({"++", "+-", "-+", "--"}), std::max(tol, 1e-9));
  }
  return out;
}

}  // namespace

double coexistence_residual(const Matrix& a_plus, const Matrix& b_plus, const Matrix& g) {
  require_same_dim(a_plus, b_plus, "coexistence_residual");
  require_same_dim(a_plus, g, "coexistence_residual");
  const Matrix id = identity(g.rows());
  return std::min({eigenvalues_hermitian(g)(0), eigenvalues_hermitian(a_plus - g)(0),
                   eigenvalues_hermitian(b_plus - g)(0),
                   eigenvalues_hermitian(id - a_plus - b_plus + g)(0)});
}

CoexistenceResult coexist_binary_povms(const GeneralizedMeasure& a, const GeneralizedMeasure& b,
                                       const CoexistenceOptions& options) {
  if (a.size() != 2) throw ValidationError("binary", "coexist: first measure is not binary");
  if (b.size() != 2) throw ValidationError("binary", "coexist: second measure is not binary");
  if (a.dim() != b.dim()) throw DimensionError("coexist: measures act on different dimensions");

  const Matrix& ap = a.effect(0).matrix();
  const Matrix& bp = b.effect(0).matrix();
  const double tol = options.tol;

  // Closed-form joints first: identical measures, then commuting ones.
  if ((ap - bp).cwiseAbs().maxCoeff() <= tol) {
    const double r = coexistence_residual(ap, bp, ap);
    if (r >= -tol) return finish(a, b, ap, r, "identical", tol);
  }
  if (commutator_norm(ap, bp) <= tol) {
    const Matrix g = hermitian_part(ap * bp);
    const double r = coexistence_residual(ap, bp, g);
    if (r >= -tol) return finish(a, b, g, r, "commuting-product", tol);
  }

  const Constraints constraints{ap, bp, identity(ap.rows()) - ap - bp};
  constexpr std::array<double, 4> kMargins{1e-3, 1e-5, 1e-7, 0.0};

  Matrix best_g;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Matrix& g) {
    const double r = coexistence_residual(ap, bp, g);
    if (r > best) {
      best = r;
      best_g = g;
    }
  };
  auto polish = [&](Matrix g) {
    for (double margin : kMargins) {
      g = penalty_descent(std::move(g), constraints, margin, options.polish_iterations);
      consider(g);
      if (best >= -tol) break;
    }
  };

  if (a.dim() == 2) {
    const GridBest grid = qubit_grid(ap, bp, options);
    consider(from_bloch(grid.point));
    if (best < -tol) polish(from_bloch(grid.point));
    return finish(a, b, best_g, best, "qubit-grid", tol);
  }

  for (int start = 0; start < options.starts && best < -tol; ++start) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(start));
    polish(start == 0 ? Matrix(0.25 * (ap + bp)) : random_start(a.dim(), rng));
  }
  return finish(a, b, best_g, best, "multi-start-penalty", tol);
}

}  // namespace povmkit
