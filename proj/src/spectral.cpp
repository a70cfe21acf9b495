#include "sumrate/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace sumrate {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

std::vector<bool> reachable(const MatrixXd& a, bool transpose) {
  const Index n = a.rows();
  std::vector<bool> seen(n, false);
  std::vector<Index> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j = 0; j < n; ++j) {
      const double e = transpose ? a(j, i) : a(i, j);
      if (e > 0.0 && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

// Shifted power iteration on A + sI from the all-ones vector. Returns the
// Collatz estimate of rho(A) and leaves the (sum-normalized) iterate in x.
// The shift makes imprimitive matrices such as [[0,1],[1,0]] converge.
double power_iterate(const MatrixXd& a, VectorXd& x,
                     const PowerIterationOptions& options) {
  const Index n = a.rows();
  const VectorXd row_sums = a.rowwise().sum();
  const double shift =
      std::max(0.5 * (row_sums.minCoeff() + row_sums.maxCoeff()), kTiny);

  x = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double estimate = std::numeric_limits<double>::infinity();
  for (long it = 1; it <= options.max_iterations; ++it) {
    VectorXd next = a * x + shift * x;
    const double total = next.sum();
    if (!(total > 0.0)) {
      throw ConvergenceError("power iteration collapsed to zero", it, 0.0);
    }
    next /= total;
    // x sums to one, so sum((A + sI) x) is the shifted Collatz average.
    const double updated = total - shift;
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    if (std::abs(updated - estimate) <=
            options.tolerance * std::max(std::abs(updated), 1e-300) &&
        change <= options.tolerance) {
      return std::max(updated, 0.0);
    }
    estimate = updated;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge after " << options.max_iterations
      << " iterations";
  throw ConvergenceError(msg.str(), options.max_iterations,
                         std::abs(estimate));
}

// Wielandt (inverse) iteration with a shift just above the estimate. For an
// irreducible nonnegative A and sigma > rho, (sigma I - A)^{-1} is positive,
// so a couple of steps pin the Perron vector to working precision.
double polish(const MatrixXd& a, VectorXd& x, double rho) {
  const Index n = a.rows();
  const double sigma = rho * (1.0 + 1e-8) + kTiny;
  const Eigen::PartialPivLU<MatrixXd> lu(
      sigma * MatrixXd::Identity(n, n) - a);
  for (int step = 0; step < 3; ++step) {
    VectorXd next = lu.solve(x);
    const double total = next.sum();
    if (!std::isfinite(total) || total == 0.0) break;
    next /= total;
    if (next.minCoeff() <= 0.0) break;
    x = std::move(next);
  }
  return (a * x).sum() / x.sum();
}

double perron_root(const MatrixXd& a, VectorXd& x,
                   const PowerIterationOptions& options) {
  if (a.rows() == 1) {
    x = VectorXd::Ones(1);
    return a(0, 0);
  }
  const double estimate = power_iterate(a, x, options);
  return polish(a, x, estimate);
}

std::vector<Index> surviving_indices(const MatrixXd& a) {
  std::vector<Index> keep(a.rows());
  for (Index i = 0; i < a.rows(); ++i) keep[i] = i;
  bool changed = true;
  while (changed && !keep.empty()) {
    changed = false;
    std::vector<Index> next;
    for (Index i : keep) {
      bool row_zero = true;
      bool col_zero = true;
      for (Index j : keep) {
        if (a(i, j) > 0.0) row_zero = false;
        if (a(j, i) > 0.0) col_zero = false;
      }
      if (row_zero || col_zero) {
        changed = true;
      } else {
        next.push_back(i);
      }
    }
    keep = std::move(next);
  }
  return keep;
}

void require_positive(const VectorXd& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw DomainError(std::string(what) + " must be positive and finite");
    }
  }
}

}  // namespace

NonnegMatrix::NonnegMatrix(MatrixXd entries) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    throw DomainError("matrix must be square with order >= 1");
  }
  for (Index i = 0; i < m_.rows(); ++i) {
    for (Index j = 0; j < m_.cols(); ++j) {
      if (!(m_(i, j) >= 0.0) || !std::isfinite(m_(i, j))) {
        std::ostringstream msg;
        msg << "matrix entry (" << i << "," << j
            << ") must be finite and nonnegative, got " << m_(i, j);
        throw DomainError(msg.str());
      }
    }
  }
}

bool is_irreducible(const MatrixXd& a) {
  if (a.rows() == 1) return true;
  const auto fwd = reachable(a, false);
  const auto bwd = reachable(a, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

double spectral_radius(const NonnegMatrix& a,
                       const PowerIterationOptions& options) {
  const auto keep = surviving_indices(a.matrix());
  if (keep.empty()) return 0.0;
  const Index n = static_cast<Index>(keep.size());
  MatrixXd sub(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) sub(i, j) = a(keep[i], keep[j]);

  VectorXd x;
  if (is_irreducible(sub)) return perron_root(sub, x, options);
  return power_iterate(sub, x, options);
}

PerronPair perron_pair(const NonnegMatrix& a,
                       const PowerIterationOptions& options) {
  const MatrixXd& m = a.matrix();
  if (!is_irreducible(m)) {
    throw DomainError("perron_pair requires an irreducible matrix");
  }
  PerronPair pair;
  pair.rho = perron_root(m, pair.right, options);
  const MatrixXd mt = m.transpose();
  perron_root(mt, pair.left, options);
  pair.right /= pair.right.sum();
  pair.left /= pair.right.dot(pair.left);
  return pair;
}

double fk_scaling_lower_bound(const NonnegMatrix& a, const VectorXd& gamma) {
  if (gamma.size() != a.order()) {
    throw DomainError("gamma size does not match matrix order");
  }
  for (Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] >= 0.0) || !std::isfinite(gamma[i])) {
      throw DomainError("gamma must be finite and nonnegative");
    }
  }
  const PerronPair pair = perron_pair(a);
  const VectorXd w = pair.product();
  double log_product = 0.0;
  for (Index l = 0; l < gamma.size(); ++l) {
    if (gamma[l] == 0.0) return 0.0;
    log_product += w[l] * std::log(gamma[l]);
  }
  return pair.rho * std::exp(log_product);
}

ZFormBound fk_z_upper_bound(const NonnegMatrix& a, const VectorXd& z,
                            double equality_tolerance) {
  if (z.size() != a.order()) {
    throw DomainError("z size does not match matrix order");
  }
  require_positive(z, "z");
  const PerronPair pair = perron_pair(a);
  const VectorXd w = pair.product();
  const VectorXd az = a.matrix() * z;

  ZFormBound out;
  double log_product = 0.0;
  for (Index l = 0; l < z.size(); ++l) {
    if (az[l] == 0.0) {
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    log_product += w[l] * std::log(az[l] / z[l]);
  }
  out.value = std::exp(log_product);

  const bool positive_diagonal = (a.matrix().diagonal().array() > 0.0).all();
  const double scale = z.sum() / pair.right.sum();
  const double deviation =
      (z.array() / (scale * pair.right.array()) - 1.0).abs().maxCoeff();
  out.equality = positive_diagonal && deviation <= equality_tolerance;
  return out;
}

Hyperplane supporting_hyperplane(const NonnegMatrix& b, const VectorXd& eta,
                                 double anchor_tolerance) {
  if (eta.size() != b.order()) {
    throw DomainError("anchor size does not match matrix order");
  }
  const NonnegMatrix scaled(eta.array().exp().matrix().asDiagonal() *
                            b.matrix());
  const PerronPair pair = perron_pair(scaled);
  if (std::abs(pair.rho - 1.0) > anchor_tolerance) {
    std::ostringstream msg;
    msg << "anchor is not on the unit spectral radius level set (rho = "
        << pair.rho << ")";
    throw PreconditionError(msg.str(), pair.rho);
  }
  return Hyperplane{pair.product(), eta};
}

ScalingPair diagonal_scaling(const NonnegMatrix& a, const VectorXd& u,
                             const VectorXd& v,
                             const ScalingOptions& options) {
  const MatrixXd& m = a.matrix();
  const Index n = a.order();
  if (u.size() != n || v.size() != n) {
    throw DomainError("scaling targets do not match matrix order");
  }
  require_positive(u, "u");
  require_positive(v, "v");
  if (!is_irreducible(m)) {
    throw DomainError("diagonal scaling requires an irreducible matrix");
  }

  ScalingPair out;
  const VectorXd w = u.cwiseProduct(v) / u.cwiseProduct(v).sum();
  bool zero_diagonal_seen = false;
  for (Index l = 0; l < n; ++l) {
    if (m(l, l) > 0.0) continue;
    zero_diagonal_seen = true;
    const double slack = (1.0 - w[l]) - w[l];
    if (slack < -options.majorization_slack) {
      std::ostringstream msg;
      msg << "majorization condition fails at index " << l
          << ": sum of other weights " << 1.0 - w[l] << " < weight " << w[l];
      throw InfeasibleError(msg.str(), slack, l);
    }
    if (slack <= options.majorization_slack) {
      // On the boundary the scaled matrix must vanish off row and column l,
      // which positive off-diagonals allow only for two zero diagonals.
      const Index other = 1 - l;
      if (n != 2 || m(other, other) > 0.0) {
        std::ostringstream msg;
        msg << "majorization condition is tight at index " << l
            << " and the scaling has no finite solution";
        throw InfeasibleError(msg.str(), slack, l);
      }
      out.majorization_boundary = true;
    }
  }
  if (zero_diagonal_seen) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && !(m(i, j) > 0.0)) {
          throw DomainError(
              "a zero diagonal entry requires positive off-diagonal entries");
        }
  }

  VectorXd g = options.initial_column_scaling.size() == n
                   ? options.initial_column_scaling
                   : VectorXd::Ones(n);
  require_positive(g, "initial column scaling");
  VectorXd f(n);
  const MatrixXd mt = m.transpose();
  double residual = std::numeric_limits<double>::infinity();
  long sweep = 0;
  while (sweep < options.max_sweeps) {
    ++sweep;
    f = u.array() / (m * g.cwiseProduct(u)).array();
    g = v.array() / (mt * f.cwiseProduct(v)).array();
    if (!f.allFinite() || !g.allFinite()) break;
    const VectorXd row = f.cwiseProduct(m * g.cwiseProduct(u));
    residual = (row.array() / u.array() - 1.0).abs().maxCoeff();
    if (residual <= options.tolerance) break;
  }
  if (!(residual <= options.tolerance)) {
    std::ostringstream msg;
    msg << "diagonal scaling did not converge after " << sweep
        << " sweeps (relative residual " << residual << ")";
    throw ConvergenceError(msg.str(), sweep, residual);
  }

  const double t = std::sqrt(g.maxCoeff() / f.maxCoeff());
  out.d1 = f * t;
  out.d2 = g / t;
  out.sweeps = sweep;
  const MatrixXd scaled = out.d1.asDiagonal() * m * out.d2.asDiagonal();
  out.right_residual = (scaled * u - u).lpNorm<Eigen::Infinity>();
  out.left_residual =
      (scaled.transpose() * v - v).lpNorm<Eigen::Infinity>();
  return out;
}

VectorXd inverse_weight(const NonnegMatrix& b, const VectorXd& w,
                        const ScalingOptions& options) {
  const Index n = b.order();
  if (w.size() != n) throw DomainError("weight size does not match order");
  require_positive(w, "weights");
  if (std::abs(w.sum() - 1.0) > 1e-9) {
    throw DomainError("weights must sum to one");
  }
  // D1 B D2 1 = 1 and w^T D1 B D2 = w^T make diag(d2 d1) B similar to a
  // matrix with Perron vectors 1 and w, hence x∘y = w and rho = 1.
  const ScalingPair s = diagonal_scaling(b, VectorXd::Ones(n), w, options);
  VectorXd eta = (s.d1.cwiseProduct(s.d2)).array().log().matrix();
  const double rho = spectral_radius(
      NonnegMatrix(eta.array().exp().matrix().asDiagonal() * b.matrix()));
  eta.array() -= std::log(rho);
  return eta;
}

}  // namespace sumrate
