#include "sze/laplacian_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sze/error.hpp"
#include "sze/rng.hpp"

namespace sze {

CsrLaplacian::CsrLaplacian(const Graph& g) : degree_(g.size(), 0.0) {
  const std::size_t n = g.size();
  const auto& w = g.weights();
  row_start_.reserve(n + 1);
  row_start_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double value = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (value == 0.0) continue;
      column_.push_back(j);
      weight_.push_back(value);
      degree_[i] += value;
    }
    row_start_.push_back(column_.size());
  }
}

void CsrLaplacian::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const std::size_t n = size();
  y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double sum = degree_[i] * x(static_cast<Eigen::Index>(i));
    for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e) {
      sum -= weight_[e] * x(static_cast<Eigen::Index>(column_[e]));
    }
    y(static_cast<Eigen::Index>(i)) = sum;
  }
}

void CsrLaplacian::multiply_normalized_adjacency(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const std::size_t n = size();
  y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e) {
      sum += weight_[e] * x(static_cast<Eigen::Index>(column_[e])) / std::sqrt(degree_[column_[e]]);
    }
    y(static_cast<Eigen::Index>(i)) = sum / std::sqrt(degree_[i]);
  }
}

LaplacianCg::LaplacianCg(const Graph& g, double tolerance, std::size_t max_iterations)
    : laplacian_(g), tolerance_(tolerance), max_iterations_(max_iterations ? max_iterations : 10 * g.size()) {
  if (!is_connected(g)) throw DisconnectedGraphError("resistance: graph is disconnected");
  if (!(tolerance > 0.0)) throw PreconditionError("CG tolerance must be positive");
}

Eigen::VectorXd LaplacianCg::solve(const Eigen::VectorXd& b, CgStats* stats) const {
  const auto n = static_cast<Eigen::Index>(laplacian_.size());
  if (b.size() != n) throw PreconditionError("CG: right-hand side has the wrong size");
  const double b_norm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (b_norm == 0.0) return x;

  Eigen::VectorXd inverse_diagonal(n);
  for (Eigen::Index i = 0; i < n; ++i) inverse_diagonal(i) = 1.0 / laplacian_.degrees()[static_cast<std::size_t>(i)];

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inverse_diagonal.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(n);
  double rz = r.dot(z);
  double relative = 1.0;
  std::size_t it = 0;
  for (; it < max_iterations_; ++it) {
    laplacian_.multiply(p, q);
    const double alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    relative = r.norm() / b_norm;
    if (relative <= tolerance_) {
      ++it;
      break;
    }
    z = inverse_diagonal.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (stats) *stats = {it, relative};
  if (relative > tolerance_) {
    throw ConvergenceError("CG stopped after " + std::to_string(it) +
                           " iterations at relative residual " + std::to_string(relative));
  }
  x.array() -= x.mean();
  return x;
}

double LaplacianCg::resistance(Vertex i, Vertex j, CgStats* stats) const {
  const std::size_t n = laplacian_.size();
  if (i >= n || j >= n) throw PreconditionError("resistance: vertex out of range");
  if (i == j) return 0.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  b(static_cast<Eigen::Index>(i)) = 1.0;
  b(static_cast<Eigen::Index>(j)) = -1.0;
  const Eigen::VectorXd x = solve(b, stats);
  return x(static_cast<Eigen::Index>(i)) - x(static_cast<Eigen::Index>(j));
}

Eigen::MatrixXd laplacian_pseudoinverse(const Graph& g) {
  if (!is_connected(g)) throw DisconnectedGraphError("resistance: graph is disconnected");
  const auto n = static_cast<Eigen::Index>(g.size());
  const double shift = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd shifted = -g.weights();
  shifted.diagonal() += g.degrees();
  shifted.array() += shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) throw ConvergenceError("Laplacian factorization failed");
  Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
  inverse.array() -= shift;
  return inverse;
}

double lanczos_smallest(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                        const Eigen::VectorXd& null_vector, double tolerance,
                        std::size_t max_iterations, std::uint64_t seed) {
  const Eigen::Index n = null_vector.size();
  if (n < 2) throw PreconditionError("Lanczos: need at least two dimensions");
  const Eigen::VectorXd u = null_vector.normalized();
  const auto steps = static_cast<Eigen::Index>(std::min<std::size_t>(max_iterations, static_cast<std::size_t>(n - 1)));

  Rng rng = Rng::derive(seed, 0x1a2c);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  v -= u.dot(v) * u;
  v.normalize();

  Eigen::MatrixXd basis(n, steps);
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd w(n);
  for (Eigen::Index m = 0; m < steps; ++m) {
    basis.col(m) = v;
    apply(v, w);
    alpha.push_back(v.dot(w));
    // Full reorthogonalization against the null vector and every basis
    // vector, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      w -= u.dot(w) * u;
      w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
    }
    const double b = w.norm();

    const auto size = m + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < size) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    const double ritz = eig.eigenvalues()(0);
    const double residual = b * std::abs(eig.eigenvectors()(size - 1, 0));
    if (residual <= tolerance * std::max(1.0, std::abs(ritz)) || b <= 1e-14 || size == n - 1) {
      return ritz;
    }
    beta.push_back(b);
    v = w / b;
  }
  throw ConvergenceError("Lanczos did not converge in " + std::to_string(steps) + " steps");
}

}  // namespace sze
