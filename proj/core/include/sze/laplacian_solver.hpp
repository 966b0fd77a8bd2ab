#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "sze/graph.hpp"

namespace sze {

/// Weighted combinatorial Laplacian L = D - W in compressed sparse rows.
class CsrLaplacian {
 public:
  explicit CsrLaplacian(const Graph& g);

  std::size_t size() const noexcept { return degree_.size(); }
  const std::vector<double>& degrees() const noexcept { return degree_; }

  /// y = L x
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  /// y = D^{-1/2} W D^{-1/2} x; every degree must be positive.
  void multiply_normalized_adjacency(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

 private:
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> column_;
  std::vector<double> weight_;
  std::vector<double> degree_;
};

struct CgStats {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradient for L x = b on a connected graph.
/// b must sum to zero (it is in the range of L).
class LaplacianCg {
 public:
  /// max_iterations = 0 selects 10 n.
  explicit LaplacianCg(const Graph& g, double tolerance = 1e-10, std::size_t max_iterations = 0);

  /// Mean-zero solution. Throws ConvergenceError when the relative residual
  /// does not reach the tolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, CgStats* stats = nullptr) const;

  /// x_i - x_j for L x = e_i - e_j.
  double resistance(Vertex i, Vertex j, CgStats* stats = nullptr) const;

  const CsrLaplacian& laplacian() const noexcept { return laplacian_; }

 private:
  CsrLaplacian laplacian_;
  double tolerance_;
  std::size_t max_iterations_;
};

/// L^+ = (L + J/n)^{-1} - J/n via a Cholesky factorization.
/// Throws DisconnectedGraphError when g is not connected.
Eigen::MatrixXd laplacian_pseudoinverse(const Graph& g);

/// Smallest eigenvalue of the symmetric operator `apply` restricted to the
/// orthogonal complement of `null_vector`. Lanczos with full
/// reorthogonalization from a seeded start vector; converged when the Ritz
/// residual is below `tolerance`. Throws ConvergenceError otherwise.
double lanczos_smallest(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                        const Eigen::VectorXd& null_vector, double tolerance,
                        std::size_t max_iterations, std::uint64_t seed = 0);

}  // namespace sze
