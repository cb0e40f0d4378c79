#pragma once

#include "lbs/assembly.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace lbs {

enum class EigenMethod { Auto, Dense, ShiftInvertLanczos };

std::string_view to_string(EigenMethod method);
EigenMethod eigen_method_from_string(std::string_view name);

struct SolverSettings {
  EigenMethod method = EigenMethod::Auto;
  /// Auto uses the dense path up to this many DOFs.
  int dense_limit = 1200;
  double tol_eig = 1e-10;
  double tol_ortho = 1e-10;
  /// Remove the constant mode (the mean-zero constraint).
  bool deflate_constant = true;
  /// Shift for the Lanczos path. Defaults to a negative shift below the
  /// spectrum (A - sigma M is then positive definite).
  std::optional<double> shift;
  /// Block size of the Lanczos path; 0 picks min(m, 16) but at least 4.
  int block_size = 0;
  int max_basis = 0;  // 0: automatic
  std::uint64_t seed = 12345;
};

struct SpectralResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, M-orthonormal
  Eigen::VectorXd residual_norms;
  /// Rounding-error level of each residual; residuals are accepted below
  /// max(tol_eig, residual_floor).
  Eigen::VectorXd residual_floor;
  double ortho_defect = 0.0;  // max |U^T M U - I|
  double mean_defect = 0.0;   // max |1^T M U_i|
  EigenMethod method_used = EigenMethod::Dense;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Smallest m eigenpairs of A U = Lambda M U on {v : 1^T M v = 0}.
SpectralResult solve_smallest(const AssembledForms& forms, int m, const SolverSettings& settings = {});

/// Same on raw matrices. With deflation the constant vector spans the kernel of A.
SpectralResult solve_smallest(const SparseMatrix& a, const SparseMatrix& m_mat, int m,
                              const SolverSettings& settings = {});

/// Indices (0-based, into result.eigenvalues) of the `multiplicity` consecutive
/// discrete eigenvalues nearest `lambda`. Throws ClusterNotSeparated when the
/// gap to the rest of the computed spectrum is below the in-cluster spread, or
/// when the cluster touches the end of the computed range.
std::vector<int> match_cluster(const Eigen::VectorXd& eigenvalues, double lambda, int multiplicity);

inline std::vector<int> match_cluster(const SpectralResult& result, double lambda, int multiplicity) {
  return match_cluster(result.eigenvalues, lambda, multiplicity);
}

}  // namespace lbs
