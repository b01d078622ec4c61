#pragma once

// Dense conic solver for
//
//   minimize    c . y
//   subject to  F_0^(b) + sum_k y_k F_k^(b)  is PSD   for every block b
//               A y = b                             (optional)
//
// with complex Hermitian blocks and real variables y. Coefficient matrices
// are stored sparsely since every program built by this library touches
// only a handful of entries per variable.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "opnorm/matrix.hpp"

namespace opnorm {

struct HermitianEntry {
  int row = 0;
  int col = 0;
  Complex value;
};

/// Sparse Hermitian matrix; both triangles are stored explicitly.
class SparseHermitian {
 public:
  /// Adds v at (row, col) and conj(v) at (col, row). On the diagonal only
  /// the real part is kept.
  void add(int row, int col, Complex value);

  const std::vector<HermitianEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  ComplexMatrix dense(int dim) const;
  /// Re tr(F M).
  double inner(const ComplexMatrix& m) const;
  void add_to(ComplexMatrix& target, double scale) const;

 private:
  std::vector<HermitianEntry> entries_;
};

struct PsdBlock {
  int dim = 0;
  ComplexMatrix constant;
  std::map<int, SparseHermitian> terms;  // variable index -> coefficient
};

class ConicProgram {
 public:
  int add_variable(double cost = 0.0);
  int add_block(int dim);
  void add_constant(int block, int row, int col, Complex value);
  void set_constant(int block, const ComplexMatrix& value);
  void add_term(int block, int variable, int row, int col, Complex value);
  void add_equality(const std::vector<std::pair<int, double>>& coefficients, double rhs);

  int variable_count() const { return static_cast<int>(objective_.size()); }
  const RealVector& objective() const { return objective_; }
  const std::vector<PsdBlock>& blocks() const { return blocks_; }
  const RealMatrix& equality_matrix() const { return eq_matrix_; }
  const RealVector& equality_rhs() const { return eq_rhs_; }

  /// F_0 + sum_k y_k F_k on block b.
  ComplexMatrix block_value(int block, const RealVector& y) const;
  /// Throws ShapeError / NumericalError on malformed data.
  void validate() const;

 private:
  RealVector objective_;
  std::vector<PsdBlock> blocks_;
  RealMatrix eq_matrix_;
  RealVector eq_rhs_;
};

enum class SolveStatus { optimal, max_iterations, infeasible_suspected };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 20000;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::max_iterations;
  double primal_value = 0.0;
  RealVector y;
  double dual_value = 0.0;
  /// max(0, -lambda_min) over the blocks evaluated at y.
  double psd_residual = 0.0;
  /// ||A y - b||_inf.
  double equality_residual = 0.0;
  /// primal_value - dual_value.
  double gap = 0.0;
  /// ||c - A^*(Z) - A^T lambda||_inf for the returned dual point.
  double dual_residual = 0.0;
  std::vector<ComplexMatrix> dual_blocks;
  RealVector equality_multipliers;
  int iterations = 0;
  std::string message;
};

/// Primal-dual interior-point path following (HKM direction with a
/// Mehrotra predictor-corrector). Deterministic: fixed iteration order, no
/// randomness. On status optimal,
///   gap <= gap_tol * max(1, |primal_value|),
///   psd_residual <= feas_tol * max(1, ||F_0||), and
///   dual_residual <= feas_tol * max(1, ||c||_inf).
/// Primal infeasibility is reported only heuristically, when the dual
/// iterates approach a Farkas ray.
ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});

struct CertificateReport {
  bool clean = true;
  double psd_residual = 0.0;
  double equality_residual = 0.0;
  double objective = 0.0;
  double dual_objective = 0.0;
  double dual_residual = 0.0;
  double dual_psd_residual = 0.0;
  double gap = 0.0;
  std::vector<std::string> issues;
};

/// Recomputes every residual and both objectives from (program, y, Z)
/// without reusing solver state, and flags anything that disagrees with
/// the reported numbers, or exceeds tol, by more than tol.
CertificateReport verify_certificate(const ConicProgram& program, const ConicSolution& solution, double tol);

/// Plain-text dump of a program and its solution (format in docs/formats.md).
void write_diagnostic(std::ostream& out, const ConicProgram& program, const ConicSolution& solution);

}  // namespace opnorm
