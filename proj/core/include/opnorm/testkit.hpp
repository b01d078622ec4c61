#pragma once

// Random tensors and a brute-force oracle for min-norm lower bounds that
// shares no code with the see-saw.

#include <vector>

#include "opnorm/random.hpp"
#include "opnorm/tensorcalc.hpp"

namespace opnorm {

/// n Ginibre coefficients in M_d, scaled by 1/sqrt(d); coeffs[0] is the unit slot.
FreeTensor random_free_tensor(SeededGenerator& gen, int n, int d);

struct GridOracleOptions {
  /// Grid points per angle (n = 2 and n = 3 respectively).
  int points_two = 9;
  int points_three = 4;
  /// Best grid points that get polished.
  int polish_starts = 32;
  double polish_tol = 1e-10;
};

struct GridOracleResult {
  double value = 0.0;
  std::vector<ComplexMatrix> unitaries;
  long evaluations = 0;
};

/// max ||sum_i u_i (x) x_i|| over u_i in U(d), d <= 2, n <= 3, by a grid
/// over angles followed by coordinate pattern search. u_1 = 1 without loss
/// of generality. Throws ShapeError outside that range.
GridOracleResult grid_oracle_min_norm(const std::vector<ComplexMatrix>& x, const GridOracleOptions& options = {});

/// e^{i phi} [[e^{i alpha} cos theta, e^{i beta} sin theta], [-e^{-i beta} sin theta, e^{-i alpha} cos theta]].
ComplexMatrix u2_from_angles(double phi, double alpha, double beta, double theta);

}  // namespace opnorm
