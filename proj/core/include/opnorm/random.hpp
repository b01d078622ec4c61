#pragma once

// Reproducible random instances.
//
// SeededGenerator is SplitMix64 used in counter mode: the i-th 64-bit output
// (i = 1, 2, ...) is mix(seed + i * 0x9e3779b97f4a7c15) with the standard
// SplitMix64 finalizer. Uniform doubles take the top 53 bits. Gaussian
// pairs come from Box-Muller on (1 - u1, u2); a complex Gaussian uses one
// pair, (g1 + i g2) / sqrt(2). Matrices are filled in row-major order.
// The full recipe is repeated in docs/formats.md.

#include <cstdint>

#include "opnorm/cpmap.hpp"

namespace opnorm {

class SeededGenerator {
 public:
  explicit SeededGenerator(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  double gaussian();
  /// Standard complex Gaussian, E|z|^2 = 1.
  Complex complex_gaussian();

  /// Independent stream derived from (seed, stream) only; does not advance
  /// this generator.
  SeededGenerator fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

ComplexMatrix random_ginibre(SeededGenerator& gen, int rows, int cols);
/// QR of a Ginibre matrix with the phases of R's diagonal moved into Q.
ComplexMatrix random_haar_unitary(SeededGenerator& gen, int d);
ComplexMatrix random_hermitian(SeededGenerator& gen, int d);

AlgebraElement random_element(SeededGenerator& gen, const AlgebraShape& shape);
AlgebraElement random_self_adjoint(SeededGenerator& gen, const AlgebraShape& shape);
AlgebraElement random_positive(SeededGenerator& gen, const AlgebraShape& shape);
AlgebraElement random_unitary_element(SeededGenerator& gen, const AlgebraShape& shape);

/// Arbitrary linear map with Ginibre basis images.
LinearMapRep random_linear_map(SeededGenerator& gen, const AlgebraShape& domain, const AlgebraShape& codomain);

/// CP map with Choi blocks G G* (G Ginibre, one per domain/codomain block
/// pair), scaled so that ||u(1)|| = 1.
LinearMapRep random_cp_map(SeededGenerator& gen, const AlgebraShape& domain, const AlgebraShape& codomain);

/// random_cp_map conjugated by u(1)^{-1/2}, so u(1) = 1.
LinearMapRep random_unital_cp_map(SeededGenerator& gen, const AlgebraShape& domain, const AlgebraShape& codomain);

}  // namespace opnorm
