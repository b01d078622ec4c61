#pragma once

// Linear maps between finite-dimensional C*-algebras.
//
// A map u: A -> B is stored as the images of the matrix-unit basis of A,
// ordered block by block and row-major inside a block: for block i of size
// d_i the image of e^{(i)}_{rs} sits at index basis_offset(i) + r * d_i + s.
//
// Choi convention: for domain block i the Choi matrix is
//   C_i = sum_{r,s} e_{rs} (x) u(e^{(i)}_{rs}),
// the domain index is the major (outer) tensor factor and the codomain is
// embedded block-diagonally. For the identity map on M_2 this gives
//
//   [ 1 0 0 1 ]
//   [ 0 0 0 0 ]      row/column (r, a) -> 2 r + a
//   [ 0 0 0 0 ]
//   [ 1 0 0 1 ]
//
// Maps on l_inf^n (shape (1,...,1)) are simply the list of the n images
// x_j = u(e_j); see from_linf_images / linf_images.

#include <vector>

#include "opnorm/algebra.hpp"

namespace opnorm {

class LinearMapRep {
 public:
  LinearMapRep() = default;
  LinearMapRep(AlgebraShape domain, AlgebraShape codomain, std::vector<AlgebraElement> images);

  static LinearMapRep identity(const AlgebraShape& shape);
  static LinearMapRep zero(const AlgebraShape& domain, const AlgebraShape& codomain);
  /// T: l_inf^n -> A, e_j -> x_j.
  static LinearMapRep from_linf_images(const std::vector<AlgebraElement>& x);
  /// Inverse of choi(); off-block-diagonal codomain entries are ignored.
  static LinearMapRep from_choi(const AlgebraShape& domain, const AlgebraShape& codomain,
                                const std::vector<ComplexMatrix>& choi_blocks);

  const AlgebraShape& domain() const { return domain_; }
  const AlgebraShape& codomain() const { return codomain_; }
  const std::vector<AlgebraElement>& images() const { return images_; }
  const AlgebraElement& image(int basis_index) const { return images_[basis_index]; }
  /// Image of e^{(block)}_{rs}.
  const AlgebraElement& image(std::size_t block, int r, int s) const;

  /// Images x_j for an l_inf^n domain.
  const std::vector<AlgebraElement>& linf_images() const;

  LinearMapRep& operator+=(const LinearMapRep& other);
  LinearMapRep& operator*=(Complex alpha);

 private:
  AlgebraShape domain_;
  AlgebraShape codomain_;
  std::vector<AlgebraElement> images_;
};

LinearMapRep operator+(LinearMapRep u, const LinearMapRep& v);
LinearMapRep operator*(Complex alpha, LinearMapRep u);

/// One Choi matrix per domain block, of size d_i * representation_size(B).
std::vector<ComplexMatrix> choi(const LinearMapRep& u);

/// Every Choi block PSD within tol.
bool is_cp(const LinearMapRep& u, double tol = 1e-9);
/// Smallest eigenvalue over all Choi blocks.
double choi_min_eigenvalue(const LinearMapRep& u);

/// u_*(x) = u(x*)*.
LinearMapRep star_map(const LinearMapRep& u);

AlgebraElement apply(const LinearMapRep& u, const AlgebraElement& x);

/// v o u; requires codomain(u) == domain(v).
LinearMapRep compose(const LinearMapRep& v, const LinearMapRep& u);

/// u1 (x) u2 for maps between single-block (matrix) algebras.
LinearMapRep tensor(const LinearMapRep& u1, const LinearMapRep& u2);

/// Restriction of the codomain to block b: p_b o u.
LinearMapRep codomain_block(const LinearMapRep& u, std::size_t b);

/// Direct sum of maps with a common domain into B_1 (+) ... (+) B_k.
LinearMapRep direct_sum(const std::vector<LinearMapRep>& parts);

/// x -> a* x b on a single algebra.
LinearMapRep sandwich_map(const AlgebraElement& a, const AlgebraElement& b);

/// Max over basis images of ||u(e) - v(e)||.
double map_distance(const LinearMapRep& u, const LinearMapRep& v);

bool is_unital(const LinearMapRep& u, double tol = 1e-9);

}  // namespace opnorm
