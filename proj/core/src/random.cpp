#include "opnorm/random.hpp"

#include <cmath>
#include <numbers>

namespace opnorm {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededGenerator::next_u64() {
  ++counter_;
  return splitmix64_mix(seed_ + counter_ * kGolden);
}

double SeededGenerator::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int SeededGenerator::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(next_u64() % span);
}

double SeededGenerator::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

Complex SeededGenerator::complex_gaussian() {
  const double a = gaussian();
  const double b = gaussian();
  return Complex(a, b) * std::numbers::sqrt2 * 0.5;
}

SeededGenerator SeededGenerator::fork(std::uint64_t stream) const {
  return SeededGenerator(splitmix64_mix(seed_ ^ splitmix64_mix(stream + kGolden)));
}

ComplexMatrix random_ginibre(SeededGenerator& gen, int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = gen.complex_gaussian();
  }
  return g;
}

ComplexMatrix random_haar_unitary(SeededGenerator& gen, int d) {
  const ComplexMatrix g = random_ginibre(gen, d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexMatrix random_hermitian(SeededGenerator& gen, int d) {
  return hermitian_part(random_ginibre(gen, d, d));
}

AlgebraElement random_element(SeededGenerator& gen, const AlgebraShape& shape) {
  std::vector<ComplexMatrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(random_ginibre(gen, d, d));
  return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement random_self_adjoint(SeededGenerator& gen, const AlgebraShape& shape) {
  std::vector<ComplexMatrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(random_hermitian(gen, d));
  return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement random_positive(SeededGenerator& gen, const AlgebraShape& shape) {
  std::vector<ComplexMatrix> blocks;
  for (int d : shape.block_dims()) {
    const ComplexMatrix g = random_ginibre(gen, d, d);
    blocks.push_back(hermitian_part(g * g.adjoint()) / static_cast<double>(d));
  }
  return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement random_unitary_element(SeededGenerator& gen, const AlgebraShape& shape) {
  std::vector<ComplexMatrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(random_haar_unitary(gen, d));
  return AlgebraElement(shape, std::move(blocks));
}

LinearMapRep random_linear_map(SeededGenerator& gen, const AlgebraShape& domain, const AlgebraShape& codomain) {
  std::vector<AlgebraElement> images;
  for (int k = 0; k < domain.dimension(); ++k) images.push_back(random_element(gen, codomain));
  return LinearMapRep(domain, codomain, std::move(images));
}

LinearMapRep random_cp_map(SeededGenerator& gen, const AlgebraShape& domain, const AlgebraShape& codomain) {
  const int m = codomain.representation_size();
  std::vector<ComplexMatrix> choi_blocks;
  for (int d : domain.block_dims()) {
    ComplexMatrix c = ComplexMatrix::Zero(d * m, d * m);
    for (std::size_t b = 0; b < codomain.block_count(); ++b) {
      const int mb = codomain.block_dim(b);
      const int off = codomain.representation_offset(b);
      const ComplexMatrix g = random_ginibre(gen, d * mb, d * mb);
      const ComplexMatrix p = hermitian_part(g * g.adjoint());
      // Scatter the (d*mb)-square PSD matrix into the codomain block b slots.
      for (int r = 0; r < d; ++r) {
        for (int s = 0; s < d; ++s) c.block(r * m + off, s * m + off, mb, mb) = p.block(r * mb, s * mb, mb, mb);
      }
    }
    choi_blocks.push_back(std::move(c));
  }
  LinearMapRep u = LinearMapRep::from_choi(domain, codomain, choi_blocks);
  const double scale = element_norm(apply(u, AlgebraElement::unit(domain)));
  if (scale > 0.0) u *= 1.0 / scale;
  return u;
}

LinearMapRep random_unital_cp_map(SeededGenerator& gen, const AlgebraShape& domain, const AlgebraShape& codomain) {
  const LinearMapRep u = random_cp_map(gen, domain, codomain);
  const AlgebraElement one = apply(u, AlgebraElement::unit(domain));
  std::vector<ComplexMatrix> inv_sqrt;
  for (const auto& b : one.blocks()) {
    const EigenSystem es = herm_eigensystem(hermitian_part(b));
    const RealVector d = es.values.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    inv_sqrt.push_back(es.vectors * d.asDiagonal() * es.vectors.adjoint());
  }
  const AlgebraElement w(codomain, inv_sqrt);
  std::vector<AlgebraElement> images;
  for (const auto& x : u.images()) images.push_back(multiply(multiply(w, x), w));
  return LinearMapRep(domain, codomain, std::move(images));
}

}  // namespace opnorm
