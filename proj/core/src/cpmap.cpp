#include "opnorm/cpmap.hpp"

#include <algorithm>
#include <limits>

namespace opnorm {

LinearMapRep::LinearMapRep(AlgebraShape domain, AlgebraShape codomain, std::vector<AlgebraElement> images)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), images_(std::move(images)) {
  if (static_cast<int>(images_.size()) != domain_.dimension()) {
    throw ShapeError("LinearMapRep: expected " + std::to_string(domain_.dimension()) +
                     " basis images, got " + std::to_string(images_.size()));
  }
  for (const auto& x : images_) require_same_shape(x.shape(), codomain_, "LinearMapRep");
}

LinearMapRep LinearMapRep::identity(const AlgebraShape& shape) {
  std::vector<AlgebraElement> images;
  for (int k = 0; k < shape.dimension(); ++k) images.push_back(AlgebraElement::basis_element(shape, k));
  return LinearMapRep(shape, shape, std::move(images));
}

LinearMapRep LinearMapRep::zero(const AlgebraShape& domain, const AlgebraShape& codomain) {
  return LinearMapRep(domain, codomain,
                      std::vector<AlgebraElement>(domain.dimension(), AlgebraElement::zero(codomain)));
}

LinearMapRep LinearMapRep::from_linf_images(const std::vector<AlgebraElement>& x) {
  if (x.empty()) throw ShapeError("from_linf_images: need at least one image");
  return LinearMapRep(AlgebraShape::commutative(static_cast<int>(x.size())), x.front().shape(), x);
}

LinearMapRep LinearMapRep::from_choi(const AlgebraShape& domain, const AlgebraShape& codomain,
                                     const std::vector<ComplexMatrix>& choi_blocks) {
  if (choi_blocks.size() != domain.block_count()) throw ShapeError("from_choi: block count mismatch");
  const int m = codomain.representation_size();
  std::vector<AlgebraElement> images;
  for (std::size_t i = 0; i < domain.block_count(); ++i) {
    const int d = domain.block_dim(i);
    if (choi_blocks[i].rows() != d * m || choi_blocks[i].cols() != d * m) {
      throw ShapeError("from_choi: Choi block " + std::to_string(i) + " has wrong size");
    }
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) {
        images.push_back(AlgebraElement::from_block_diagonal(codomain, choi_blocks[i].block(r * m, s * m, m, m)));
      }
    }
  }
  return LinearMapRep(domain, codomain, std::move(images));
}

const AlgebraElement& LinearMapRep::image(std::size_t block, int r, int s) const {
  const int d = domain_.block_dim(block);
  return images_[domain_.basis_offset(block) + r * d + s];
}

const std::vector<AlgebraElement>& LinearMapRep::linf_images() const {
  if (!domain_.is_commutative()) throw ShapeError("linf_images: domain is not l_inf^n");
  return images_;
}

LinearMapRep& LinearMapRep::operator+=(const LinearMapRep& other) {
  require_same_shape(domain_, other.domain_, "map add (domain)");
  require_same_shape(codomain_, other.codomain_, "map add (codomain)");
  for (std::size_t k = 0; k < images_.size(); ++k) images_[k] += other.images_[k];
  return *this;
}

LinearMapRep& LinearMapRep::operator*=(Complex alpha) {
  for (auto& x : images_) x *= alpha;
  return *this;
}

LinearMapRep operator+(LinearMapRep u, const LinearMapRep& v) { return u += v; }
LinearMapRep operator*(Complex alpha, LinearMapRep u) { return u *= alpha; }

std::vector<ComplexMatrix> choi(const LinearMapRep& u) {
  const AlgebraShape& dom = u.domain();
  const int m = u.codomain().representation_size();
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < dom.block_count(); ++i) {
    const int d = dom.block_dim(i);
    ComplexMatrix c = ComplexMatrix::Zero(d * m, d * m);
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) c.block(r * m, s * m, m, m) = u.image(i, r, s).to_block_diagonal();
    }
    out.push_back(std::move(c));
  }
  return out;
}

double choi_min_eigenvalue(const LinearMapRep& u) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : choi(u)) {
    if (hermiticity_defect(c) > 1e-9) return -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(c), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

bool is_cp(const LinearMapRep& u, double tol) {
  for (const auto& c : choi(u)) {
    if (hermiticity_defect(c) > tol) return false;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(c), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -tol) return false;
  }
  return true;
}

LinearMapRep star_map(const LinearMapRep& u) {
  std::vector<AlgebraElement> images;
  images.reserve(u.images().size());
  const AlgebraShape& dom = u.domain();
  for (std::size_t i = 0; i < dom.block_count(); ++i) {
    const int d = dom.block_dim(i);
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) images.push_back(u.image(i, s, r).adjoint());
    }
  }
  return LinearMapRep(dom, u.codomain(), std::move(images));
}

AlgebraElement apply(const LinearMapRep& u, const AlgebraElement& x) {
  require_same_shape(x.shape(), u.domain(), "apply");
  AlgebraElement out = AlgebraElement::zero(u.codomain());
  const ComplexVector c = x.coordinates();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (c(k) != Complex(0.0)) out += c(k) * u.image(static_cast<int>(k));
  }
  return out;
}

LinearMapRep compose(const LinearMapRep& v, const LinearMapRep& u) {
  require_same_shape(u.codomain(), v.domain(), "compose");
  std::vector<AlgebraElement> images;
  images.reserve(u.images().size());
  for (const auto& x : u.images()) images.push_back(apply(v, x));
  return LinearMapRep(u.domain(), v.codomain(), std::move(images));
}

LinearMapRep tensor(const LinearMapRep& u1, const LinearMapRep& u2) {
  if (!u1.domain().is_single_block() || !u1.codomain().is_single_block() ||
      !u2.domain().is_single_block() || !u2.codomain().is_single_block()) {
    throw ShapeError("tensor: both maps must act between single-block matrix algebras");
  }
  const int n1 = u1.domain().block_dim(0);
  const int n2 = u2.domain().block_dim(0);
  const auto dom = AlgebraShape::matrix(n1 * n2);
  const auto cod = AlgebraShape::matrix(u1.codomain().block_dim(0) * u2.codomain().block_dim(0));
  std::vector<AlgebraElement> images(static_cast<std::size_t>(dom.dimension()));
  for (int r1 = 0; r1 < n1; ++r1) {
    for (int s1 = 0; s1 < n1; ++s1) {
      for (int r2 = 0; r2 < n2; ++r2) {
        for (int s2 = 0; s2 < n2; ++s2) {
          const int r = r1 * n2 + r2;
          const int s = s1 * n2 + s2;
          images[static_cast<std::size_t>(r * n1 * n2 + s)] = AlgebraElement(
              cod, {kron(u1.image(0, r1, s1).block(0), u2.image(0, r2, s2).block(0))});
        }
      }
    }
  }
  return LinearMapRep(dom, cod, std::move(images));
}

LinearMapRep codomain_block(const LinearMapRep& u, std::size_t b) {
  if (b >= u.codomain().block_count()) throw ShapeError("codomain_block: index out of range");
  const auto cod = AlgebraShape::matrix(u.codomain().block_dim(b));
  std::vector<AlgebraElement> images;
  for (const auto& x : u.images()) images.push_back(AlgebraElement(cod, {x.block(b)}));
  return LinearMapRep(u.domain(), cod, std::move(images));
}

LinearMapRep direct_sum(const std::vector<LinearMapRep>& parts) {
  if (parts.empty()) throw ShapeError("direct_sum: no parts");
  std::vector<int> dims;
  for (const auto& p : parts) {
    require_same_shape(p.domain(), parts.front().domain(), "direct_sum");
    dims.insert(dims.end(), p.codomain().block_dims().begin(), p.codomain().block_dims().end());
  }
  const AlgebraShape cod(dims);
  std::vector<AlgebraElement> images;
  for (std::size_t k = 0; k < parts.front().images().size(); ++k) {
    std::vector<ComplexMatrix> blocks;
    for (const auto& p : parts) {
      for (const auto& blk : p.image(static_cast<int>(k)).blocks()) blocks.push_back(blk);
    }
    images.emplace_back(cod, std::move(blocks));
  }
  return LinearMapRep(parts.front().domain(), cod, std::move(images));
}

LinearMapRep sandwich_map(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_shape(a.shape(), b.shape(), "sandwich_map");
  const AlgebraShape& s = a.shape();
  const AlgebraElement a_star = a.adjoint();
  std::vector<AlgebraElement> images;
  for (int k = 0; k < s.dimension(); ++k) {
    images.push_back(multiply(multiply(a_star, AlgebraElement::basis_element(s, k)), b));
  }
  return LinearMapRep(s, s, std::move(images));
}

double map_distance(const LinearMapRep& u, const LinearMapRep& v) {
  require_same_shape(u.domain(), v.domain(), "map_distance");
  require_same_shape(u.codomain(), v.codomain(), "map_distance");
  double worst = 0.0;
  for (std::size_t k = 0; k < u.images().size(); ++k) {
    worst = std::max(worst, element_norm(u.images()[k] - v.images()[k]));
  }
  return worst;
}

bool is_unital(const LinearMapRep& u, double tol) {
  const AlgebraElement one = apply(u, AlgebraElement::unit(u.domain()));
  return element_norm(one - AlgebraElement::unit(u.codomain())) <= tol;
}

}  // namespace opnorm
