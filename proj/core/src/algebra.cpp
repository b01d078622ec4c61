#include "opnorm/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace opnorm {

AlgebraShape::AlgebraShape(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw ShapeError("AlgebraShape: block list must be nonempty");
  for (int d : dims_) {
    if (d <= 0) throw ShapeError("AlgebraShape: block dimensions must be positive");
  }
}

AlgebraShape AlgebraShape::commutative(int n) {
  if (n <= 0) throw ShapeError("AlgebraShape::commutative: n must be positive");
  return AlgebraShape(std::vector<int>(static_cast<std::size_t>(n), 1));
}

int AlgebraShape::dimension() const {
  return std::accumulate(dims_.begin(), dims_.end(), 0, [](int acc, int d) { return acc + d * d; });
}

int AlgebraShape::representation_size() const {
  return std::accumulate(dims_.begin(), dims_.end(), 0);
}

int AlgebraShape::representation_offset(std::size_t i) const {
  int off = 0;
  for (std::size_t k = 0; k < i; ++k) off += dims_[k];
  return off;
}

int AlgebraShape::basis_offset(std::size_t i) const {
  int off = 0;
  for (std::size_t k = 0; k < i; ++k) off += dims_[k] * dims_[k];
  return off;
}

bool AlgebraShape::is_commutative() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int d) { return d == 1; });
}

std::string AlgebraShape::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << ")";
  return os.str();
}

void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* op) {
  if (!(a == b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.to_string() + " vs " + b.to_string());
  }
}

AlgebraElement::AlgebraElement(AlgebraShape shape, std::vector<ComplexMatrix> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (blocks_.size() != shape_.block_count()) {
    throw ShapeError("AlgebraElement: expected " + std::to_string(shape_.block_count()) +
                     " blocks, got " + std::to_string(blocks_.size()));
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int d = shape_.block_dim(i);
    if (blocks_[i].rows() != d || blocks_[i].cols() != d) {
      throw ShapeError("AlgebraElement: block " + std::to_string(i) + " must be " +
                       std::to_string(d) + "x" + std::to_string(d));
    }
  }
}

AlgebraElement AlgebraElement::zero(const AlgebraShape& shape) {
  std::vector<ComplexMatrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(ComplexMatrix::Zero(d, d));
  return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement AlgebraElement::unit(const AlgebraShape& shape) {
  std::vector<ComplexMatrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(ComplexMatrix::Identity(d, d));
  return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement AlgebraElement::matrix_unit(const AlgebraShape& shape, std::size_t block, int r, int s) {
  AlgebraElement e = zero(shape);
  if (block >= shape.block_count() || r < 0 || s < 0 || r >= shape.block_dim(block) ||
      s >= shape.block_dim(block)) {
    throw ShapeError("matrix_unit: index out of range");
  }
  e.blocks_[block](r, s) = 1.0;
  return e;
}

AlgebraElement AlgebraElement::basis_element(const AlgebraShape& shape, int index) {
  int rest = index;
  for (std::size_t i = 0; i < shape.block_count(); ++i) {
    const int d = shape.block_dim(i);
    if (rest < d * d) return matrix_unit(shape, i, rest / d, rest % d);
    rest -= d * d;
  }
  throw ShapeError("basis_element: index out of range");
}

AlgebraElement AlgebraElement::from_matrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("from_matrix: matrix must be square");
  return AlgebraElement(AlgebraShape::matrix(static_cast<int>(m.rows())), {m});
}

AlgebraElement AlgebraElement::from_block_diagonal(const AlgebraShape& shape, const ComplexMatrix& m) {
  const int size = shape.representation_size();
  if (m.rows() != size || m.cols() != size) throw ShapeError("from_block_diagonal: size mismatch");
  std::vector<ComplexMatrix> blocks;
  for (std::size_t i = 0; i < shape.block_count(); ++i) {
    const int off = shape.representation_offset(i);
    const int d = shape.block_dim(i);
    blocks.push_back(m.block(off, off, d, d));
  }
  return AlgebraElement(shape, std::move(blocks));
}

ComplexMatrix AlgebraElement::to_block_diagonal() const {
  const int size = shape_.representation_size();
  ComplexMatrix m = ComplexMatrix::Zero(size, size);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int off = shape_.representation_offset(i);
    m.block(off, off, blocks_[i].rows(), blocks_[i].cols()) = blocks_[i];
  }
  return m;
}

ComplexVector AlgebraElement::coordinates() const {
  ComplexVector c(shape_.dimension());
  int k = 0;
  for (const auto& b : blocks_) {
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index s = 0; s < b.cols(); ++s) c(k++) = b(r, s);
    }
  }
  return c;
}

AlgebraElement AlgebraElement::from_coordinates(const AlgebraShape& shape, const ComplexVector& c) {
  if (c.size() != shape.dimension()) throw ShapeError("from_coordinates: length mismatch");
  AlgebraElement x = zero(shape);
  int k = 0;
  for (auto& b : x.blocks_) {
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index s = 0; s < b.cols(); ++s) b(r, s) = c(k++);
    }
  }
  return x;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out = *this;
  for (auto& b : out.blocks_) b = b.adjoint().eval();
  return out;
}

bool AlgebraElement::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const ComplexMatrix& b) { return b.isZero(0.0); });
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  require_same_shape(shape_, other.shape_, "add");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  require_same_shape(shape_, other.shape_, "subtract");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex alpha) {
  for (auto& b : blocks_) b *= alpha;
  return *this;
}

AlgebraElement operator+(AlgebraElement x, const AlgebraElement& y) { return x += y; }
AlgebraElement operator-(AlgebraElement x, const AlgebraElement& y) { return x -= y; }
AlgebraElement operator*(Complex alpha, AlgebraElement x) { return x *= alpha; }

AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_shape(x.shape(), y.shape(), "multiply");
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i) blocks.push_back(x.block(i) * y.block(i));
  return AlgebraElement(x.shape(), std::move(blocks));
}

double element_norm(const AlgebraElement& x) {
  double n = 0.0;
  for (const auto& b : x.blocks()) n = std::max(n, operator_norm(b));
  return n;
}

Complex hs_inner(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_shape(x.shape(), y.shape(), "hs_inner");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < x.blocks().size(); ++i) {
    acc += (x.block(i).adjoint() * y.block(i)).trace();
  }
  return acc;
}

double hs_norm(const AlgebraElement& x) {
  double acc = 0.0;
  for (const auto& b : x.blocks()) acc += b.squaredNorm();
  return std::sqrt(acc);
}

bool is_self_adjoint(const AlgebraElement& x, double tol) {
  for (const auto& b : x.blocks()) {
    if ((b - b.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

bool is_positive(const AlgebraElement& x, double tol) {
  if (!is_self_adjoint(x, tol)) return false;
  for (const auto& b : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(b), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -tol) return false;
  }
  return true;
}

bool approx_equal(const AlgebraElement& x, const AlgebraElement& y, double tol) {
  if (!(x.shape() == y.shape())) return false;
  return element_norm(x - y) <= tol * std::max(1.0, element_norm(x));
}

}  // namespace opnorm
