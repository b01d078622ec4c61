#include "opnorm/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace opnorm {

FreeTensor random_free_tensor(SeededGenerator& gen, int n, int d) {
  if (n < 1 || d < 1) throw ShapeError("random_free_tensor: n and d must be positive");
  const AlgebraShape shape = AlgebraShape::matrix(d);
  std::vector<AlgebraElement> coeffs;
  for (int j = 0; j < n; ++j) {
    coeffs.push_back(AlgebraElement(shape, {random_ginibre(gen, d, d) / std::sqrt(static_cast<double>(d))}));
  }
  return FreeTensor(std::move(coeffs));
}

ComplexMatrix u2_from_angles(double phi, double alpha, double beta, double theta) {
  const Complex i(0.0, 1.0);
  ComplexMatrix u(2, 2);
  u(0, 0) = std::exp(i * alpha) * std::cos(theta);
  u(0, 1) = std::exp(i * beta) * std::sin(theta);
  u(1, 0) = -std::exp(-i * beta) * std::sin(theta);
  u(1, 1) = std::exp(-i * alpha) * std::cos(theta);
  return std::exp(i * phi) * u;
}

namespace {

class GridProblem {
 public:
  explicit GridProblem(const std::vector<ComplexMatrix>& x) : x_(x), d_(static_cast<int>(x.front().rows())) {
    per_unitary_ = d_ == 1 ? 1 : 4;
    params_ = per_unitary_ * static_cast<int>(x.size() - 1);
  }

  int params() const { return params_; }

  // Angle k is theta (range [0, pi/2]) when it is the 4th angle of a U(2)
  // factor, otherwise a phase in [0, 2 pi).
  bool is_theta(int k) const { return per_unitary_ == 4 && k % 4 == 3; }

  std::vector<ComplexMatrix> unitaries(const std::vector<double>& p) const {
    std::vector<ComplexMatrix> u;
    u.push_back(ComplexMatrix::Identity(d_, d_));
    for (std::size_t i = 1; i < x_.size(); ++i) {
      const double* a = p.data() + (i - 1) * per_unitary_;
      if (d_ == 1) {
        u.push_back(ComplexMatrix::Constant(1, 1, std::exp(Complex(0.0, a[0]))));
      } else {
        u.push_back(u2_from_angles(a[0], a[1], a[2], a[3]));
      }
    }
    return u;
  }

  double value(const std::vector<double>& p) {
    ++evaluations;
    const auto u = unitaries(p);
    const int n = d_ * d_;
    ComplexMatrix t = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      for (int a = 0; a < d_; ++a) {
        for (int b = 0; b < d_; ++b) t.block(a * d_, b * d_, d_, d_) += u[i](a, b) * x_[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(t.adjoint() * t, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
  }

  long evaluations = 0;

 private:
  const std::vector<ComplexMatrix>& x_;
  int d_;
  int per_unitary_ = 1;
  int params_ = 0;
};

}  // namespace

GridOracleResult grid_oracle_min_norm(const std::vector<ComplexMatrix>& x, const GridOracleOptions& options) {
  if (x.empty() || x.size() > 3) throw ShapeError("grid_oracle_min_norm: needs 1 <= n <= 3");
  const auto d = x.front().rows();
  if (d < 1 || d > 2) throw ShapeError("grid_oracle_min_norm: needs d <= 2");
  for (const auto& xi : x) {
    if (xi.rows() != d || xi.cols() != d) throw ShapeError("grid_oracle_min_norm: coefficient sizes differ");
  }

  GridProblem prob(x);
  const int np = prob.params();
  GridOracleResult out;
  if (np == 0) {
    out.value = prob.value({});
    out.unitaries = prob.unitaries({});
    out.evaluations = prob.evaluations;
    return out;
  }

  const int g = x.size() == 2 ? options.points_two : options.points_three;
  const double two_pi = 2.0 * std::numbers::pi;
  auto angle = [&](int k, int idx) {
    return prob.is_theta(k) ? 0.5 * std::numbers::pi * idx / std::max(1, g - 1) : two_pi * idx / g;
  };

  // Keep the best grid points in a min-heap.
  using Entry = std::pair<double, std::vector<double>>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first > b.first; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> best(cmp);

  std::vector<int> idx(static_cast<std::size_t>(np), 0);
  std::vector<double> p(static_cast<std::size_t>(np));
  while (true) {
    for (int k = 0; k < np; ++k) p[static_cast<std::size_t>(k)] = angle(k, idx[static_cast<std::size_t>(k)]);
    const double v = prob.value(p);
    if (static_cast<int>(best.size()) < options.polish_starts) {
      best.emplace(v, p);
    } else if (v > best.top().first) {
      best.pop();
      best.emplace(v, p);
    }
    int k = 0;
    while (k < np && ++idx[static_cast<std::size_t>(k)] == g) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == np) break;
  }

  out.value = -1.0;
  while (!best.empty()) {
    auto [v, q] = best.top();
    best.pop();
    // Coordinate and pairwise directions; coordinate moves alone stall
    // where the top singular value is degenerate.
    std::vector<std::vector<double>> dirs;
    for (int k = 0; k < np; ++k) {
      for (double sk : {1.0, -1.0}) {
        std::vector<double> dv(static_cast<std::size_t>(np), 0.0);
        dv[static_cast<std::size_t>(k)] = sk;
        dirs.push_back(dv);
        for (int l = k + 1; l < np; ++l) {
          for (double sl : {1.0, -1.0}) {
            std::vector<double> dw = dv;
            dw[static_cast<std::size_t>(l)] = sl;
            dirs.push_back(std::move(dw));
          }
        }
      }
    }
    double step = two_pi / g;
    while (step > options.polish_tol) {
      bool moved = false;
      for (const auto& dv : dirs) {
        std::vector<double> trial = q;
        for (int k = 0; k < np; ++k) trial[static_cast<std::size_t>(k)] += step * dv[static_cast<std::size_t>(k)];
        const double tv = prob.value(trial);
        if (tv > v) {
          v = tv;
          q = std::move(trial);
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (v > out.value) {
      out.value = v;
      out.unitaries = prob.unitaries(q);
    }
  }
  out.evaluations = prob.evaluations;
  return out;
}

}  // namespace opnorm
