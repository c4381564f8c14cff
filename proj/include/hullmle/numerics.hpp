#pragma once

// Dense vector/matrix helpers shared by the solver, hull, and estimation code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hullmle {

using Vector = std::vector<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Row-major dense matrix. Rows are the natural unit throughout the library
/// (one point, one constraint, one sampled statistic per row).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m;
    for (const auto& r : rows) {
      m.append_row(std::span<const double>(r.begin(), r.size()));
    }
    return m;
  }

  static Matrix from_rows(const std::vector<Vector>& rows) {
    Matrix m;
    for (const auto& r : rows) m.append_row(r);
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Vector row_vector(std::size_t r) const {
    auto s = row(r);
    return Vector(s.begin(), s.end());
  }

  Vector column(std::size_t c) const {
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  const std::vector<double>& data() const noexcept { return data_; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
      cols_ = values.size();
    } else if (values.size() != cols_) {
      throw std::invalid_argument("append_row: expected " + std::to_string(cols_) +
                                  " columns, got " + std::to_string(values.size()));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  void reserve_rows(std::size_t n) { data_.reserve(n * cols_); }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Matrix select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      auto src = row(indices[k]);
      std::copy(src.begin(), src.end(), out.row(k).begin());
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

/// log(sum exp(v)) without overflow. -inf for an empty span.
inline double log_sum_exp(std::span<const double> v) {
  double mx = -kInfinity;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline bool all_finite(const Matrix& m) { return all_finite(std::span<const double>(m.data())); }

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("subtract: dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector scaled(std::span<const double> v, double s) {
  Vector out(v.begin(), v.end());
  for (double& x : out) x *= s;
  return out;
}

inline Vector multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("multiply: dimension mismatch");
  Vector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
  return y;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// Right-multiplies every row by the transpose of `a`: row_i -> a * row_i.
inline Matrix transform_rows(const Matrix& points, const Matrix& a) {
  if (a.cols() != points.cols()) throw std::invalid_argument("transform_rows: dimension mismatch");
  Matrix out(points.rows(), a.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto src = points.row(i);
    auto dst = out.row(i);
    for (std::size_t r = 0; r < a.rows(); ++r) dst[r] = dot(a.row(r), src);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Centering and second moments

struct Centered {
  Matrix centered;
  Vector centroid;
};

inline Vector column_means(const Matrix& points) {
  Vector mean(points.cols(), 0.0);
  for (std::size_t r = 0; r < points.rows(); ++r) {
    auto row = points.row(r);
    for (std::size_t c = 0; c < points.cols(); ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(points.rows());
  return mean;
}

/// Translates the rows so their column means vanish.
inline Centered center(const Matrix& points) {
  if (points.rows() == 0) throw std::invalid_argument("center: need at least one row");
  if (!all_finite(points)) throw std::domain_error("center: non-finite entry");
  Centered out{points, column_means(points)};
  for (std::size_t r = 0; r < points.rows(); ++r) {
    auto row = out.centered.row(r);
    for (std::size_t c = 0; c < points.cols(); ++c) row[c] -= out.centroid[c];
  }
  return out;
}

namespace detail {

// Lexicographic row order; summing in this order makes the moments
// independent of the caller's row order, bit for bit.
inline std::vector<std::size_t> canonical_row_order(const Matrix& points) {
  std::vector<std::size_t> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = points.row(a);
    auto rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return order;
}

}  // namespace detail

/// Sample covariance with denominator rows - 1.
inline Matrix covariance(const Matrix& points) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (n < 2) throw std::invalid_argument("covariance: need at least two rows");
  const auto order = detail::canonical_row_order(points);

  Vector mean(d, 0.0);
  for (std::size_t idx : order) {
    auto row = points.row(idx);
    for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix cov(d, d);
  Vector dev(d);
  for (std::size_t idx : order) {
    auto row = points.row(idx);
    for (std::size_t c = 0; c < d; ++c) dev[c] = row[c] - mean[c];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov(a, b) += dev[a] * dev[b];
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= denom;
      cov(b, a) = cov(a, b);
    }
  return cov;
}

// ---------------------------------------------------------------------------
// Factorizations

/// LU with partial pivoting for small dense systems.
class LuDecomposition {
 public:
  LuDecomposition() = default;
  explicit LuDecomposition(Matrix a, double rel_tol = 1e-13) { factor(std::move(a), rel_tol); }

  void factor(Matrix a, double rel_tol = 1e-13) {
    if (a.rows() != a.cols()) throw std::invalid_argument("LU: matrix must be square");
    n_ = a.rows();
    lu_ = std::move(a);
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), 0);
    singular_ = false;
    double scale = 0.0;
    for (double x : lu_.data()) scale = std::max(scale, std::abs(x));
    const double tiny = rel_tol * scale;
    if (n_ > 0 && scale == 0.0) singular_ = true;
    min_pivot_ = kInfinity;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      }
      min_pivot_ = std::min(min_pivot_, best);
      if (best <= tiny) {
        singular_ = true;
        continue;
      }
      if (p != k) {
        std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
        std::swap(perm_[k], perm_[p]);
      }
      const double pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double f = lu_(i, k) / pivot;
        lu_(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  bool singular() const noexcept { return singular_; }
  double min_pivot() const noexcept { return min_pivot_; }

  /// Solves A x = b.
  Vector solve(std::span<const double> b) const {
    require_regular(b.size());
    Vector x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] /= lu_(i, i);
    }
    return x;
  }

  /// Solves A^T y = c.
  Vector solve_transpose(std::span<const double> c) const {
    require_regular(c.size());
    Vector w(c.begin(), c.end());
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < i; ++j) w[i] -= lu_(j, i) * w[j];
      w[i] /= lu_(i, i);
    }
    for (std::size_t i = n_; i-- > 0;)
      for (std::size_t j = i + 1; j < n_; ++j) w[i] -= lu_(j, i) * w[j];
    Vector y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = w[i];
    return y;
  }

 private:
  void require_regular(std::size_t len) const {
    if (len != n_) throw std::invalid_argument("LU solve: dimension mismatch");
    if (singular_) throw std::domain_error("LU solve: matrix is singular");
  }

  std::size_t n_ = 0;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
  double min_pivot_ = kInfinity;
};

/// Lower Cholesky factor of a symmetric positive definite matrix.
class Cholesky {
 public:
  /// Returns false (leaving the object unusable) when a pivot is not
  /// comfortably positive.
  bool factor(const Matrix& a, double rel_tol = 1e-12) {
    n_ = a.rows();
    l_ = Matrix(n_, n_);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, a(i, i));
    ok_ = max_diag > 0.0;
    for (std::size_t j = 0; j < n_ && ok_; ++j) {
      double s = a(j, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(j, k) * l_(j, k);
      if (!(s > rel_tol * max_diag)) {
        ok_ = false;
        break;
      }
      l_(j, j) = std::sqrt(s);
      for (std::size_t i = j + 1; i < n_; ++i) {
        double t = a(i, j);
        for (std::size_t k = 0; k < j; ++k) t -= l_(i, k) * l_(j, k);
        l_(i, j) = t / l_(j, j);
      }
    }
    return ok_;
  }

  bool ok() const noexcept { return ok_; }

  /// Solves L w = b.
  Vector forward(std::span<const double> b) const {
    Vector w(b.begin(), b.end());
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) w[i] -= l_(i, k) * w[k];
      w[i] /= l_(i, i);
    }
    return w;
  }

  Vector solve(std::span<const double> b) const {
    Vector w = forward(b);
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) w[i] -= l_(k, i) * w[k];
      w[i] /= l_(i, i);
    }
    return w;
  }

 private:
  std::size_t n_ = 0;
  Matrix l_;
  bool ok_ = false;
};

// ---------------------------------------------------------------------------
// Mahalanobis distances

/// Applies the inverse of a (ridge-regularized if needed) covariance matrix.
class MahalanobisMetric {
 public:
  explicit MahalanobisMetric(const Matrix& cov) : dim_(cov.rows()) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("MahalanobisMetric: covariance must be square");
    if (chol_.factor(cov)) return;
    double trace = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) trace += cov(i, i);
    ridge_ = 1e-10 * std::max(trace / static_cast<double>(dim_), 1.0);
    Matrix reg = cov;
    for (std::size_t i = 0; i < dim_; ++i) reg(i, i) += ridge_;
    if (!chol_.factor(reg, 0.0)) throw std::domain_error("MahalanobisMetric: covariance is not positive semidefinite");
  }

  std::size_t dim() const noexcept { return dim_; }
  double ridge() const noexcept { return ridge_; }

  /// x^T S^{-1} x
  double squared_distance(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("mahalanobis_sq: dimension mismatch");
    const Vector w = chol_.forward(x);
    return dot(w, w);
  }

 private:
  std::size_t dim_;
  double ridge_ = 0.0;
  Cholesky chol_;
};

inline double mahalanobis_sq(std::span<const double> x, const MahalanobisMetric& metric) {
  return metric.squared_distance(x);
}

// ---------------------------------------------------------------------------
// Rank

/// Numerical rank of the centered point matrix via Householder QR with
/// column pivoting; |R_kk| <= tol * |R_00| counts as zero.
inline std::size_t rank(const Matrix& points, double tol = 1e-9) {
  if (points.rows() == 0) return 0;
  Matrix a = center(points).centered;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  const std::size_t steps = std::min(m, n);
  double r00 = 0.0;
  std::size_t result = 0;
  Vector v(m);
  for (std::size_t k = 0; k < steps; ++k) {
    // Recompute remaining column norms exactly; dimensions here are small.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = k; r < m; ++r) s += a(r, cols[j]) * a(r, cols[j]);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    std::swap(cols[k], cols[best]);
    const std::size_t ck = cols[k];
    const double alpha = std::sqrt(best_norm);
    if (k == 0) r00 = alpha;
    if (alpha == 0.0 || alpha <= tol * r00) break;
    ++result;
    // Householder reflector zeroing column ck below row k.
    const double sign = a(k, ck) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t r = k; r < m; ++r) v[r] = a(r, ck);
    v[k] += sign * alpha;
    double vnorm2 = 0.0;
    for (std::size_t r = k; r < m; ++r) vnorm2 += v[r] * v[r];
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      const std::size_t cj = cols[j];
      double s = 0.0;
      for (std::size_t r = k; r < m; ++r) s += v[r] * a(r, cj);
      const double f = 2.0 * s / vnorm2;
      for (std::size_t r = k; r < m; ++r) a(r, cj) -= f * v[r];
    }
  }
  return result;
}

}  // namespace hullmle
