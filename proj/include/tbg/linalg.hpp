#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tbg/jet.hpp"

namespace tbg {

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

/// Dense row-major matrix over double or Jet entries. Jet entries let the
/// usual metric/frame formulas carry their own derivatives.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols), fill) {}

  static Mat identity_like(int n, const T& zero, const T& one) {
    Mat m(n, n, zero);
    for (int i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }

  Mat transposed() const {
    Mat t(cols_, rows_, data_.empty() ? T{} : data_[0]);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat: product shape mismatch");
    Mat r(a.rows_, b.cols_, a.data_.empty() ? T{} : zero_like(a.data_[0]));
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k)
        for (int j = 0; j < b.cols_; ++j) r(i, j) += a(i, k) * b(k, j);
    return r;
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    a.match(b);
    Mat r = a;
    for (size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
    return r;
  }

  friend Mat operator-(const Mat& a, const Mat& b) {
    a.match(b);
    Mat r = a;
    for (size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
    return r;
  }

 private:
  static T zero_like(const T& proto) {
    if constexpr (std::is_same_v<T, Jet>)
      return Jet::constant(0.0, proto.nvars(), proto.order());
    else
      return T{};
  }

  size_t index(int r, int c) const {
    if (r < 0 || c < 0 || r >= rows_ || c >= cols_)
      throw std::out_of_range("Mat: index (" + std::to_string(r) + "," + std::to_string(c) +
                              ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
    return static_cast<size_t>(r) * static_cast<size_t>(cols_) + static_cast<size_t>(c);
  }

  void match(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("Mat: shape mismatch");
  }

  int rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

/// Gaussian elimination with partial pivoting by |value|; works for Jet
/// entries because division and subtraction carry the derivatives along.
template <typename T>
Mat<T> solve(Mat<T> a, Mat<T> b) {
  const int n = a.rows();
  if (a.cols() != n || b.rows() != n)
    throw std::invalid_argument("solve: need square system with matching right-hand side");
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(value_of(a(i, j))));
  if (scale == 0.0) throw std::domain_error("solve: zero matrix");

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(pivot, col)))) pivot = r;
    if (std::abs(value_of(a(pivot, col))) <= 1e-13 * scale)
      throw std::domain_error("solve: singular matrix (pivot " + std::to_string(col) + ")");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      for (int j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(pivot, j));
    }

    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      T factor = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
      for (int j = 0; j < b.cols(); ++j) b(r, j) -= factor * b(col, j);
    }
  }
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < b.cols(); ++j) b(r, j) /= a(r, r);
  return b;
}

template <typename T>
Mat<T> inverse(const Mat<T>& a, const T& zero, const T& one) {
  return solve(a, Mat<T>::identity_like(a.rows(), zero, one));
}

inline Mat<double> inverse(const Mat<double>& a) { return inverse(a, 0.0, 1.0); }

template <typename T>
class Ten3 {
 public:
  Ten3() = default;
  Ten3(int n0, int n1, int n2, const T& fill = T{})
      : n_{n0, n1, n2}, data_(static_cast<size_t>(n0) * n1 * n2, fill) {}

  int dim(int axis) const { return n_[axis]; }
  T& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

 private:
  size_t index(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= n_[0] || j >= n_[1] || k >= n_[2])
      throw std::out_of_range("Ten3: index outside shape");
    return (static_cast<size_t>(i) * n_[1] + j) * n_[2] + k;
  }
  int n_[3] = {0, 0, 0};
  std::vector<T> data_;
};

template <typename T>
class Ten4 {
 public:
  Ten4() = default;
  Ten4(int n0, int n1, int n2, int n3, const T& fill = T{})
      : n_{n0, n1, n2, n3}, data_(static_cast<size_t>(n0) * n1 * n2 * n3, fill) {}

  int dim(int axis) const { return n_[axis]; }
  T& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  const T& operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

 private:
  size_t index(int i, int j, int k, int l) const {
    if (i < 0 || j < 0 || k < 0 || l < 0 || i >= n_[0] || j >= n_[1] || k >= n_[2] || l >= n_[3])
      throw std::out_of_range("Ten4: index outside shape");
    return ((static_cast<size_t>(i) * n_[1] + j) * n_[2] + k) * n_[3] + l;
  }
  int n_[4] = {0, 0, 0, 0};
  std::vector<T> data_;
};

/// Packed ordering of independent symmetric components: (0,0), (0,1), ...,
/// (0,n-1), (1,1), ... Matches the jet's own second-order packing.
inline int sym_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

inline int sym_count(int n) { return n * (n + 1) / 2; }

template <typename T>
Mat<T> sym_unpack(std::span<const T> packed, int n) {
  if (static_cast<int>(packed.size()) != sym_count(n))
    throw std::invalid_argument("sym_unpack: expected " + std::to_string(sym_count(n)) +
                                " components, got " + std::to_string(packed.size()));
  Mat<T> m(n, n, packed[0]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = packed[static_cast<size_t>(sym_index(i, j, n))];
  return m;
}

inline Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline Mat<double> from_eigen(const Eigen::MatrixXd& e) {
  Mat<double> m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int r = 0; r < e.rows(); ++r)
    for (int c = 0; c < e.cols(); ++c) m(static_cast<int>(r), static_cast<int>(c)) = e(r, c);
  return m;
}

/// Value parts of a jet matrix.
inline Mat<double> values_of(const Mat<Jet>& m) {
  Mat<double> v(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) v(r, c) = m(r, c).value();
  return v;
}

}  // namespace tbg
