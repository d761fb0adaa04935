#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace strata {

// Dense row-major matrix of doubles, sized for desk-scale problems.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& flat() const { return data_; }

  double sum() const;
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  Matrix transposed() const;

  double max_abs_diff(const Matrix& other) const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a);

// Row-major lexicographic order; ties broken toward the matrix whose first
// differing entry is smaller. Used for deterministic coupling output.
bool lex_less(const Matrix& a, const Matrix& b);

}  // namespace strata
