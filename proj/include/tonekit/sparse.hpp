#pragma once

#include <Eigen/Sparse>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace tonekit {

// Symmetric matrix in CSR form with both triangles stored. Explicit zeros
// are kept so matrices assembled on the same mesh share one pattern.
class SparseSymMatrix {
public:
  SparseSymMatrix() = default;
  SparseSymMatrix(std::size_t n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> vals);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return vals_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }

  double entry(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;
  double trace() const;
  bool is_zero() const;
  // max |A_ij - A_ji|
  double max_asymmetry() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;

  Eigen::SparseMatrix<double> to_eigen() const;
  Eigen::MatrixXd to_dense() const;

  // `row col value` lines, 0-based, upper triangle included.
  void write_coordinates(std::ostream& out) const;

  // Symmetric permutation: result(p[i], p[j]) = this(i, j).
  SparseSymMatrix permuted(const std::vector<int>& p) const;

private:
  std::size_t n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

class TripletBuilder {
public:
  explicit TripletBuilder(std::size_t n) : n_(n) {}
  void add(int i, int j, double v);
  void reserve(std::size_t count) { entries_.reserve(count); }
  // Duplicates are summed in insertion order, so the result is independent
  // of anything but the sequence of add() calls.
  SparseSymMatrix build() const;

private:
  struct Entry {
    int i, j;
    double v;
  };
  std::size_t n_;
  std::vector<Entry> entries_;
};

SparseSymMatrix add(const SparseSymMatrix& a, const SparseSymMatrix& b, double beta = 1.0);

} // namespace tonekit
