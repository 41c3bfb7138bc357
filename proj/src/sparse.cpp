#include "tonekit/sparse.hpp"

#include "tonekit/core.hpp"
#include "tonekit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace tonekit {

SparseSymMatrix::SparseSymMatrix(std::size_t n, std::vector<int> row_ptr, std::vector<int> cols,
                                 std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != n_ + 1 || cols_.size() != vals_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != vals_.size())
    throw Error(ErrorKind::input, "inconsistent CSR arrays");
}

double SparseSymMatrix::entry(std::size_t i, std::size_t j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  return (it != end && *it == static_cast<int>(j)) ? vals_[it - cols_.begin()] : 0.0;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i)
    d[i] = entry(i, i);
  return d;
}

double SparseSymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    t += entry(i, i);
  return t;
}

bool SparseSymMatrix::is_zero() const {
  return std::all_of(vals_.begin(), vals_.end(), [](double v) { return v == 0.0; });
}

double SparseSymMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      worst = std::max(worst, std::abs(vals_[k] - entry(cols_[k], i)));
  return worst;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_)
    throw Error(ErrorKind::input, "matrix-vector size mismatch");
  kernels::csr_spmv(n_, row_ptr_.data(), cols_.data(), vals_.data(), x.data(), y.data());
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SparseSymMatrix::quadratic_form(std::span<const double> x) const {
  const std::vector<double> y = multiply(x);
  return kernels::dot(x, y);
}

Eigen::SparseMatrix<double> SparseSymMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(vals_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      t.emplace_back(static_cast<int>(i), cols_[k], vals_[k]);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      m(static_cast<Eigen::Index>(i), cols_[k]) = vals_[k];
  return m;
}

void SparseSymMatrix::write_coordinates(std::ostream& out) const {
  char buf[64];
  for (std::size_t i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %d %.17g\n", i, cols_[k], vals_[k]);
      out << buf;
    }
}

SparseSymMatrix SparseSymMatrix::permuted(const std::vector<int>& p) const {
  if (p.size() != n_)
    throw Error(ErrorKind::input, "permutation size mismatch");
  TripletBuilder b(n_);
  b.reserve(vals_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      b.add(p[i], p[cols_[k]], vals_[k]);
  return b.build();
}

void TripletBuilder::add(int i, int j, double v) {
  if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n_ || static_cast<std::size_t>(j) >= n_)
    throw Error(ErrorKind::input, "triplet index out of range");
  entries_.push_back({i, j, v});
}

SparseSymMatrix TripletBuilder::build() const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Entry& x = entries_[a];
    const Entry& y = entries_[b];
    return x.i != y.i ? x.i < y.i : x.j < y.j;
  });
  std::vector<int> row_ptr(n_ + 1, 0), cols;
  std::vector<double> vals;
  cols.reserve(entries_.size() / 4);
  vals.reserve(entries_.size() / 4);
  for (std::size_t k = 0; k < order.size();) {
    const Entry& e = entries_[order[k]];
    double sum = 0.0;
    std::size_t m = k;
    while (m < order.size() && entries_[order[m]].i == e.i && entries_[order[m]].j == e.j)
      sum += entries_[order[m++]].v;
    cols.push_back(e.j);
    vals.push_back(sum);
    ++row_ptr[e.i + 1];
    k = m;
  }
  for (std::size_t i = 0; i < n_; ++i)
    row_ptr[i + 1] += row_ptr[i];
  return SparseSymMatrix(n_, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseSymMatrix add(const SparseSymMatrix& a, const SparseSymMatrix& b, double beta) {
  if (a.size() != b.size())
    throw Error(ErrorKind::input, "matrix sizes differ");
  const std::size_t n = a.size();
  std::vector<int> row_ptr(n + 1, 0), cols;
  std::vector<double> vals;
  cols.reserve(std::max(a.nonzeros(), b.nonzeros()));
  vals.reserve(cols.capacity());
  for (std::size_t i = 0; i < n; ++i) {
    int p = a.row_ptr()[i], pe = a.row_ptr()[i + 1];
    int q = b.row_ptr()[i], qe = b.row_ptr()[i + 1];
    while (p < pe || q < qe) {
      const int ca = p < pe ? a.cols()[p] : INT32_MAX;
      const int cb = q < qe ? b.cols()[q] : INT32_MAX;
      if (ca == cb) {
        cols.push_back(ca);
        vals.push_back(a.values()[p++] + beta * b.values()[q++]);
      } else if (ca < cb) {
        cols.push_back(ca);
        vals.push_back(a.values()[p++]);
      } else {
        cols.push_back(cb);
        vals.push_back(beta * b.values()[q++]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(cols.size());
  }
  return SparseSymMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

} // namespace tonekit
