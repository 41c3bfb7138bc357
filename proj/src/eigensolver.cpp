#include "tonekit/eigensolver.hpp"

#include "tonekit/assembly.hpp"
#include "tonekit/core.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace tonekit {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec spmv(const SparseSymMatrix& a, const Vec& x) {
  Vec y(x.size());
  a.multiply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  return y;
}

double norm_inf(const SparseSymMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      s += std::abs(a.values()[k]);
    worst = std::max(worst, s);
  }
  return worst;
}

double choose_shift(const SparseSymMatrix& k, const SparseSymMatrix& m) {
  const double tm = m.trace();
  if (!(tm > 0.0))
    throw Error(ErrorKind::input, "mass matrix has zero trace");
  const double tk = k.trace();
  return tk > 0.0 ? 1e-3 * tk / tm : 1e-3;
}

// Applies (K + sigma M)^-1 to vectors.
class ShiftedSolver {
public:
  ShiftedSolver(const SparseSymMatrix& k, const SparseSymMatrix& m, double sigma, InnerSolver kind)
      : kind_(kind), shifted_(add(k, m, sigma)) {
    if (kind_ == InnerSolver::cholesky) {
      ldlt_.compute(shifted_.to_eigen());
      if (ldlt_.info() != Eigen::Success)
        throw Error(ErrorKind::convergence, "shifted operator K + sigma M could not be factored");
      const Vec d = ldlt_.vectorD();
      if (d.size() > 0 && !(d.minCoeff() > 0.0))
        throw Error(ErrorKind::convergence, "shifted operator K + sigma M is not positive definite");
    }
  }

  Vec solve(const Vec& b) const {
    if (kind_ == InnerSolver::cholesky)
      return ldlt_.solve(b);
    Vec x = Vec::Zero(b.size());
    CgOptions o;
    o.rel_tol = 1e-12;
    o.max_iter = 100000;
    conjugate_gradient(shifted_, std::span<const double>(b.data(), b.size()), std::span<double>(x.data(), x.size()),
                       o);
    return x;
  }

private:
  InnerSolver kind_;
  SparseSymMatrix shifted_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

struct Deflation {
  bool active = false;
  Vec d, md;
  double dmd = 1.0;

  void apply(Vec& x) const {
    if (active)
      x -= d * (md.dot(x) / dmd);
  }
};

EigResult dense_solve(const SparseSymMatrix& k, const SparseSymMatrix& m, int count, const Deflation& defl,
                      double sigma) {
  const Mat kd = k.to_dense(), md = m.to_dense();
  const Eigen::Index n = kd.rows();
  Mat q;
  if (defl.active) {
    Eigen::HouseholderQR<Mat> qr(defl.md);
    q = Mat(qr.householderQ()).rightCols(n - 1);
  } else {
    q = Mat::Identity(n, n);
  }
  const Mat kr = q.transpose() * kd * q;
  const Mat mr = q.transpose() * md * q;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(mr, kr + sigma * mr);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::convergence, "dense generalized eigensolver failed (shifted operator not definite?)");
  const Vec theta = es.eigenvalues();
  EigResult r;
  r.dense = true;
  r.shift = sigma;
  r.eigenvectors.resize(n, count);
  const Eigen::Index m_red = theta.size();
  for (int i = 0; i < count; ++i) {
    const Eigen::Index idx = m_red - 1 - i;
    if (idx < 0 || !(theta[idx] > 0.0))
      throw Error(ErrorKind::convergence, "fewer finite eigenvalues than requested");
    Vec y = es.eigenvectors().col(idx);
    y /= std::sqrt(y.dot(mr * y));
    r.eigenvalues.push_back(1.0 / theta[idx] - sigma);
    r.eigenvectors.col(i) = q * y;
  }
  return r;
}

class KrylovSolver {
public:
  KrylovSolver(const SparseSymMatrix& k, const SparseSymMatrix& m, int count, const Deflation& defl, double sigma,
               const EigenOptions& o)
      : k_(k), m_(m), count_(count), defl_(defl), sigma_(sigma), opt_(o), solver_(k, m, sigma, o.inner),
        n_(static_cast<Eigen::Index>(k.size())), rng_(o.seed) {
    block_ = count + 2;
    const Eigen::Index n_eff = n_ - (defl.active ? 1 : 0);
    max_cols_ = std::min<Eigen::Index>(n_eff, std::max<Eigen::Index>(30, 6 * block_));
    v_.resize(n_, max_cols_);
    mv_.resize(n_, max_cols_);
  }

  EigResult run() {
    cols_ = 0;
    std::vector<Vec> start;
    for (int j = 0; j < block_; ++j)
      start.push_back(random_vector());
    Eigen::Index frontier = append(start);
    EigResult r;
    r.shift = sigma_;
    r.seed = opt_.seed;
    for (int outer = 1; outer <= opt_.max_outer; ++outer) {
      while (cols_ < max_cols_) {
        std::vector<Vec> next;
        for (Eigen::Index j = frontier; j < cols_; ++j)
          next.push_back(solver_.solve(mv_.col(j)));
        if (next.empty())
          next.push_back(random_vector());
        const Eigen::Index before = cols_;
        append(next);
        if (cols_ == before)
          append({random_vector()});
        if (cols_ == before)
          break;
        frontier = before;
      }
      // Rayleigh-Ritz on the pencil restricted to span(V).
      const Eigen::Index c = cols_;
      Mat kv(n_, c);
      for (Eigen::Index j = 0; j < c; ++j)
        kv.col(j) = spmv(k_, v_.col(j));
      Mat a = v_.leftCols(c).transpose() * kv;
      Mat b = v_.leftCols(c).transpose() * mv_.leftCols(c);
      a = 0.5 * (a + a.transpose()).eval();
      b = 0.5 * (b + b.transpose()).eval();
      Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, b);
      if (es.info() != Eigen::Success)
        throw Error(ErrorKind::convergence, "Rayleigh-Ritz step failed");
      const Eigen::Index keep = std::min<Eigen::Index>(block_, c);
      Mat y = v_.leftCols(c) * es.eigenvectors().leftCols(keep);
      r.eigenvalues.assign(count_, 0.0);
      r.residuals.assign(count_, 0.0);
      bool done = true;
      for (int i = 0; i < count_; ++i) {
        Vec yi = y.col(i);
        defl_.apply(yi);
        yi /= std::sqrt(yi.dot(spmv(m_, yi)));
        y.col(i) = yi;
        r.eigenvalues[i] = es.eigenvalues()[i];
        r.residuals[i] = eigen_residual(k_, m_, r.eigenvalues[i], yi);
        done = done && r.residuals[i] < opt_.tol;
      }
      r.iterations = outer;
      if (done) {
        r.eigenvectors = y.leftCols(count_);
        return r;
      }
      // Thick restart from the leading Ritz block.
      cols_ = 0;
      std::vector<Vec> ritz;
      for (Eigen::Index j = 0; j < keep; ++j)
        ritz.push_back(y.col(j));
      append(ritz);
      frontier = 0;
    }
    throw Error(ErrorKind::convergence, "eigensolver did not converge in " + std::to_string(opt_.max_outer) +
                                            " outer iterations (residual " + std::to_string(r.residuals.back()) +
                                            ")");
  }

private:
  Vec random_vector() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec x(n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      x[i] = u(rng_);
    return x;
  }

  // M-orthonormalizes each candidate against the basis (twice) and appends
  // the ones that survive. Returns the index of the first appended column.
  Eigen::Index append(const std::vector<Vec>& candidates) {
    const Eigen::Index first = cols_;
    for (Vec x : candidates) {
      if (cols_ >= max_cols_)
        break;
      defl_.apply(x);
      const double before = std::sqrt(std::max(0.0, x.dot(spmv(m_, x))));
      if (!(before > 0.0))
        continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (cols_ > 0) {
          const Vec c = mv_.leftCols(cols_).transpose() * x;
          x -= v_.leftCols(cols_) * c;
        }
        defl_.apply(x);
      }
      Vec mx = spmv(m_, x);
      const double nrm = std::sqrt(std::max(0.0, x.dot(mx)));
      if (!(nrm > 1e-10 * before))
        continue;
      v_.col(cols_) = x / nrm;
      mv_.col(cols_) = mx / nrm;
      ++cols_;
    }
    return first;
  }

  const SparseSymMatrix& k_;
  const SparseSymMatrix& m_;
  int count_;
  const Deflation& defl_;
  double sigma_;
  EigenOptions opt_;
  ShiftedSolver solver_;
  Eigen::Index n_;
  std::mt19937_64 rng_;
  int block_ = 3;
  Eigen::Index max_cols_ = 0;
  Eigen::Index cols_ = 0;
  Mat v_, mv_;
};

} // namespace

double eigen_residual(const SparseSymMatrix& k, const SparseSymMatrix& m, double mu, const Eigen::VectorXd& v) {
  const Vec kv = spmv(k, v);
  const Vec mv = spmv(m, v);
  const double num = (kv - mu * mv).norm();
  const double floor = 1e-13 * norm_inf(k) * v.norm();
  const double den = std::max({kv.norm(), std::abs(mu) * mv.norm(), floor});
  return den > 0.0 ? num / den : 0.0;
}

EigResult solve_smallest(const SparseSymMatrix& k, const SparseSymMatrix& m, int count,
                         const std::optional<std::vector<double>>& deflate, const EigenOptions& options) {
  const std::size_t n = k.size();
  if (m.size() != n)
    throw Error(ErrorKind::input, "stiffness and mass sizes differ");
  if (count < 1)
    throw Error(ErrorKind::input, "eigenvalue count must be at least 1");
  Deflation defl;
  if (deflate) {
    if (deflate->size() != n)
      throw Error(ErrorKind::input, "deflation vector has the wrong length");
    defl.active = true;
    defl.d = Eigen::Map<const Vec>(deflate->data(), static_cast<Eigen::Index>(n));
    defl.md = spmv(m, defl.d);
    defl.dmd = defl.d.dot(defl.md);
    if (!(defl.dmd > 0.0))
      throw Error(ErrorKind::input, "deflation vector has zero mass");
  }
  const std::size_t n_eff = n - (defl.active ? 1 : 0);
  if (static_cast<std::size_t>(count) > n_eff)
    throw Error(ErrorKind::input, "more eigenvalues requested than unknowns");
  const double sigma = choose_shift(k, m);

  EigResult r;
  if (n < options.dense_below && !options.force_iterative) {
    r = dense_solve(k, m, count, defl, sigma);
    r.seed = options.seed;
    for (int i = 0; i < count; ++i)
      r.residuals.push_back(eigen_residual(k, m, r.eigenvalues[i], r.eigenvectors.col(i)));
  } else {
    if (static_cast<std::size_t>(count + 2) > n_eff)
      throw Error(ErrorKind::input, "too few unknowns for the iterative eigensolver");
    KrylovSolver solver(k, m, count, defl, sigma, options);
    r = solver.run();
  }
  return r;
}

} // namespace tonekit
