#include "penaparab/band_lu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace penaparab {

namespace {

std::pair<int, int> bandwidths(const CsrMatrix& a) {
  int kl = 0, ku = 0;
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      kl = std::max(kl, i - a.col[p]);
      ku = std::max(ku, a.col[p] - i);
    }
  return {kl, ku};
}

double max_abs(const CsrMatrix& a) {
  double m = 0.0;
  for (double v : a.val) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

BandLU::BandLU(const CsrMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("band LU needs a square matrix");
  n_ = a.rows;
  std::tie(kl_, ku_) = bandwidths(a);
  width_ = 2 * kl_ + ku_ + 1;
  data_.assign(static_cast<std::size_t>(n_) * width_, 0.0);
  pivots_.resize(n_);
  for (int i = 0; i < n_; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) at(i, a.col[p]) = a.val[p];

  const double tiny = 1e-14 * max_abs(a);
  const int kf = kl_ + ku_;  // reach of U after pivoting
  for (int k = 0; k < n_; ++k) {
    const int last_row = std::min(n_ - 1, k + kl_);
    const int last_col = std::min(n_ - 1, k + kf);
    int p = k;
    double best = std::abs(at(k, k));
    for (int r = k + 1; r <= last_row; ++r)
      if (std::abs(at(r, k)) > best) {
        best = std::abs(at(r, k));
        p = r;
      }
    if (!(best > tiny)) {
      std::ostringstream msg;
      msg << "numerically singular pivot in column " << k;
      throw NumericalError(msg.str());
    }
    pivots_[k] = p;
    if (p != k)
      for (int c = k; c <= last_col; ++c) std::swap(at(k, c), at(p, c));
    const double inv = 1.0 / at(k, k);
    for (int r = k + 1; r <= last_row; ++r) {
      const double l = at(r, k) * inv;
      at(r, k) = l;
      if (l == 0.0) continue;
      for (int c = k + 1; c <= last_col; ++c) at(r, c) -= l * at(k, c);
    }
  }
}

std::vector<double> BandLU::solve(std::span<const double> b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("rhs size mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (int k = 0; k < n_; ++k) {
    if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
    const int last_row = std::min(n_ - 1, k + kl_);
    for (int r = k + 1; r <= last_row; ++r) x[r] -= at(r, k) * x[k];
  }
  const int kf = kl_ + ku_;
  for (int k = n_ - 1; k >= 0; --k) {
    const int last_col = std::min(n_ - 1, k + kf);
    double s = x[k];
    for (int c = k + 1; c <= last_col; ++c) s -= at(k, c) * x[c];
    x[k] = s / at(k, k);
  }
  return x;
}

BandCholesky::BandCholesky(const CsrMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("Cholesky needs a square matrix");
  n_ = a.rows;
  bw_ = a.bandwidth();
  const int w = bw_ + 1;
  data_.assign(static_cast<std::size_t>(n_) * w, 0.0);
  auto L = [&](int i, int j) -> double& { return data_[static_cast<std::size_t>(i) * w + (j - i + bw_)]; };
  for (int i = 0; i < n_; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (a.col[p] <= i) L(i, a.col[p]) = a.val[p];
  for (int j = 0; j < n_; ++j) {
    const int lo = std::max(0, j - bw_);
    double d = L(j, j);
    for (int k = lo; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) {
      std::ostringstream msg;
      msg << "matrix is not positive definite (pivot " << d << " in row " << j << ")";
      throw NumericalError(msg.str());
    }
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    const int hi = std::min(n_ - 1, j + bw_);
    for (int i = j + 1; i <= hi; ++i) {
      double s = L(i, j);
      const int lo_i = std::max(0, i - bw_);
      for (int k = std::max(lo, lo_i); k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
}

std::vector<double> BandCholesky::solve(std::span<const double> b) const {
  const int w = bw_ + 1;
  auto L = [&](int i, int j) { return data_[static_cast<std::size_t>(i) * w + (j - i + bw_)]; };
  std::vector<double> x(b.begin(), b.end());
  for (int i = 0; i < n_; ++i) {
    double s = x[i];
    for (int k = std::max(0, i - bw_); k < i; ++k) s -= L(i, k) * x[k];
    x[i] = s / L(i, i);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
  return x;
}

LuSolveResult lu_solve(const CsrMatrix& a, std::span<const double> b) {
  LuSolveResult out;
  if (a.rows == 0) return out;
  const BandLU lu(a);
  out.x = lu.solve(b);
  const auto ax = a.multiply(out.x);
  double rn = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) rn += (ax[i] - b[i]) * (ax[i] - b[i]);
  const double bn = norm2(b);
  out.relative_residual = bn > 0.0 ? std::sqrt(rn) / bn : std::sqrt(rn);
  if (!(out.relative_residual <= kMaxRelativeResidual)) {
    std::ostringstream msg;
    msg << "linear solve residual " << out.relative_residual << " exceeds "
        << kMaxRelativeResidual;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace penaparab
