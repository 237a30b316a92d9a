#ifndef PENAPARAB_BAND_LU_HPP
#define PENAPARAB_BAND_LU_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "penaparab/sparse.hpp"

namespace penaparab {

/// Raised for singular pivots, failed residual checks and similar.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LU factorisation with partial pivoting restricted to the band.
/// Rows are stored over columns [i - kl, i + kl + ku] to hold the fill
/// that row interchanges create.
class BandLU {
 public:
  explicit BandLU(const CsrMatrix& a);

  std::vector<double> solve(std::span<const double> b) const;
  int lower_bandwidth() const { return kl_; }
  int upper_bandwidth() const { return ku_; }

 private:
  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * width_ + (j - i + kl_)]; }
  double at(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * width_ + (j - i + kl_)];
  }

  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  int width_ = 0;
  std::vector<double> data_;
  std::vector<int> pivots_;
};

/// Cholesky factorisation of a symmetric banded matrix; throws
/// NumericalError when a pivot is not positive.
class BandCholesky {
 public:
  explicit BandCholesky(const CsrMatrix& a);
  std::vector<double> solve(std::span<const double> b) const;

 private:
  int n_ = 0;
  int bw_ = 0;
  std::vector<double> data_;  // row i holds L(i, i - bw .. i)
};

struct LuSolveResult {
  std::vector<double> x;
  double relative_residual = 0.0;
};

inline constexpr double kMaxRelativeResidual = 1e-8;

/// Factor, solve, and check ||Ax - b|| / ||b|| <= kMaxRelativeResidual.
LuSolveResult lu_solve(const CsrMatrix& a, std::span<const double> b);

}  // namespace penaparab

#endif  // PENAPARAB_BAND_LU_HPP
