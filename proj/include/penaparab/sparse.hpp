#ifndef PENAPARAB_SPARSE_HPP
#define PENAPARAB_SPARSE_HPP

#include <span>
#include <vector>

namespace penaparab {

/// Compressed sparse row matrix with sorted column indices.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::vector<double> multiply(std::span<const double> x) const;
  /// w^T A w.
  double quadratic(std::span<const double> w) const;
  /// Entry (i, j), 0 when not stored.
  double at(int i, int j) const;
  /// max |i - j| over stored entries.
  int bandwidth() const;
  CsrMatrix transposed() const;
  /// (A + A^T) / 2.
  CsrMatrix symmetric_part() const;
  bool all_finite() const;
};

/// Collects (i, j, v) contributions; duplicates are summed on build.
class TripletList {
 public:
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  CsrMatrix build(int rows, int cols) const;

 private:
  struct Entry {
    int i;
    int j;
    double v;
  };
  std::vector<Entry> entries_;
};

/// alpha * A + beta * B.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace penaparab

#endif  // PENAPARAB_SPARSE_HPP
