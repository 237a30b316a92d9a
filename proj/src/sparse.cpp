#include "penaparab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace penaparab {

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cols) throw std::invalid_argument("dimension mismatch");
  std::vector<double> y(rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
    y[i] = s;
  }
  return y;
}

double CsrMatrix::quadratic(std::span<const double> w) const {
  const auto aw = multiply(w);
  return dot(w, aw);
}

double CsrMatrix::at(int i, int j) const {
  auto first = col.begin() + row_ptr[i];
  auto last = col.begin() + row_ptr[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return val[it - col.begin()];
}

int CsrMatrix::bandwidth() const {
  int bw = 0;
  for (int i = 0; i < rows; ++i)
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) bw = std::max(bw, std::abs(col[p] - i));
  return bw;
}

CsrMatrix CsrMatrix::transposed() const {
  TripletList t;
  t.reserve(val.size());
  for (int i = 0; i < rows; ++i)
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) t.add(col[p], i, val[p]);
  return t.build(cols, rows);
}

CsrMatrix CsrMatrix::symmetric_part() const { return add(*this, transposed(), 0.5, 0.5); }

bool CsrMatrix::all_finite() const {
  return std::all_of(val.begin(), val.end(), [](double v) { return std::isfinite(v); });
}

CsrMatrix TripletList::build(int rows, int cols) const {
  std::vector<Entry> e = entries_;
  std::sort(e.begin(), e.end(),
            [](const Entry& a, const Entry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  for (std::size_t k = 0; k < e.size();) {
    const int i = e[k].i, j = e[k].j;
    if (i < 0 || i >= rows || j < 0 || j >= cols) throw std::out_of_range("triplet outside matrix");
    double v = 0.0;
    while (k < e.size() && e[k].i == i && e[k].j == j) v += e[k++].v;
    m.col.push_back(j);
    m.val.push_back(v);
    ++m.row_ptr[i + 1];
  }
  for (int i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("dimension mismatch");
  TripletList t;
  t.reserve(a.val.size() + b.val.size());
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) t.add(i, a.col[p], alpha * a.val[p]);
  for (int i = 0; i < b.rows; ++i)
    for (int p = b.row_ptr[i]; p < b.row_ptr[i + 1]; ++p) t.add(i, b.col[p], beta * b.val[p]);
  return t.build(a.rows, a.cols);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace penaparab
