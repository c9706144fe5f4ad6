#include "confomp/combmat.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "confomp/errors.hpp"
#include "confomp/rng.hpp"

namespace confomp {

CombMatrix::CombMatrix(Index m, Index n, Index d, std::vector<IndexList> cols)
    : m_(m), n_(n), d_(d), cols_(std::move(cols)) {
  if (m < 1 || n < 1) throw ParameterError("CombMatrix: m and n must be positive");
  if (d < 1 || d > m) throw ParameterError("CombMatrix: degree d must satisfy 1 <= d <= m");
  if (static_cast<Index>(cols_.size()) != n)
    throw ParameterError("CombMatrix: expected " + std::to_string(n) + " columns, got " +
                         std::to_string(cols_.size()));

  std::vector<Index> count(m, 0);
  for (Index j = 0; j < n; ++j) {
    const auto& c = cols_[j];
    if (static_cast<Index>(c.size()) != d)
      throw ParameterError("CombMatrix: column " + std::to_string(j) + " does not have d entries");
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] < 0 || c[k] >= m)
        throw ParameterError("CombMatrix: column " + std::to_string(j) + " has a row out of range");
      if (k > 0 && c[k] <= c[k - 1])
        throw ParameterError("CombMatrix: column " + std::to_string(j) +
                             " is not strictly increasing");
      ++count[c[k]];
    }
  }

  row_ptr_.assign(m + 1, 0);
  for (Index i = 0; i < m; ++i) row_ptr_[i + 1] = row_ptr_[i] + count[i];
  row_cols_.resize(static_cast<std::size_t>(n) * d);
  std::vector<Index> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  for (Index j = 0; j < n; ++j)
    for (Index i : cols_[j]) row_cols_[fill[i]++] = j;
}

std::span<const Index> CombMatrix::column(Index j) const {
  if (j < 0 || j >= n_) throw ParameterError("column index out of range");
  return cols_[j];
}

std::span<const Index> CombMatrix::row(Index i) const {
  if (i < 0 || i >= m_) throw ParameterError("row index out of range");
  return {row_cols_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
}

bool CombMatrix::at(Index i, Index j) const {
  auto c = column(j);
  return std::binary_search(c.begin(), c.end(), i);
}

CombMatrix gen_comb_matrix(Index m, Index n, Index d, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ParameterError("gen_comb_matrix: m and n must be positive");
  if (d < 1 || d > m) throw ParameterError("gen_comb_matrix: degree d must satisfy 1 <= d <= m");

  Rng rng(seed);
  // Partial Fisher-Yates draws a uniform d-subset from any starting
  // arrangement, so the pool is carried over between columns.
  std::vector<Index> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<IndexList> cols(n);
  for (auto& col : cols) {
    for (Index k = 0; k < d; ++k) {
      std::uniform_int_distribution<Index> pick(k, m - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    col.assign(pool.begin(), pool.begin() + d);
    std::sort(col.begin(), col.end());
  }
  return CombMatrix(m, n, d, std::move(cols));
}

std::vector<double> matvec(const CombMatrix& a, std::span<const double> x, OpCounter* counter) {
  if (static_cast<Index>(x.size()) != a.cols())
    throw ParameterError("matvec: x has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(a.cols()));
  std::vector<double> y(a.rows(), 0.0);
  std::uint64_t nonzero = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    const double v = x[j];
    if (v == 0.0) continue;
    ++nonzero;
    for (Index i : a.column(j)) y[i] += v;
  }
  if (counter) counter->additions += nonzero * static_cast<std::uint64_t>(a.degree() - 1);
  return y;
}

double col_correlation(const CombMatrix& a, Index j, std::span<const double> r,
                       OpCounter* counter) {
  if (static_cast<Index>(r.size()) != a.rows())
    throw ParameterError("col_correlation: r has wrong length");
  double s = 0.0;
  for (Index i : a.column(j)) s += r[i];
  if (counter) {
    counter->additions += static_cast<std::uint64_t>(a.degree() - 1);
    ++counter->inner_products;
  }
  return s;
}

void write_matrix(std::ostream& os, const CombMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.degree() << '\n';
  for (Index j = 0; j < a.cols(); ++j) {
    auto c = a.column(j);
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
    os << '\n';
  }
}

CombMatrix read_matrix(std::istream& is) {
  Index m = 0, n = 0, d = 0;
  if (!(is >> m >> n >> d)) throw ParameterError("read_matrix: malformed header");
  if (m < 1 || n < 1 || d < 1 || d > m) throw ParameterError("read_matrix: invalid dimensions");
  std::vector<IndexList> cols(n, IndexList(d));
  for (auto& c : cols)
    for (auto& v : c)
      if (!(is >> v)) throw ParameterError("read_matrix: truncated column data");
  return CombMatrix(m, n, d, std::move(cols));
}

void save_matrix(const std::string& path, const CombMatrix& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_matrix(os, a);
  if (!os) throw IoError("write failed: " + path);
}

CombMatrix load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path + " for reading");
  return read_matrix(is);
}

}  // namespace confomp
