#pragma once

// Sparse random combinatorial measurement matrices: m x n binary matrices
// with exactly d ones per column, stored column-wise as sorted row lists.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace confomp {

using Index = std::int32_t;
using IndexList = std::vector<Index>;

/// Machine-independent work tally for one solver run.
///
/// `additions` and `comparisons` together make up the identification work
/// (one correlation costs d-1 additions, selecting a maximum among c
/// candidates costs c-1 comparisons). `preprocessing_flops` is the n-flop
/// charge for building the confined set and `threshold_tests` the m
/// |y_i| <= eps tests behind it.
struct OpCounter {
  std::uint64_t additions = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t preprocessing_flops = 0;
  std::uint64_t threshold_tests = 0;
  std::uint64_t inner_products = 0;

  std::uint64_t identification_flops() const { return additions + comparisons; }
  /// Identification plus preprocessing, the currency of the complexity table.
  std::uint64_t total_flops() const { return identification_flops() + preprocessing_flops; }

  OpCounter& operator+=(const OpCounter& o) {
    additions += o.additions;
    comparisons += o.comparisons;
    preprocessing_flops += o.preprocessing_flops;
    threshold_tests += o.threshold_tests;
    inner_products += o.inner_products;
    return *this;
  }
  bool operator==(const OpCounter&) const = default;
};

class CombMatrix {
 public:
  /// Validates and takes ownership of the column supports. Each column must
  /// hold exactly d strictly increasing indices in [0, m).
  CombMatrix(Index m, Index n, Index d, std::vector<IndexList> cols);

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index degree() const { return d_; }

  std::span<const Index> column(Index j) const;
  /// Columns having a one in row i, ascending.
  std::span<const Index> row(Index i) const;

  /// True when d > m/2, outside the regime the analysis assumes.
  bool degree_warning() const { return 2 * static_cast<std::int64_t>(d_) > m_; }

  /// Dense 0/1 entry lookup; O(log d).
  bool at(Index i, Index j) const;

 private:
  Index m_;
  Index n_;
  Index d_;
  std::vector<IndexList> cols_;
  // CSR row -> column adjacency, built once.
  std::vector<Index> row_ptr_;
  std::vector<Index> row_cols_;
};

/// Each column is an independent uniform draw over all C(m,d) supports.
CombMatrix gen_comb_matrix(Index m, Index n, Index d, std::uint64_t seed);

/// y = A x. When `counter` is given, adds (d-1) additions per nonzero x_j.
std::vector<double> matvec(const CombMatrix& a, std::span<const double> x,
                           OpCounter* counter = nullptr);

/// A_j^T r; counts d-1 additions and one inner product.
double col_correlation(const CombMatrix& a, Index j, std::span<const double> r,
                       OpCounter* counter = nullptr);

/// Text format: first line "m n d", then one line per column holding its
/// d row indices separated by single spaces.
void write_matrix(std::ostream& os, const CombMatrix& a);
CombMatrix read_matrix(std::istream& is);
void save_matrix(const std::string& path, const CombMatrix& a);
CombMatrix load_matrix(const std::string& path);

}  // namespace confomp
