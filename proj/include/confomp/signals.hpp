#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "confomp/combmat.hpp"

namespace confomp {

struct GaussianLaw {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Constant amplitude: every nonzero component equals theta.
struct FlatLaw {
  double theta = 1.0;
};

/// Arbitrary law given only by its CDF; self-convolutions are evaluated on a
/// grid spanning the `tail` and 1-`tail` quantiles with `grid_points` nodes.
struct CustomLaw {
  std::function<double(double)> cdf;
  int grid_points = 1 << 14;
  double tail = 1e-9;
};

/// Law of the i.i.d. nonzero components of a sparse signal.
class SignalModel {
 public:
  using Law = std::variant<GaussianLaw, FlatLaw, CustomLaw>;

  static SignalModel gaussian(double mu = 0.0, double sigma = 1.0);
  static SignalModel flat(double theta = 1.0);
  static SignalModel custom(std::function<double(double)> cdf, int grid_points = 1 << 14,
                            double tail = 1e-9);

  const Law& law() const { return law_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianLaw>(law_); }
  bool is_flat() const { return std::holds_alternative<FlatLaw>(law_); }
  std::string describe() const;

 private:
  explicit SignalModel(Law law) : law_(std::move(law)) {}
  Law law_;
};

struct SparseSignal {
  Index n = 0;
  IndexList support;           // sorted, distinct
  std::vector<double> values;  // aligned with support, all nonzero
  SignalModel model = SignalModel::gaussian();

  Index sparsity() const { return static_cast<Index>(support.size()); }
  std::vector<double> dense() const;
};

/// Exactly-K signal with uniformly random support and i.i.d. values.
SparseSignal gen_signal(Index n, Index k, const SignalModel& model, std::uint64_t seed);

/// i.i.d. U(-eta, eta) noise vector.
std::vector<double> gen_noise(Index m, double eta, std::uint64_t seed);

/// Standard normal CDF.
double normal_cdf(double z);

/// F^{*ell}(x): the CDF of the sum of ell i.i.d. components drawn from `model`.
double cdf_conv(const SignalModel& model, int ell, double x);

/// Precomputed self-convolutions F^{*1} ... F^{*max_ell}. Analytic for the
/// Gaussian and flat laws; for custom laws the grid convolution is done once
/// here (FFT of the lumped grid masses) and reused for every query.
/// Documented absolute accuracy of the grid path: 1e-6.
class ConvolutionTable {
 public:
  ConvolutionTable(SignalModel model, int max_ell);
  ~ConvolutionTable();
  ConvolutionTable(ConvolutionTable&&) noexcept;
  ConvolutionTable& operator=(ConvolutionTable&&) noexcept;

  int max_ell() const { return max_ell_; }
  double cdf(int ell, double x) const;
  /// F^{*ell}(eps) - F^{*ell}(-eps).
  double mass_near_zero(int ell, double eps) const;
  /// max over ell in [1, max_ell] of mass_near_zero(ell, eps).
  double max_mass_near_zero(double eps) const;

 private:
  struct Grid;
  SignalModel model_;
  int max_ell_;
  std::unique_ptr<Grid> grid_;
};

}  // namespace confomp
