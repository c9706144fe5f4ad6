#include "confomp/signals.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <sstream>

#include "confomp/errors.hpp"
#include "confomp/rng.hpp"

namespace confomp {

SignalModel SignalModel::gaussian(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
    throw ParameterError("Gaussian law requires finite mu and sigma > 0");
  return SignalModel(GaussianLaw{mu, sigma});
}

SignalModel SignalModel::flat(double theta) {
  if (theta == 0.0 || !std::isfinite(theta))
    throw ParameterError("flat law requires a finite nonzero amplitude");
  return SignalModel(FlatLaw{theta});
}

SignalModel SignalModel::custom(std::function<double(double)> cdf, int grid_points, double tail) {
  if (!cdf) throw ParameterError("custom law requires a CDF");
  if (grid_points < 16) throw ParameterError("custom law grid needs at least 16 points");
  if (!(tail > 0.0 && tail < 0.5)) throw ParameterError("custom law tail must be in (0, 0.5)");
  return SignalModel(CustomLaw{std::move(cdf), grid_points, tail});
}

std::string SignalModel::describe() const {
  std::ostringstream os;
  if (auto g = std::get_if<GaussianLaw>(&law_))
    os << "gaussian(" << g->mu << "," << g->sigma << ")";
  else if (auto f = std::get_if<FlatLaw>(&law_))
    os << "flat(" << f->theta << ")";
  else
    os << "custom";
  return os.str();
}

std::vector<double> SparseSignal::dense() const {
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = values[k];
  return x;
}

namespace {

struct ValueSampler {
  Rng& rng;
  double operator()(const GaussianLaw& g) const {
    std::normal_distribution<double> dist(g.mu, g.sigma);
    double v = 0.0;
    while (v == 0.0) v = dist(rng);
    return v;
  }
  double operator()(const FlatLaw& f) const { return f.theta; }
  double operator()(const CustomLaw& c) const {
    // Inverse-CDF sampling by bisection.
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double v = 0.0;
    while (v == 0.0) {
      const double u = u01(rng);
      double lo = -1.0, hi = 1.0;
      while (c.cdf(lo) > u) lo *= 2.0;
      while (c.cdf(hi) < u) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (c.cdf(mid) < u ? lo : hi) = mid;
      }
      v = 0.5 * (lo + hi);
    }
    return v;
  }
};

}  // namespace

SparseSignal gen_signal(Index n, Index k, const SignalModel& model, std::uint64_t seed) {
  if (k < 1 || k > n) throw ParameterError("gen_signal: sparsity must satisfy 1 <= K <= n");
  Rng rng(seed);
  std::vector<Index> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  SparseSignal s{n, IndexList(pool.begin(), pool.begin() + k), {}, model};
  std::sort(s.support.begin(), s.support.end());
  s.values.reserve(k);
  for (Index i = 0; i < k; ++i) s.values.push_back(std::visit(ValueSampler{rng}, model.law()));
  return s;
}

std::vector<double> gen_noise(Index m, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw ParameterError("gen_noise: eta must be non-negative");
  std::vector<double> v(m, 0.0);
  if (eta == 0.0) return v;
  Rng rng(seed);
  std::uniform_real_distribution<double> dist(-eta, eta);
  for (auto& e : v) e = dist(rng);
  return v;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Lumped-mass discretisation of a custom law. Component values are snapped
// to a uniform grid x_0 + k h (mass of cell [x_k - h/2, x_k + h/2]); sums
// then live on ell x_0 + k h and their CDF is read off by linear
// interpolation between cell edges, which is second order in h.
struct ConvolutionTable::Grid {
  double x0 = 0.0;
  double h = 0.0;
  std::vector<std::vector<double>> cumulative;  // per ell, cumulative mass

  double cdf(int ell, double x) const {
    const auto& c = cumulative[ell - 1];
    const double s = (x - ell * x0) / h + 0.5;  // c[k] sits at s = k + 1
    if (s <= 0.0) return 0.0;
    const double len = static_cast<double>(c.size());
    if (s >= len) return 1.0;
    const auto k = static_cast<std::size_t>(std::floor(s));
    const double lo = k == 0 ? 0.0 : c[k - 1];
    const double hi = c[k];
    return std::clamp(lo + (s - std::floor(s)) * (hi - lo), 0.0, 1.0);
  }
};

namespace {

std::mutex fftw_plan_mutex;

double quantile(const std::function<double(double)>& cdf, double p) {
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 2000 && cdf(lo) > p; ++i) lo *= 2.0;
  for (int i = 0; i < 2000 && cdf(hi) < p; ++i) hi *= 2.0;
  if (cdf(lo) > p || cdf(hi) < p) throw ParameterError("custom CDF does not reach its limits");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ConvolutionTable::ConvolutionTable(SignalModel model, int max_ell)
    : model_(std::move(model)), max_ell_(max_ell) {
  if (max_ell < 1) throw ParameterError("convolution order must be >= 1");
  const auto* custom = std::get_if<CustomLaw>(&model_.law());
  if (!custom) return;

  const auto& cdf = custom->cdf;
  const double q_lo = quantile(cdf, custom->tail);
  const double q_hi = quantile(cdf, 1.0 - custom->tail);
  if (!(q_hi > q_lo)) throw ParameterError("custom CDF has a degenerate quantile range");
  const int n_pts = custom->grid_points;

  grid_ = std::make_unique<Grid>();
  grid_->x0 = q_lo;
  grid_->h = (q_hi - q_lo) / (n_pts - 1);
  const double h = grid_->h;

  std::vector<double> mass(n_pts);
  double prev = cdf(q_lo - 0.5 * h);
  if (prev < 0.0 || prev > 1.0) throw ParameterError("custom CDF left the unit interval");
  for (int k = 0; k < n_pts; ++k) {
    const double next = cdf(q_lo + (k + 0.5) * h);
    if (next < prev - 1e-15) throw ParameterError("custom CDF is decreasing");
    mass[k] = next - prev;
    prev = next;
  }
  mass.front() += cdf(q_lo - 0.5 * h);
  mass.back() += 1.0 - prev;

  const std::size_t support_len = static_cast<std::size_t>(max_ell) * (n_pts - 1) + 1;
  std::size_t fft_len = 1;
  while (fft_len < support_len) fft_len <<= 1;
  const std::size_t spec_len = fft_len / 2 + 1;

  std::vector<double> real_buf(fft_len, 0.0);
  std::vector<std::complex<double>> spectrum(spec_len), work(spec_len);
  fftw_plan forward, backward;
  {
    std::lock_guard lock(fftw_plan_mutex);
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(fft_len), real_buf.data(),
                                   reinterpret_cast<fftw_complex*>(spectrum.data()),
                                   FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(fft_len),
                                    reinterpret_cast<fftw_complex*>(work.data()), real_buf.data(),
                                    FFTW_ESTIMATE);
  }
  std::copy(mass.begin(), mass.end(), real_buf.begin());
  fftw_execute(forward);

  grid_->cumulative.resize(max_ell);
  std::vector<std::complex<double>> power(spec_len, 1.0);
  for (int ell = 1; ell <= max_ell; ++ell) {
    for (std::size_t f = 0; f < spec_len; ++f) power[f] *= spectrum[f];
    work = power;  // c2r destroys its input
    fftw_execute(backward);
    const std::size_t len = static_cast<std::size_t>(ell) * (n_pts - 1) + 1;
    auto& c = grid_->cumulative[ell - 1];
    c.resize(len);
    double acc = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      acc += real_buf[k] / static_cast<double>(fft_len);
      c[k] = acc;
    }
  }
  {
    std::lock_guard lock(fftw_plan_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
}

ConvolutionTable::~ConvolutionTable() = default;
ConvolutionTable::ConvolutionTable(ConvolutionTable&&) noexcept = default;
ConvolutionTable& ConvolutionTable::operator=(ConvolutionTable&&) noexcept = default;

double ConvolutionTable::cdf(int ell, double x) const {
  if (ell < 1 || ell > max_ell_) throw ParameterError("convolution order out of range");
  if (auto g = std::get_if<GaussianLaw>(&model_.law()))
    return normal_cdf((x - ell * g->mu) / (g->sigma * std::sqrt(static_cast<double>(ell))));
  if (auto f = std::get_if<FlatLaw>(&model_.law())) return x >= ell * f->theta ? 1.0 : 0.0;
  return grid_->cdf(ell, x);
}

double ConvolutionTable::mass_near_zero(int ell, double eps) const {
  if (!(eps >= 0.0)) throw ParameterError("epsilon must be non-negative");
  return std::max(0.0, cdf(ell, eps) - cdf(ell, -eps));
}

double ConvolutionTable::max_mass_near_zero(double eps) const {
  double best = 0.0;
  for (int ell = 1; ell <= max_ell_; ++ell) best = std::max(best, mass_near_zero(ell, eps));
  return best;
}

double cdf_conv(const SignalModel& model, int ell, double x) {
  if (ell < 1) throw ParameterError("cdf_conv: ell must be >= 1");
  return ConvolutionTable(model, ell).cdf(ell, x);
}

}  // namespace confomp
