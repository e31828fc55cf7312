#include "gridflex/ev/kde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridflex/ev/corpus.hpp"

namespace gridflex {

double quantile(std::vector<double> data, double p) {
  if (data.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
  std::sort(data.begin(), data.end());
  const double pos = (static_cast<double>(data.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= data.size()) return data.back();
  const double frac = pos - static_cast<double>(lo);
  return data[lo] * (1.0 - frac) + data[lo + 1] * frac;
}

double GaussianKde::silverman_bandwidth(const std::vector<double>& data) {
  const std::size_t n = data.size();
  if (n < 2) return 1e-3;
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : data) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double iqr = quantile(data, 0.75) - quantile(data, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  return std::max(h, 1e-3);
}

GaussianKde::GaussianKde(std::vector<double> data, Support support, double bandwidth)
    : data_(std::move(data)), support_(support) {
  if (data_.empty()) throw std::invalid_argument("kde: empty sample");
  h_ = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(data_);
}

double GaussianKde::sample(Rng& rng) const {
  const double base = data_[rng.uniform_below(data_.size())];
  switch (support_) {
    case Support::Real:
      return base + h_ * rng.normal();
    case Support::Positive: {
      // rejection against the sign keeps the shape near zero honest
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const double v = base + h_ * rng.normal();
        if (v > 0.0) return v;
      }
      return std::abs(base) + 1e-9;  // pathological bandwidth fallback
    }
    case Support::WrapMinutes: {
      double v = std::fmod(base + h_ * rng.normal(), kMinutesPerDay);
      if (v < 0.0) v += kMinutesPerDay;
      return v;
    }
  }
  return base;
}

double GaussianKde::density(double x) const {
  const double norm = 1.0 / (data_.size() * h_ * std::sqrt(2.0 * std::numbers::pi_v<double>));
  double sum = 0.0;
  for (double v : data_) {
    const double z = (x - v) / h_;
    sum += std::exp(-0.5 * z * z);
  }
  return norm * sum;
}

}  // namespace gridflex
