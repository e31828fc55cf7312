// One-dimensional Gaussian kernel density estimate used generatively: a
// sample is a random data point plus N(0, h) noise, with the support rule
// deciding what happens off the edge.
#pragma once

#include <vector>

#include "gridflex/ev/rng.hpp"

namespace gridflex {

// linear-interpolation quantile at position (n-1)*p of the sorted sample
double quantile(std::vector<double> data, double p);

class GaussianKde {
 public:
  enum class Support {
    Real,           // unrestricted
    Positive,       // resample until the draw lands above zero
    WrapMinutes,    // fold onto [0, 1440) clock minutes
  };

  // bandwidth 0 means Silverman's rule, 0.9 min(sd, iqr/1.34) n^(-1/5),
  // floored at 1e-3 so degenerate samples still perturb
  GaussianKde(std::vector<double> data, Support support, double bandwidth = 0.0);

  double sample(Rng& rng) const;
  double bandwidth() const { return h_; }
  std::size_t size() const { return data_.size(); }

  // density of the (unfolded) estimate; Real support only, for tests
  double density(double x) const;

  static double silverman_bandwidth(const std::vector<double>& data);

 private:
  std::vector<double> data_;
  Support support_;
  double h_ = 0.0;
};

}  // namespace gridflex
