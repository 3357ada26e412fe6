#pragma once

#include <vector>

namespace jeanie {

// Query form: dim x K x K' x tau (support form has K = K' = 1).
// Storage: the dim-vector of cell (k, k', t) is contiguous at
// ((k*Kp + kp)*tau + t)*dim.
struct FeatureMap {
  int dim = 0;
  int K = 1;
  int Kp = 1;
  int tau = 0;
  std::vector<double> data;

  const double* slice(int k, int kp, int t) const {
    return data.data() + (static_cast<std::size_t>((k * Kp + kp) * tau + t)) * dim;
  }
  double* slice(int k, int kp, int t) {
    return data.data() + (static_cast<std::size_t>((k * Kp + kp) * tau + t)) * dim;
  }
};

}  // namespace jeanie
