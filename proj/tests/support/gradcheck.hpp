#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "flowids/encoder.hpp"

namespace flowids::testing {

struct TensorCheck {
  std::string name;
  double rel_error = 0.0;
  double analytic_norm = 0.0;
};

// Central differences for every element of every tensor. The error per tensor
// is ||analytic - numeric|| / max(||analytic||, ||numeric||); tensors whose
// gradients are both below `floor` in norm compare absolutely instead.
template <typename P, typename LossFn>
std::vector<TensorCheck> gradient_check(P params, const P& analytic, LossFn loss, double eps = 1e-3,
                                        double floor = 1e-9) {
  std::vector<const Matrix<double>*> grads;
  analytic.visit([&](const std::string&, const Matrix<double>& g) { grads.push_back(&g); });
  std::vector<TensorCheck> out;
  std::size_t k = 0;
  // Collect pointers first: loss() reads the whole parameter set.
  std::vector<std::pair<std::string, Matrix<double>*>> slots;
  params.visit([&](const std::string& name, Matrix<double>& m) { slots.emplace_back(name, &m); });
  for (auto& [name, m] : slots) {
    const Matrix<double>& g = *grads[k++];
    Matrix<double> numeric(m->rows(), m->cols());
    for (Eigen::Index i = 0; i < m->size(); ++i) {
      const double saved = m->data()[i];
      m->data()[i] = saved + eps;
      const double up = loss(params);
      m->data()[i] = saved - eps;
      const double down = loss(params);
      m->data()[i] = saved;
      numeric.data()[i] = (up - down) / (2.0 * eps);
    }
    const double diff = (g - numeric).norm();
    const double scale = std::max(g.norm(), numeric.norm());
    out.push_back({name, scale < floor ? diff : diff / scale, g.norm()});
  }
  return out;
}

inline double worst(const std::vector<TensorCheck>& checks, std::string* name = nullptr) {
  double w = 0.0;
  for (const auto& c : checks) {
    if (c.rel_error >= w) {
      w = c.rel_error;
      if (name) *name = c.name;
    }
  }
  return w;
}

}  // namespace flowids::testing
