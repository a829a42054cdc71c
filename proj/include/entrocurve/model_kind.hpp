#pragma once

#include <string>
#include <vector>

namespace entrocurve {

enum class ModelTag { Custom, LatticeBox, Hypercube, CompleteGraph, Circle, BernoulliLaplace };

// Which family a space was built from, with the parameters the cost
// functionals need. Spaces loaded from JSON are tagged Custom.
struct ModelKind {
  ModelTag tag = ModelTag::Custom;
  std::vector<int> lo, hi;     // LatticeBox bounds (inclusive)
  std::vector<double> alphas;  // Hypercube Bernoulli parameters
  std::vector<double> mu;      // CompleteGraph measure
  int N = 0;                   // Circle length
  int n = 0, kappa = 0;        // BernoulliLaplace slice

  bool operator==(const ModelKind&) const = default;
};

const char* model_tag_name(ModelTag tag);

}  // namespace entrocurve
