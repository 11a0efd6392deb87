#pragma once
#include <vector>

namespace rmt {

// One-dimensional quadrature rule: nodes x[i] with weights w[i].
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1]. Nodes by Newton iteration on P_n.
// Rules are cached per order; the returned reference stays valid.
const QuadRule& gauss_legendre(int order);

// Gauss-Hermite rule for the weight exp(-x^2) on the real line,
// exact for polynomials of degree <= 2*order - 1. Cached per order.
const QuadRule& gauss_hermite(int order);

// Tanh-sinh rule for integrals over (-1, 1); step h = 2^-level.
// Node count grows until the weights fall below 1e-17.
QuadRule tanh_sinh(int level);

// Gauss-Legendre nodes mapped to [a, b], split into `panels` equal panels.
QuadRule gl_panels(double a, double b, int order, int panels);

}  // namespace rmt
