// Gauss-Legendre rules and adaptive Simpson integration.

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stringlab {

struct QuadNode {
  double x, w;
};

// Nodes and weights on [-1, 1]; cached per order. Deterministic Newton
// iteration on the Legendre recurrence.
std::span<const QuadNode> gauss_legendre(int n);

// Same rule mapped to [a, b].
std::vector<QuadNode> gauss_legendre(int n, double a, double b);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// Integrates several channels at once with a shared subdivision; the error
// control is on the max channel error.
std::vector<double> adaptive_simpson_multi(
    const std::function<std::vector<double>(double)>& f, double a, double b, double tol,
    int max_depth = 40);

}  // namespace stringlab
