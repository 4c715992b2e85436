// Deterministic local minimization for small fixed-dimension smooth
// objectives: Nelder-Mead descent followed by a finite-difference Newton
// polish, plus the Halton sequence used to seed multi-starts reproducibly.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stringlab {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeResult {
  std::vector<double> x;
  double value = 0;
  double grad_norm = 0;  // finite-difference gradient norm at x
  int evaluations = 0;
};

struct MinimizeOptions {
  int max_iterations = 4000;
  double simplex_scale = 0.5;
  double f_tol = 1e-13;
  int polish_steps = 12;
  double fd_step = 1e-5;
};

MinimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const MinimizeOptions& opts = {});

// Nelder-Mead then damped Newton steps with central-difference derivatives.
MinimizeResult minimize(const Objective& f, const std::vector<double>& x0,
                        const MinimizeOptions& opts = {});

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double h);

// k-th point of the Halton sequence in [0,1)^dim (prime bases 2,3,5,...).
std::vector<double> halton(int k, int dim);

// Raised when a descent fails its convergence certificate; carries the best
// iterate found so far.
class OptimizerError : public std::runtime_error {
 public:
  OptimizerError(const std::string& what, MinimizeResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const MinimizeResult& best() const { return best_; }

 private:
  MinimizeResult best_;
};

}  // namespace stringlab
