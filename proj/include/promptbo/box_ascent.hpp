#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include <Eigen/Core>

namespace promptbo {

struct AscentOptions {
    int max_iterations = 100;
    // Stop once a step moves no coordinate by more than this.
    double step_tolerance = 1e-8;
    // Stop once the projected gradient has infinity norm below this.
    double gradient_tolerance = 1e-8;
    // Upper bound on the infinity norm of the first trial step.
    double initial_step = 1.0;
    int max_backtracks = 30;
    double armijo = 1e-4;
};

struct AscentResult {
    Eigen::VectorXd x;
    double value = -std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/// Objective for box ascent: returns f(x) and writes the gradient, or returns
/// nullopt where f is undefined (treated as -inf, the step is rejected).
using AscentObjective = std::function<std::optional<double>(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Projected quasi-Newton (BFGS) ascent inside [lower, upper]. Steps are only
/// taken when they satisfy the Armijo condition, so the returned value is never
/// below f(clamp(start)). Variables sitting on a bound with the gradient
/// pointing outward are frozen for the iteration.
AscentResult ascend_in_box(const AscentObjective& f, const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper, const AscentOptions& options = {});

}  // namespace promptbo
