#include "promptbo/box_ascent.hpp"

#include <Eigen/Dense>

namespace promptbo {

AscentResult ascend_in_box(const AscentObjective& f, const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper, const AscentOptions& options) {
    const Eigen::Index n = start.size();
    Eigen::VectorXd x = start.cwiseMax(lower).cwiseMin(upper);
    Eigen::VectorXd grad(n);
    AscentResult result;
    result.x = x;

    const std::optional<double> first = f(x, grad);
    if (!first) {
        return result;
    }
    double value = *first;

    // Inverse Hessian approximation of -f.
    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    bool identity = true;

    Eigen::VectorXd trial(n);
    Eigen::VectorXd trial_grad(n);
    int iteration = 0;
    for (; iteration < options.max_iterations; ++iteration) {
        Eigen::VectorXd projected = grad;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool pinned_low = x[i] <= lower[i] && grad[i] < 0.0;
            const bool pinned_high = x[i] >= upper[i] && grad[i] > 0.0;
            if (pinned_low || pinned_high) {
                projected[i] = 0.0;
            }
        }
        if (projected.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            break;
        }

        Eigen::VectorXd direction = inv_hessian * projected;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (projected[i] == 0.0) {
                direction[i] = 0.0;
            }
        }
        if (!(direction.dot(projected) > 0.0)) {
            inv_hessian.setIdentity();
            identity = true;
            direction = projected;
        }

        double step = 1.0;
        if (identity) {
            step = std::min(1.0, options.initial_step / direction.lpNorm<Eigen::Infinity>());
        }

        bool accepted = false;
        double trial_value = value;
        for (int k = 0; k <= options.max_backtracks; ++k, step *= 0.5) {
            trial = (x + step * direction).cwiseMax(lower).cwiseMin(upper);
            const std::optional<double> v = f(trial, trial_grad);
            if (v && std::isfinite(*v) && *v >= value && *v >= value + options.armijo * grad.dot(trial - x)) {
                trial_value = *v;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (identity) {
                break;
            }
            inv_hessian.setIdentity();
            identity = true;
            continue;
        }

        const Eigen::VectorXd s = trial - x;
        const Eigen::VectorXd y = grad - trial_grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
            identity = false;
        }

        x = trial;
        grad = trial_grad;
        value = trial_value;
        if (s.lpNorm<Eigen::Infinity>() < options.step_tolerance) {
            ++iteration;
            break;
        }
    }

    result.x = std::move(x);
    result.value = value;
    result.iterations = iteration;
    return result;
}

}  // namespace promptbo
