#include "promptbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "promptbo/box_ascent.hpp"
#include "promptbo/error.hpp"

namespace promptbo {

void AcquisitionConfig::validate() const {
    if (!std::isfinite(beta) || beta < 0.0) {
        throw ConfigError("beta must be a finite non-negative number");
    }
    if (n_restarts < 1 || n_raw_probes < n_restarts) {
        throw ConfigError("acquisition needs n_raw_probes >= n_restarts >= 1");
    }
    if (max_ascent_steps < 1) {
        throw ConfigError("max_ascent_steps must be positive");
    }
    if (!(step_tolerance > 0.0)) {
        throw ConfigError("step_tolerance must be positive");
    }
}

double ucb(const GPModel& model, const Eigen::VectorXd& x, double beta) {
    const Posterior p = model.posterior(x);
    return p.mean + beta * std::sqrt(p.variance);
}

double ucb(const GPModel& model, const ContinuousPoint& x, double beta) { return ucb(model, x.coords(), beta); }

std::vector<Eigen::VectorXd> draw_probes(std::size_t dimension, int count, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::VectorXd> probes(static_cast<std::size_t>(count));
    for (auto& p : probes) {
        p.resize(static_cast<Eigen::Index>(dimension));
        for (Eigen::Index d = 0; d < p.size(); ++d) {
            p[d] = unit(rng);
        }
    }
    return probes;
}

AcquisitionResult maximize(const GPModel& model, const PromptSpace& space, const AcquisitionConfig& config, Rng& rng) {
    config.validate();
    if (model.dimension() != space.length()) {
        throw GpError("model dimension " + std::to_string(model.dimension()) + " does not match prompt length " +
                      std::to_string(space.length()));
    }
    const std::vector<Eigen::VectorXd> probes = draw_probes(space.length(), config.n_raw_probes, rng);
    std::vector<double> values(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        values[i] = ucb(model, probes[i], config.beta);
    }
    std::vector<std::size_t> order(probes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    const double beta = config.beta;
    const AscentObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> std::optional<double> {
        const PosteriorGradient pg = model.posterior_with_gradient(x);
        const double sigma = std::sqrt(pg.value.variance);
        grad = pg.mean_gradient;
        // sigma is not differentiable where the variance vanishes.
        if (beta > 0.0 && sigma > 1e-12) {
            grad += (beta / (2.0 * sigma)) * pg.variance_gradient;
        }
        return pg.value.mean + beta * sigma;
    };
    AscentOptions options;
    options.max_iterations = config.max_ascent_steps;
    options.step_tolerance = config.step_tolerance;
    options.gradient_tolerance = 1e-10;
    options.initial_step = 0.1;

    const Eigen::VectorXd lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.length()));
    const Eigen::VectorXd upper = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(space.length()));

    const double best_probe = values[order.front()];
    Eigen::VectorXd best_x = probes[order.front()];
    double best_value = best_probe;
    for (int r = 0; r < config.n_restarts; ++r) {
        const std::size_t start = order[static_cast<std::size_t>(r)];
        AscentResult refined = ascend_in_box(objective, probes[start], lower, upper, options);
        // Score candidates with the plain posterior so every comparison uses one code path.
        const double value = ucb(model, refined.x, beta);
        if (value > best_value) {
            best_value = value;
            best_x = std::move(refined.x);
        }
    }
    return {ContinuousPoint(std::move(best_x)), best_value, best_probe};
}

}  // namespace promptbo
