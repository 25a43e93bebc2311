#pragma once

#include <vector>

#include <Eigen/Core>

#include "promptbo/gp.hpp"
#include "promptbo/space.hpp"

namespace promptbo {

struct AcquisitionConfig {
    double beta = 2.0;
    int n_restarts = 8;
    int n_raw_probes = 512;
    int max_ascent_steps = 50;
    double step_tolerance = 1e-6;

    // Throws ConfigError unless beta >= 0 and n_raw_probes >= n_restarts >= 1.
    void validate() const;
};

/// Upper confidence bound mu(x) + beta * sigma(x).
double ucb(const GPModel& model, const ContinuousPoint& x, double beta);
double ucb(const GPModel& model, const Eigen::VectorXd& x, double beta);

struct AcquisitionResult {
    ContinuousPoint point;
    double value;
    // Largest UCB among the raw probes; value >= best_probe_value always.
    double best_probe_value;
};

/// Uniform probes of the unit box, drawn in the order maximize() draws them.
std::vector<Eigen::VectorXd> draw_probes(std::size_t dimension, int count, Rng& rng);

/// Multi-start UCB maximisation over the unit box. Draws n_raw_probes uniform
/// points, keeps the n_restarts best, and refines each by projected
/// quasi-Newton ascent with analytic posterior gradients. Candidates are
/// compared in restart order and ties keep the earlier restart.
AcquisitionResult maximize(const GPModel& model, const PromptSpace& space, const AcquisitionConfig& config, Rng& rng);

}  // namespace promptbo
