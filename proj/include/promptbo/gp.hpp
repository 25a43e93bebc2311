#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "promptbo/space.hpp"

namespace promptbo {

struct KernelParams {
    double lengthscale = 0.5;
    double signal_variance = 1.0;
    double noise_variance = 1e-4;

    // Throws GpError on non-positive lengthscale / signal variance, negative
    // noise, or non-finite values.
    void validate() const;
};

/// Matérn-5/2 covariance as a function of Euclidean distance.
double matern52(double distance, double lengthscale, double signal_variance);

double matern52(const ContinuousPoint& a, const ContinuousPoint& b, const KernelParams& params);

// Diagonal regularisation ladder tried in order until Cholesky succeeds.
inline constexpr std::array<double, 5> kJitterLadder = {1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

/// Value and gradient of the log marginal likelihood. The gradient is taken
/// with respect to (log lengthscale, log signal variance, log noise variance).
struct LogLikelihood {
    double value = 0.0;
    std::array<double, 3> gradient{};
};

/// Exact GP log evidence of already-standardised targets:
///   -1/2 y^T C^-1 y - 1/2 log|C| - n/2 log 2pi,  C = K + (noise + jitter) I.
/// Throws FactorizationError if C cannot be factorised at any jitter level.
LogLikelihood log_marginal_likelihood(const KernelParams& params, std::span<const ContinuousPoint> inputs,
                                      std::span<const double> targets);

/// Bounds in natural log space, for standardised targets.
struct HyperparameterBounds {
    std::array<double, 3> lower{std::log(0.005), std::log(0.05), std::log(1e-6)};
    std::array<double, 3> upper{std::log(10.0), std::log(20.0), std::log(1.0)};
};

struct FitConfig {
    HyperparameterBounds bounds;
    // Quasi-random candidates scored before local refinement.
    int n_candidates = 64;
    // Best candidates refined by projected BFGS.
    int n_starts = 8;
    int max_iterations = 60;
    // Skip the likelihood search and use these hyperparameters as given.
    std::optional<KernelParams> fixed;
};

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
};

// Posterior plus gradients with respect to the query coordinates.
struct PosteriorGradient {
    Posterior value;
    Eigen::VectorXd mean_gradient;
    Eigen::VectorXd variance_gradient;
};

/// Exact Gaussian-process regression over points of the unit box with a
/// Matérn-5/2 kernel and a single isotropic lengthscale.
///
/// Targets are standardised (mean 0, sample standard deviation 1 when n >= 2
/// and the scores are not constant); every prediction is mapped back to raw
/// score units. The model is immutable: update() returns a new, fully refit
/// model.
class GPModel {
  public:
    /// Throws GpError on an empty dataset, mismatched sizes or dimensions,
    /// non-finite scores, or when no hyperparameter setting can be factorised.
    static GPModel fit(std::vector<ContinuousPoint> inputs, std::vector<double> scores, const FitConfig& config = {});

    /// Refit on the training set plus (x, score), hyperparameters included.
    GPModel update(const ContinuousPoint& x, double score) const;

    /// Predictive mean and latent variance in raw score units.
    Posterior posterior(const ContinuousPoint& x) const;
    Posterior posterior(const Eigen::VectorXd& x) const;
    PosteriorGradient posterior_with_gradient(const Eigen::VectorXd& x) const;

    const KernelParams& params() const noexcept { return params_; }
    const FitConfig& config() const noexcept { return config_; }
    std::size_t size() const noexcept { return inputs_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    double target_shift() const noexcept { return shift_; }
    double target_scale() const noexcept { return scale_; }
    // Jitter that was needed on top of the noise variance.
    double jitter() const noexcept { return jitter_; }
    double log_likelihood() const noexcept { return log_likelihood_; }
    const std::vector<ContinuousPoint>& inputs() const noexcept { return inputs_; }
    const std::vector<double>& targets() const noexcept { return scores_; }
    const Eigen::VectorXd& standardized_targets() const noexcept { return y_std_; }
    const Eigen::MatrixXd& cholesky_factor() const noexcept { return factor_; }
    const Eigen::VectorXd& alpha() const noexcept { return alpha_; }

    /// Debug dump: {inputs, targets, lengthscale, signal_variance,
    /// noise_variance, shift, scale}. Not a stable format.
    nlohmann::json to_json() const;

  private:
    GPModel() = default;
    void check_dimension(Eigen::Index size) const;
    Eigen::VectorXd cross_covariance(const Eigen::VectorXd& x) const;

    std::vector<ContinuousPoint> inputs_;
    std::vector<double> scores_;
    FitConfig config_;
    std::size_t dimension_ = 0;
    Eigen::MatrixXd points_;  // dimension x n
    Eigen::VectorXd y_std_;
    double shift_ = 0.0;
    double scale_ = 1.0;
    KernelParams params_;
    double jitter_ = 0.0;
    double log_likelihood_ = 0.0;
    Eigen::MatrixXd factor_;  // lower Cholesky factor of K + (noise + jitter) I
    Eigen::VectorXd alpha_;
};

}  // namespace promptbo
