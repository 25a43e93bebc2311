#include "promptbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "promptbo/box_ascent.hpp"
#include "promptbo/error.hpp"

namespace promptbo {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964091736687313;

Eigen::MatrixXd to_matrix(std::span<const ContinuousPoint> inputs) {
    const auto dim = static_cast<Eigen::Index>(inputs.front().size());
    Eigen::MatrixXd points(dim, static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (static_cast<Eigen::Index>(inputs[i].size()) != dim) {
            throw GpError("input " + std::to_string(i) + " has dimension " + std::to_string(inputs[i].size()) +
                          ", expected " + std::to_string(dim));
        }
        points.col(static_cast<Eigen::Index>(i)) = inputs[i].coords();
    }
    return points;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.cols();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double d = (points.col(i) - points.col(j)).norm();
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    return dist;
}

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

std::optional<Factorization> factorize(const Eigen::MatrixXd& kernel, double noise) {
    Factorization f;
    for (const double jitter : kJitterLadder) {
        Eigen::MatrixXd c = kernel;
        c.diagonal().array() += noise + jitter;
        f.llt.compute(c);
        if (f.llt.info() == Eigen::Success) {
            f.jitter = jitter;
            return f;
        }
    }
    return std::nullopt;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& dist, const KernelParams& p) {
    return dist.unaryExpr([&](double d) { return matern52(d, p.lengthscale, p.signal_variance); });
}

// Evidence of standardised targets given precomputed pairwise distances.
std::optional<LogLikelihood> evidence(const Eigen::MatrixXd& dist, const Eigen::VectorXd& y, const KernelParams& p,
                                      bool with_gradient) {
    const Eigen::MatrixXd kernel = kernel_matrix(dist, p);
    const std::optional<Factorization> f = factorize(kernel, p.noise_variance);
    if (!f) {
        return std::nullopt;
    }
    const auto n = static_cast<double>(y.size());
    const Eigen::VectorXd alpha = f->llt.solve(y);
    const double log_det = 2.0 * f->llt.matrixLLT().diagonal().array().log().sum();

    LogLikelihood out;
    out.value = -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
    if (!with_gradient) {
        return out;
    }

    const Eigen::MatrixXd c_inv = f->llt.solve(Eigen::MatrixXd::Identity(y.size(), y.size()));
    // dK/dlog(l) = s e^-u u^2 (1 + u) / 3 with u = sqrt5 d / l.
    const Eigen::MatrixXd d_lengthscale = dist.unaryExpr([&](double d) {
        const double u = kSqrt5 * d / p.lengthscale;
        return p.signal_variance * std::exp(-u) * u * u * (1.0 + u) / 3.0;
    });
    auto half_trace = [&](const Eigen::MatrixXd& dk) {
        return 0.5 * (alpha.dot(dk * alpha) - c_inv.cwiseProduct(dk).sum());
    };
    out.gradient[0] = half_trace(d_lengthscale);
    out.gradient[1] = half_trace(kernel);
    out.gradient[2] = 0.5 * p.noise_variance * (alpha.squaredNorm() - c_inv.trace());
    return out;
}

KernelParams from_log(const Eigen::Vector3d& theta) {
    return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
}

double radical_inverse(unsigned index, unsigned base) {
    double result = 0.0;
    double fraction = 1.0 / base;
    while (index > 0) {
        result += fraction * (index % base);
        index /= base;
        fraction /= base;
    }
    return result;
}

}  // namespace

void KernelParams::validate() const {
    if (!std::isfinite(lengthscale) || lengthscale <= 0.0) {
        throw GpError("lengthscale must be positive and finite");
    }
    if (!std::isfinite(signal_variance) || signal_variance <= 0.0) {
        throw GpError("signal variance must be positive and finite");
    }
    if (!std::isfinite(noise_variance) || noise_variance < 0.0) {
        throw GpError("noise variance must be non-negative and finite");
    }
}

double matern52(double distance, double lengthscale, double signal_variance) {
    const double u = kSqrt5 * distance / lengthscale;
    return signal_variance * (1.0 + u + u * u / 3.0) * std::exp(-u);
}

double matern52(const ContinuousPoint& a, const ContinuousPoint& b, const KernelParams& params) {
    if (a.size() != b.size()) {
        throw GpError("kernel arguments differ in dimension: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
    }
    params.validate();
    return matern52((a.coords() - b.coords()).norm(), params.lengthscale, params.signal_variance);
}

LogLikelihood log_marginal_likelihood(const KernelParams& params, std::span<const ContinuousPoint> inputs,
                                      std::span<const double> targets) {
    if (inputs.empty()) {
        throw GpError("log marginal likelihood needs at least one observation");
    }
    if (inputs.size() != targets.size()) {
        throw GpError("inputs and targets differ in length");
    }
    params.validate();
    const Eigen::MatrixXd dist = pairwise_distances(to_matrix(inputs));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
    std::optional<LogLikelihood> result = evidence(dist, y, params, true);
    if (!result) {
        throw FactorizationError("kernel matrix is not positive definite even with jitter " +
                                 std::to_string(kJitterLadder.back()));
    }
    return *result;
}

GPModel GPModel::fit(std::vector<ContinuousPoint> inputs, std::vector<double> scores, const FitConfig& config) {
    if (inputs.empty()) {
        throw GpError("cannot fit a Gaussian process on an empty dataset");
    }
    if (inputs.size() != scores.size()) {
        throw GpError("got " + std::to_string(inputs.size()) + " inputs but " + std::to_string(scores.size()) +
                      " scores");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw GpError("score " + std::to_string(i) + " is not finite");
        }
    }
    if (config.n_starts < 1 || config.n_candidates < config.n_starts) {
        throw GpError("fit needs n_candidates >= n_starts >= 1");
    }

    GPModel model;
    model.config_ = config;
    model.points_ = to_matrix(inputs);
    model.dimension_ = inputs.front().size();

    const auto n = static_cast<Eigen::Index>(scores.size());
    const Eigen::VectorXd raw = Eigen::Map<const Eigen::VectorXd>(scores.data(), n);
    model.shift_ = raw.mean();
    model.scale_ = 1.0;
    const bool constant = std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores.front(); });
    if (n >= 2 && !constant) {
        const double ss = (raw.array() - model.shift_).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd > 0.0) {
            model.scale_ = sd;
        }
    }
    model.y_std_ = (raw.array() - model.shift_) / model.scale_;

    const Eigen::MatrixXd dist = pairwise_distances(model.points_);

    if (config.fixed) {
        config.fixed->validate();
        model.params_ = *config.fixed;
    } else {
        const auto& b = config.bounds;
        const Eigen::Vector3d lower(b.lower[0], b.lower[1], b.lower[2]);
        const Eigen::Vector3d upper(b.upper[0], b.upper[1], b.upper[2]);

        // Score a Halton design over the log box, then refine the best ones.
        struct Candidate {
            double value;
            int index;
            Eigen::Vector3d theta;
        };
        std::vector<Candidate> candidates;
        constexpr std::array<unsigned, 3> bases = {2, 3, 5};
        for (int i = 0; i < config.n_candidates; ++i) {
            Eigen::Vector3d theta;
            for (int d = 0; d < 3; ++d) {
                theta[d] = lower[d] + (upper[d] - lower[d]) * radical_inverse(static_cast<unsigned>(i + 1), bases[d]);
            }
            if (auto e = evidence(dist, model.y_std_, from_log(theta), false)) {
                candidates.push_back({e->value, i, theta});
            }
        }
        if (candidates.empty()) {
            throw FactorizationError("no hyperparameter candidate gives a positive definite kernel matrix");
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
        candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(config.n_starts)));

        const AscentObjective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) -> std::optional<double> {
            const std::optional<LogLikelihood> e = evidence(dist, model.y_std_, from_log(theta), true);
            if (!e) {
                return std::nullopt;
            }
            grad = Eigen::Vector3d(e->gradient[0], e->gradient[1], e->gradient[2]);
            return e->value;
        };
        AscentOptions options;
        options.max_iterations = config.max_iterations;
        options.initial_step = 1.0;
        options.step_tolerance = 1e-7;
        options.gradient_tolerance = 1e-6;

        double best_value = -std::numeric_limits<double>::infinity();
        Eigen::Vector3d best_theta = candidates.front().theta;
        for (const Candidate& c : candidates) {
            const AscentResult r = ascend_in_box(objective, c.theta, lower, upper, options);
            if (r.value > best_value) {
                best_value = r.value;
                best_theta = r.x;
            }
        }
        model.params_ = from_log(best_theta);
    }

    const Eigen::MatrixXd kernel = kernel_matrix(dist, model.params_);
    std::optional<Factorization> f = factorize(kernel, model.params_.noise_variance);
    if (!f) {
        throw FactorizationError("kernel matrix is not positive definite even with jitter " +
                                 std::to_string(kJitterLadder.back()) + "; inputs are degenerate for noise " +
                                 std::to_string(model.params_.noise_variance));
    }
    model.jitter_ = f->jitter;
    model.factor_ = f->llt.matrixL();
    model.alpha_ = f->llt.solve(model.y_std_);
    model.log_likelihood_ = -0.5 * model.y_std_.dot(model.alpha_) - model.factor_.diagonal().array().log().sum() -
                            0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    model.inputs_ = std::move(inputs);
    model.scores_ = std::move(scores);
    return model;
}

GPModel GPModel::update(const ContinuousPoint& x, double score) const {
    check_dimension(static_cast<Eigen::Index>(x.size()));
    std::vector<ContinuousPoint> inputs = inputs_;
    std::vector<double> scores = scores_;
    inputs.push_back(x);
    scores.push_back(score);
    return fit(std::move(inputs), std::move(scores), config_);
}

void GPModel::check_dimension(Eigen::Index size) const {
    if (static_cast<std::size_t>(size) != dimension_) {
        throw GpError("query has dimension " + std::to_string(size) + ", model expects " + std::to_string(dimension_));
    }
}

Eigen::VectorXd GPModel::cross_covariance(const Eigen::VectorXd& x) const {
    Eigen::VectorXd k(points_.cols());
    for (Eigen::Index i = 0; i < points_.cols(); ++i) {
        k[i] = matern52((points_.col(i) - x).norm(), params_.lengthscale, params_.signal_variance);
    }
    return k;
}

Posterior GPModel::posterior(const ContinuousPoint& x) const { return posterior(x.coords()); }

Posterior GPModel::posterior(const Eigen::VectorXd& x) const {
    check_dimension(x.size());
    const Eigen::VectorXd k = cross_covariance(x);
    const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(k);
    const double variance = std::max(0.0, params_.signal_variance - v.squaredNorm());
    return {shift_ + scale_ * k.dot(alpha_), scale_ * scale_ * variance};
}

PosteriorGradient GPModel::posterior_with_gradient(const Eigen::VectorXd& x) const {
    check_dimension(x.size());
    const Eigen::Index n = points_.cols();
    const double a = kSqrt5 / params_.lengthscale;
    Eigen::VectorXd k(n);
    Eigen::MatrixXd dk(points_.rows(), n);  // column i: dk_i/dx
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd diff = x - points_.col(i);
        const double r = diff.norm();
        const double e = std::exp(-a * r);
        k[i] = params_.signal_variance * (1.0 + a * r + a * a * r * r / 3.0) * e;
        dk.col(i) = (-params_.signal_variance * a * a / 3.0 * (1.0 + a * r) * e) * diff;
    }
    const auto lower = factor_.triangularView<Eigen::Lower>();
    const Eigen::VectorXd v = lower.solve(k);
    const Eigen::VectorXd w = lower.transpose().solve(v);
    const double variance = params_.signal_variance - v.squaredNorm();

    PosteriorGradient out;
    out.value = {shift_ + scale_ * k.dot(alpha_), scale_ * scale_ * std::max(0.0, variance)};
    out.mean_gradient = scale_ * (dk * alpha_);
    out.variance_gradient = (-2.0 * scale_ * scale_) * (dk * w);
    return out;
}

nlohmann::json GPModel::to_json() const {
    nlohmann::json inputs = nlohmann::json::array();
    for (const ContinuousPoint& p : inputs_) {
        inputs.push_back(std::vector<double>(p.coords().data(), p.coords().data() + p.coords().size()));
    }
    return {{"inputs", inputs},
            {"targets", scores_},
            {"lengthscale", params_.lengthscale},
            {"signal_variance", params_.signal_variance},
            {"noise_variance", params_.noise_variance},
            {"shift", shift_},
            {"scale", scale_}};
}

}  // namespace promptbo
