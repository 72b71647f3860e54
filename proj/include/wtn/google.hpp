#pragma once

#include "wtn/flow.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace wtn {

enum class FlowDirection {
    imports,  // G, built from S; Perron vector is the PageRank
    exports,  // G*, built from S*; Perron vector is the CheiRank
};

inline constexpr double default_damping = 0.85;

// Dense column-stochastic Google matrix alpha * S + (1 - alpha) / N, where
// dangling columns of S are replaced by the uniform column before damping.
class GoogleMatrix {
public:
    GoogleMatrix(Eigen::MatrixXd matrix, double alpha, FlowDirection direction);

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    double alpha() const noexcept { return alpha_; }
    FlowDirection direction() const noexcept { return direction_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

private:
    Eigen::MatrixXd matrix_;
    double alpha_;
    FlowDirection direction_;
};

GoogleMatrix build_google(const ShareMatrices& shares, double alpha = default_damping,
                          FlowDirection direction = FlowDirection::imports);

struct RankResult {
    Eigen::VectorXd vector;
    int iterations = 0;
    double residual = 0.0;  // L1 norm of the last update
    std::vector<double> residuals;  // one per iteration
};

struct PowerIterationOptions {
    double tolerance = 1e-12;
    int max_iterations = 10'000;
};

// Power iteration from the uniform vector. Throws ConvergenceError when
// max_iterations is exhausted.
RankResult power_iterate(const GoogleMatrix& g, const PowerIterationOptions& options = {});

struct GoogleRanks {
    RankResult pagerank;
    RankResult cheirank;
};

GoogleRanks google_ranks(const ShareMatrices& shares, double alpha = default_damping,
                         const PowerIterationOptions& options = {});

} // namespace wtn
