#include "wtn/google.hpp"

#include "wtn/error.hpp"

#include <cmath>
#include <string>

namespace wtn {

GoogleMatrix::GoogleMatrix(Eigen::MatrixXd matrix, double alpha, FlowDirection direction)
    : matrix_(std::move(matrix)), alpha_(alpha), direction_(direction) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("damping factor must lie in (0, 1)");
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) throw Error("Google matrix must be square");
}

GoogleMatrix build_google(const ShareMatrices& shares, double alpha, FlowDirection direction) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("damping factor must lie in (0, 1)");
    const bool imports = direction == FlowDirection::imports;
    const Eigen::MatrixXd& s = imports ? shares.import_shares : shares.export_shares;
    const std::vector<bool>& dangling = imports ? shares.import_dangling : shares.export_dangling;

    const Eigen::Index n = s.rows();
    const double teleport = (1.0 - alpha) / static_cast<double>(n);
    const double uniform = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (dangling[static_cast<std::size_t>(j)]) {
            g.col(j).setConstant(alpha * uniform + teleport);
        } else {
            g.col(j) = (alpha * s.col(j)).array() + teleport;
        }
    }
    return GoogleMatrix(std::move(g), alpha, direction);
}

RankResult power_iterate(const GoogleMatrix& g, const PowerIterationOptions& options) {
    if (!(options.tolerance > 0.0)) throw Error("power iteration tolerance must be positive");
    if (options.max_iterations < 1) throw Error("power iteration needs at least one iteration");

    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd next(n);
    double residual = 0.0;
    std::vector<double> history;
    for (int k = 1; k <= options.max_iterations; ++k) {
        next.noalias() = g.matrix() * v;
        next /= next.sum();
        residual = (next - v).lpNorm<1>();
        v.swap(next);
        history.push_back(residual);
        if (residual <= options.tolerance) return RankResult{std::move(v), k, residual, std::move(history)};
    }
    throw ConvergenceError("power iteration did not converge in " + std::to_string(options.max_iterations) +
                               " iterations",
                           residual);
}

GoogleRanks google_ranks(const ShareMatrices& shares, double alpha, const PowerIterationOptions& options) {
    return GoogleRanks{power_iterate(build_google(shares, alpha, FlowDirection::imports), options),
                       power_iterate(build_google(shares, alpha, FlowDirection::exports), options)};
}

} // namespace wtn
