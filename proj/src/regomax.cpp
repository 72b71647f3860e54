#include "wtn/regomax.hpp"

#include "wtn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wtn {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

// Perron vector of a positive matrix, L1-normalized.
Eigen::VectorXd perron_vector(const Eigen::MatrixXd& a, const ReductionOptions& options) {
    const Eigen::Index n = a.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd next(n);
    double change = 0.0;
    for (int k = 0; k < options.eigen_max_iterations; ++k) {
        next.noalias() = a * v;
        next /= next.sum();
        change = (next - v).lpNorm<1>();
        v.swap(next);
        if (change <= options.eigen_tolerance) return v;
    }
    throw ConvergenceError("scattering-block eigenvector did not converge", change);
}

} // namespace

ReducedGoogle reduce(const GoogleMatrix& g, std::span<const std::size_t> subset, const ReductionOptions& options) {
    const std::size_t n = g.size();
    if (subset.empty()) throw Error("reduction subset is empty");
    std::vector<bool> selected(n, false);
    for (std::size_t c : subset) {
        if (c >= n) throw Error("reduction subset index " + std::to_string(c) + " out of range");
        if (selected[c]) throw Error("reduction subset index " + std::to_string(c) + " repeated");
        selected[c] = true;
    }
    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < n; ++c)
        if (!selected[c]) rest.push_back(c);

    ReducedGoogle r;
    r.subset.assign(subset.begin(), subset.end());
    const auto nr = static_cast<Eigen::Index>(subset.size());
    r.direct = submatrix(g.matrix(), r.subset, r.subset);

    if (rest.empty()) {
        r.reduced = r.direct;
        r.pagerank = Eigen::MatrixXd::Zero(nr, nr);
        r.hidden = Eigen::MatrixXd::Zero(nr, nr);
    } else {
        const Eigen::MatrixXd g_rs = submatrix(g.matrix(), r.subset, rest);
        const Eigen::MatrixXd g_sr = submatrix(g.matrix(), rest, r.subset);
        const Eigen::MatrixXd g_ss = submatrix(g.matrix(), rest, rest);

        // Spectral projector of the leading eigenvalue: P = right * left^T
        // with left . right = 1.
        const Eigen::VectorXd right = perron_vector(g_ss, options);
        Eigen::VectorXd left = perron_vector(g_ss.transpose(), options);
        left /= left.dot(right);
        const double lambda = left.dot(g_ss * right);
        if (!(lambda < 1.0)) throw Error("scattering block has leading eigenvalue >= 1");
        r.lambda_c = lambda;

        const Eigen::RowVectorXd left_g_sr = left.transpose() * g_sr;
        r.pagerank = (g_rs * right) * left_g_sr / (1.0 - lambda);

        // Q * sum_l G_ss^l * Q * G_sr, each term re-projected onto the
        // complement of the leading eigenvector.
        auto project = [&](Eigen::MatrixXd& t) { t.noalias() -= right * (left.transpose() * t); };
        Eigen::MatrixXd term = g_sr;
        project(term);
        Eigen::MatrixXd series = term;
        Eigen::MatrixXd next(term.rows(), term.cols());
        int terms = 1;
        double size = term.cwiseAbs().maxCoeff();
        while (size >= options.series_tolerance) {
            if (terms >= options.series_max_terms)
                throw ConvergenceError("hidden-link series did not converge in " +
                                           std::to_string(options.series_max_terms) + " terms",
                                       size);
            next.noalias() = g_ss * term;
            project(next);
            term.swap(next);
            series += term;
            ++terms;
            size = term.cwiseAbs().maxCoeff();
        }
        r.series_terms = terms;
        r.hidden = g_rs * series;
        r.reduced = r.direct + r.pagerank + r.hidden;
    }

    r.weights = component_weights(r);
    r.negative_weight_ratio = negative_weight_ratio(r.hidden);
    return r;
}

ComponentWeights component_weights(const ReducedGoogle& r) {
    const double nr = static_cast<double>(r.subset.size());
    return ComponentWeights{r.reduced.sum() / nr, r.direct.sum() / nr, r.pagerank.sum() / nr, r.hidden.sum() / nr};
}

double negative_weight_ratio(const Eigen::MatrixXd& m) {
    double positive_sum = 0.0;
    double negative_sum = 0.0;
    std::size_t positive_count = 0;
    std::size_t negative_count = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double v = m(i, j);
            if (v > 0.0) {
                positive_sum += v;
                ++positive_count;
            } else if (v < 0.0) {
                negative_sum -= v;
                ++negative_count;
            }
        }
    }
    if (negative_count == 0) return 1.0;
    const double w_plus = positive_count ? positive_sum / static_cast<double>(positive_count) : 0.0;
    const double w_minus = negative_sum / static_cast<double>(negative_count);
    return (w_plus - w_minus) / (w_plus + w_minus);
}

ReducedStats component_stats(const ReducedGoogle& r, const RankWeights& rank_weights) {
    ReducedStats stats;
    const auto nr = static_cast<Eigen::Index>(r.subset.size());
    stats.incoming_totals.resize(r.subset.size());
    for (Eigen::Index i = 0; i < nr; ++i)
        stats.incoming_totals[static_cast<std::size_t>(i)] = r.reduced.row(i).sum() - r.reduced(i, i);
    stats.weights = r.weights;
    stats.negative_weight_ratio = r.negative_weight_ratio;
    stats.lambda_c = r.lambda_c;

    auto importance = [&](std::size_t pos) {
        const auto c = static_cast<Eigen::Index>(r.subset[pos]);
        return std::max(rank_weights.import_rank(c), rank_weights.export_rank(c));
    };
    stats.order.resize(r.subset.size());
    std::iota(stats.order.begin(), stats.order.end(), std::size_t{0});
    std::stable_sort(stats.order.begin(), stats.order.end(),
                     [&](std::size_t a, std::size_t b) { return importance(a) > importance(b); });
    return stats;
}

} // namespace wtn
