#pragma once

#include "wtn/flow.hpp"
#include "wtn/google.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wtn {

// Mean column mass of each component: sum of all elements divided by N_r.
// For a column-stochastic G_R, total == 1 and total == direct + pagerank + hidden.
struct ComponentWeights {
    double total = 0.0;     // W_R
    double direct = 0.0;    // W_rr
    double pagerank = 0.0;  // W_pr
    double hidden = 0.0;    // W_qr
};

// Reduced Google matrix of a country subset, G_R = G_rr + G_pr + G_qr.
// Row/column i refers to subset[i].
struct ReducedGoogle {
    std::vector<std::size_t> subset;
    Eigen::MatrixXd reduced;   // G_R
    Eigen::MatrixXd direct;    // G_rr
    Eigen::MatrixXd pagerank;  // G_pr, rank one
    Eigen::MatrixXd hidden;    // G_qr, may hold negative entries
    // Leading eigenvalue of the scattering block; empty when the subset is
    // the whole network.
    std::optional<double> lambda_c;
    int series_terms = 0;
    ComponentWeights weights;
    double negative_weight_ratio = 1.0;  // (W+ - W-) / (W+ + W-) over G_qr
};

struct ReductionOptions {
    double eigen_tolerance = 1e-12;
    int eigen_max_iterations = 200'000;
    double series_tolerance = 1e-14;  // stop once a term's max |element| drops below
    int series_max_terms = 10'000;
};

// Throws Error for an empty/invalid subset and ConvergenceError when the
// eigenvector or the hidden-link series does not converge.
ReducedGoogle reduce(const GoogleMatrix& g, std::span<const std::size_t> subset, const ReductionOptions& options = {});

ComponentWeights component_weights(const ReducedGoogle& r);

// (W+ - W-) / (W+ + W-) with W+ the mean of positive entries and W- the mean
// absolute value of negative entries. Returns 1 when there are no negative
// entries.
double negative_weight_ratio(const Eigen::MatrixXd& m);

struct ReducedStats {
    // T_c: row sum of G_R without the diagonal term, per subset position.
    std::vector<double> incoming_totals;
    ComponentWeights weights;
    double negative_weight_ratio = 1.0;
    std::optional<double> lambda_c;
    // Subset positions sorted by descending max(P_c, P*_c).
    std::vector<std::size_t> order;
};

ReducedStats component_stats(const ReducedGoogle& r, const RankWeights& rank_weights);

} // namespace wtn
