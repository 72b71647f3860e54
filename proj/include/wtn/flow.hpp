#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace wtn {

// Yearly money matrix: values(c, c') is the volume imported by c from c'.
// Entries are finite and non-negative, the diagonal is zero.
class TradeMatrix {
public:
    TradeMatrix(int year, Eigen::MatrixXd values);

    int year() const noexcept { return year_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(std::size_t importer, std::size_t exporter) const {
        return values_(static_cast<Eigen::Index>(importer), static_cast<Eigen::Index>(exporter));
    }

    // Same flows with every direction inverted.
    TradeMatrix transposed() const;

private:
    int year_;
    Eigen::MatrixXd values_;
};

struct TradeTotals {
    Eigen::VectorXd imports;  // M_c, row sums
    Eigen::VectorXd exports;  // M*_c, column sums
    double total = 0.0;       // M
};

TradeTotals totals(const TradeMatrix& m);

// Column-stochastic share matrices. A column whose total is zero is left at
// zero and flagged dangling; completion happens when the Google matrix is built.
struct ShareMatrices {
    Eigen::MatrixXd import_shares;         // S(c, c') = M(c, c') / M*_{c'}
    Eigen::MatrixXd export_shares;         // S*(c, c') = M(c', c) / M_{c'}
    std::vector<bool> import_dangling;     // zero-export countries
    std::vector<bool> export_dangling;     // zero-import countries

    std::size_t size() const noexcept { return static_cast<std::size_t>(import_shares.rows()); }
};

ShareMatrices compute_shares(const TradeMatrix& m);

// ImportRank P_c = M_c / M and ExportRank P*_c = M*_c / M.
struct RankWeights {
    Eigen::VectorXd import_rank;
    Eigen::VectorXd export_rank;
};

// Throws InputError("empty trade year") when the matrix carries no flow.
RankWeights compute_rank_weights(const TradeMatrix& m);

// Countries with any import or export in the year.
std::vector<bool> data_mask(const TradeMatrix& m);

} // namespace wtn
