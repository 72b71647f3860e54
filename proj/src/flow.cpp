#include "wtn/flow.hpp"

#include "wtn/error.hpp"

#include <cmath>
#include <string>

namespace wtn {

TradeMatrix::TradeMatrix(int year, Eigen::MatrixXd values) : year_(year), values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw InputError("trade matrix must be square");
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        for (Eigen::Index i = 0; i < values_.rows(); ++i) {
            const double v = values_(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw InputError("trade matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") is negative or not finite");
            if (i == j && v != 0.0) throw InputError("trade matrix diagonal must be zero");
        }
    }
}

TradeMatrix TradeMatrix::transposed() const { return TradeMatrix(year_, values_.transpose()); }

TradeTotals totals(const TradeMatrix& m) {
    TradeTotals t;
    t.imports = m.values().rowwise().sum();
    t.exports = m.values().colwise().sum().transpose();
    t.total = t.imports.sum();
    const double by_exports = t.exports.sum();
    const double scale = std::max(std::abs(t.total), std::abs(by_exports));
    if (scale > 0.0 && std::abs(t.total - by_exports) > 1e-9 * scale)
        throw Error("import and export totals disagree");
    return t;
}

namespace {

// Divides each column j of `flows` by `column_totals[j]`; zero-total columns
// stay zero and are flagged.
void normalize_columns(Eigen::MatrixXd& flows, const Eigen::VectorXd& column_totals, std::vector<bool>& dangling) {
    dangling.assign(static_cast<std::size_t>(flows.cols()), false);
    for (Eigen::Index j = 0; j < flows.cols(); ++j) {
        if (column_totals(j) > 0.0) {
            flows.col(j) /= column_totals(j);
        } else {
            flows.col(j).setZero();
            dangling[static_cast<std::size_t>(j)] = true;
        }
    }
}

} // namespace

ShareMatrices compute_shares(const TradeMatrix& m) {
    const TradeTotals t = totals(m);
    ShareMatrices s;
    s.import_shares = m.values();
    normalize_columns(s.import_shares, t.exports, s.import_dangling);
    s.export_shares = m.values().transpose();
    normalize_columns(s.export_shares, t.imports, s.export_dangling);
    return s;
}

RankWeights compute_rank_weights(const TradeMatrix& m) {
    const TradeTotals t = totals(m);
    if (!(t.total > 0.0)) throw InputError("empty trade year " + std::to_string(m.year()));
    return RankWeights{t.imports / t.total, t.exports / t.total};
}

std::vector<bool> data_mask(const TradeMatrix& m) {
    const TradeTotals t = totals(m);
    std::vector<bool> mask(m.size());
    for (std::size_t c = 0; c < m.size(); ++c) {
        const auto i = static_cast<Eigen::Index>(c);
        mask[c] = t.imports(i) > 0.0 || t.exports(i) > 0.0;
    }
    return mask;
}

} // namespace wtn
