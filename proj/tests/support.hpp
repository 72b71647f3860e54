#pragma once

// Random instance generators and independent reference computations shared by
// the unit and acceptance suites. Nothing here calls into the code paths it
// is used to check.

#include "wtn/flow.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <random>
#include <vector>

namespace wtn::testing {

using Rng = std::mt19937_64;

// Heavy-tailed random flows with zero diagonal. Each off-diagonal entry is
// present with probability `density`.
inline Eigen::MatrixXd random_flows(Rng& rng, int n, double density = 0.6) {
    std::bernoulli_distribution present(density);
    std::lognormal_distribution<double> size(0.0, 2.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j && present(rng)) m(i, j) = size(rng);
    return m;
}

// Like random_flows but every country trades in both directions with at
// least one partner.
inline Eigen::MatrixXd random_connected_flows(Rng& rng, int n, double density = 0.6) {
    Eigen::MatrixXd m = random_flows(rng, n, density);
    std::lognormal_distribution<double> size(0.0, 1.0);
    for (int c = 0; c < n; ++c) {
        const int next = (c + 1) % n;
        if (m(next, c) == 0.0) m(next, c) = size(rng);
        if (m(c, next) == 0.0) m(c, next) = size(rng);
    }
    return m;
}

// Column-stochastic share matrix of raw flows; zero columns become uniform.
inline Eigen::MatrixXd completed_shares(const Eigen::MatrixXd& flows) {
    const auto n = flows.rows();
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double total = flows.col(j).sum();
        if (total > 0.0)
            s.col(j) = flows.col(j) / total;
        else
            s.col(j).setConstant(1.0 / static_cast<double>(n));
    }
    return s;
}

inline Eigen::MatrixXd explicit_google(const Eigen::MatrixXd& flows, double alpha) {
    const auto n = flows.rows();
    return (alpha * completed_shares(flows)).array() + (1.0 - alpha) / static_cast<double>(n);
}

// Eigenvector of eigenvalue 1 from a dense eigen-decomposition, L1-normalized.
inline Eigen::VectorXd dense_perron(const Eigen::MatrixXd& g) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(g);
    const auto& values = solver.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i)
        if (std::abs(values(i) - 1.0) < std::abs(values(best) - 1.0)) best = i;
    Eigen::VectorXd v = solver.eigenvectors().col(best).real();
    return v / v.sum();
}

inline Eigen::MatrixXd pick(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                            const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

// Schur complement G_rr + G_rs (1 - G_ss)^-1 G_sr by a dense linear solve.
inline Eigen::MatrixXd direct_reduced(const Eigen::MatrixXd& g, const std::vector<std::size_t>& subset) {
    std::vector<bool> in(static_cast<std::size_t>(g.rows()), false);
    for (auto c : subset) in[c] = true;
    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < in.size(); ++c)
        if (!in[c]) rest.push_back(c);
    const Eigen::MatrixXd g_rr = pick(g, subset, subset);
    if (rest.empty()) return g_rr;
    const Eigen::MatrixXd g_rs = pick(g, subset, rest);
    const Eigen::MatrixXd g_sr = pick(g, rest, subset);
    const Eigen::MatrixXd g_ss = pick(g, rest, rest);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(g_ss.rows(), g_ss.cols());
    return g_rr + g_rs * (identity - g_ss).partialPivLu().solve(g_sr);
}

// Weight of partner p in the score of c, straight from the raw flows:
// (S(p, c) + S*(p, c)) * w(p) with w = (P + P*) / 2 (or 1 when uniform).
inline double raw_coupling(const Eigen::MatrixXd& flows, int c, int p, bool uniform = false) {
    const double total = flows.sum();
    const double exports_c = flows.col(c).sum();
    const double imports_c = flows.row(c).sum();
    const double s = exports_c > 0.0 ? flows(p, c) / exports_c : 0.0;
    const double s_star = imports_c > 0.0 ? flows(c, p) / imports_c : 0.0;
    const double w = uniform ? 1.0 : (flows.row(p).sum() / total + flows.col(p).sum() / total) / 2.0;
    return (s + s_star) * w;
}

// Two-currency score evaluated term by term; labels 0 -> -1, 1 -> +1.
inline double raw_score_two(const Eigen::MatrixXd& flows, int c, const std::vector<std::uint8_t>& labels,
                            bool uniform = false) {
    double z = 0.0;
    for (int p = 0; p < flows.rows(); ++p) {
        if (p == c) continue;
        const double term = raw_coupling(flows, c, p, uniform);
        z += labels[static_cast<std::size_t>(p)] == 0 ? -term : term;
    }
    return z;
}

// All sweep-invariant two-currency states: every free country already holds
// the label its score selects. Free countries are enumerated exhaustively.
inline std::vector<std::vector<std::uint8_t>> enumerate_fixed_points(const Eigen::MatrixXd& flows,
                                                                     const std::vector<int>& frozen_label,
                                                                     bool uniform = false) {
    std::vector<int> free;
    for (std::size_t c = 0; c < frozen_label.size(); ++c)
        if (frozen_label[c] < 0) free.push_back(static_cast<int>(c));
    std::vector<std::vector<std::uint8_t>> fixed;
    const std::uint64_t states = std::uint64_t{1} << free.size();
    std::vector<std::uint8_t> labels(frozen_label.size());
    for (std::uint64_t bits = 0; bits < states; ++bits) {
        for (std::size_t c = 0; c < frozen_label.size(); ++c)
            if (frozen_label[c] >= 0) labels[c] = static_cast<std::uint8_t>(frozen_label[c]);
        for (std::size_t i = 0; i < free.size(); ++i)
            labels[static_cast<std::size_t>(free[i])] = static_cast<std::uint8_t>((bits >> i) & 1u);
        bool stable = true;
        for (int c : free) {
            const std::uint8_t want = raw_score_two(flows, c, labels, uniform) >= 0.0 ? 1 : 0;
            if (want != labels[static_cast<std::size_t>(c)]) {
                stable = false;
                break;
            }
        }
        if (stable) fixed.push_back(labels);
    }
    return fixed;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("wtn_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline const std::vector<std::string>& toy_iso3() {
    static const std::vector<std::string> codes{"USA", "GBR", "CAN", "CHN", "RUS", "IND", "FRA",
                                                "DEU", "JPN", "BRA", "MEX", "NGA", "KOR", "TUR"};
    return codes;
}

// Registry plus one trade file per year (`trade_<year>.csv`) and a scenario
// config with cores USD = {USA, GBR} and BRI = {CHN, RUS}. TUR never trades.
inline std::filesystem::path write_toy_dataset(const std::filesystem::path& dir, const std::vector<int>& years,
                                               std::size_t n_conf = 200, std::uint64_t seed = 7) {
    const auto& codes = toy_iso3();
    {
        std::ofstream reg(dir / "countries.csv");
        reg << "index,iso3,name\n";
        for (std::size_t i = 0; i < codes.size(); ++i) reg << i << ',' << codes[i] << ",Country " << codes[i] << '\n';
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> value(1.0, 100.0);
    std::bernoulli_distribution tie(0.55);
    const std::size_t active = codes.size() - 1;
    for (int year : years) {
        std::ofstream trade(dir / ("trade_" + std::to_string(year) + ".csv"));
        trade << "year,exporter_iso3,importer_iso3,value_usd,category\n";
        for (std::size_t e = 0; e < active; ++e) {
            for (std::size_t i = 0; i < active; ++i) {
                if (e == i || !(tie(rng) || (e + 1) % active == i)) continue;
                trade << year << ',' << codes[e] << ',' << codes[i] << ',' << std::round(value(rng) * 1e6)
                      << ",aggregate\n";
                if (e == 4 || e == 11)
                    trade << year << ',' << codes[e] << ',' << codes[i] << ',' << std::round(value(rng) * 1e5)
                          << ",oil_gas\n";
            }
        }
    }
    std::ofstream cfg(dir / "scenario.json");
    cfg << R"({
  "name": "toy",
  "registry_file": "countries.csv",
  "trade_file": "trade_{year}.csv",
  "years": [)";
    for (std::size_t k = 0; k < years.size(); ++k) cfg << (k ? ", " : "") << years[k];
    cfg << R"(],
  "currencies": ["USD", "BRI"],
  "core_groups": {"USD": ["USA", "GBR"], "BRI": ["CHN", "RUS"]},
  "weight_mode": "import_export",
  "f_i_grid": [0.1, 0.5, 0.9],
  "n_conf": )" << n_conf << R"(,
  "seed": 11,
  "oil_gas_factor": 2.0
}
)";
    return dir / "scenario.json";
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace wtn::testing
