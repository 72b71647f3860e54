#pragma once

#include "wtn/error.hpp"
#include "wtn/flow.hpp"
#include "wtn/google.hpp"
#include "wtn/registry.hpp"
#include "wtn/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wtn {

using CurrencyId = std::uint8_t;

// Currencies in order, and the frozen members of each. For two currencies,
// currencies[0] is the "minus" currency (spin -1) and currencies[1] the "plus"
// one (spin +1).
struct CoreGroupSpec {
    std::vector<std::string> currencies;
    std::vector<std::vector<std::size_t>> members;  // parallel to currencies

    std::size_t currency_count() const noexcept { return currencies.size(); }

    // Throws Error unless there are >= 2 currencies, members are valid
    // indices below country_count and the member sets are disjoint.
    void validate(std::size_t country_count) const;

    // Per-country core currency, nullopt for free countries.
    std::vector<std::optional<CurrencyId>> frozen_currency(std::size_t country_count) const;

    static CoreGroupSpec from_iso3(std::vector<std::string> currencies,
                                   const std::map<std::string, std::vector<std::string>>& members_by_currency,
                                   const CountryRegistry& registry);
};

enum class WeightMode {
    import_export,       // (P + P*) / 2
    pagerank_cheirank,   // (psi + psi*) / 2
    uniform,             // 1
};

WeightMode parse_weight_mode(std::string_view text);
std::string_view to_string(WeightMode mode);

// Immutable data the update rule reads. coupling(c, c') holds
// (S(c', c) + S*(c', c)) * w(c'), the weight of partner c' in the score of c.
class ScoringContext {
public:
    // partner_weight is w(c') for every country.
    ScoringContext(const ShareMatrices& shares, const Eigen::VectorXd& partner_weight);

    std::size_t size() const noexcept { return n_; }
    double coupling(std::size_t c, std::size_t partner) const noexcept { return coupling_[c * n_ + partner]; }
    std::span<const double> coupling_row(std::size_t c) const noexcept { return {coupling_.data() + c * n_, n_}; }
    // No weighted trade tie at all: the country keeps whatever TCP it has.
    bool isolated(std::size_t c) const noexcept { return isolated_[c]; }
    const std::vector<bool>& isolated_mask() const noexcept { return isolated_; }

private:
    std::size_t n_;
    std::vector<double> coupling_;
    std::vector<bool> isolated_;
};

// Partner weights for a weight mode. `ranks` is only read for pagerank_cheirank.
Eigen::VectorXd partner_weights(WeightMode mode, const RankWeights& weights, const GoogleRanks* ranks = nullptr);

ScoringContext make_scoring_context(const ShareMatrices& shares, const RankWeights& weights, WeightMode mode,
                                    const GoogleRanks* ranks = nullptr);

struct OpinionState {
    std::vector<CurrencyId> tcp;
    std::vector<bool> frozen;

    std::size_t size() const noexcept { return tcp.size(); }
    friend bool operator==(const OpinionState&, const OpinionState&) = default;
};

// State with core members frozen on their currency and every other country
// set to `fill`.
OpinionState make_state(const CoreGroupSpec& core, std::size_t country_count, CurrencyId fill = 0);

// FNV-1a over the TCP labels.
std::uint64_t fingerprint(const OpinionState& state);

// Two-currency score Z_c = sum_{c' != c} sigma(c') * coupling(c, c'), with
// sigma = -1 for currency 0 and +1 for currency 1. Throws Error when the state
// carries a third currency.
double tcp_score_two(std::size_t c, const OpinionState& state, const ScoringContext& ctx);

// Multi-currency scores Z_{c,k}, normalized to sum to 1. nullopt when the
// country has no weighted trade tie.
std::optional<std::vector<double>> tcp_scores_multi(std::size_t c, const OpinionState& state,
                                                    const ScoringContext& ctx, std::size_t currency_count);

// Single Z_{c,k}; throws Error for an isolated country.
double tcp_score_multi(std::size_t c, CurrencyId currency, const OpinionState& state, const ScoringContext& ctx,
                       std::size_t currency_count);

// Asynchronous update rule over a fixed scoring context.
class Dynamics {
public:
    Dynamics(const ScoringContext& ctx, std::size_t currency_count);
    Dynamics(ScoringContext&&, std::size_t) = delete;

    std::size_t currency_count() const noexcept { return currencies_; }

    // Currency the rule assigns to c given the rest of the state: for two
    // currencies, currency 1 iff Z_c >= 0; otherwise the argmax of Z_{c,k},
    // keeping the current TCP on exact ties. Isolated countries keep theirs.
    CurrencyId preferred(std::size_t c, const OpinionState& state) const;

    // Countries the sweep visits: not frozen and not isolated.
    std::vector<std::size_t> free_countries(const OpinionState& state) const;

    // Visits every free country once in a fresh random order, updating in
    // place. Returns true iff some TCP changed.
    bool sweep(OpinionState& state, rng::Engine& rng) const;

    // Same as sweep() with a caller-chosen visiting order.
    bool sweep_in_order(OpinionState& state, std::span<const std::size_t> order) const;

    // True when no free country would change (so every ordering leaves the
    // state unchanged).
    bool is_fixed_point(const OpinionState& state) const;

    const ScoringContext& context() const noexcept { return ctx_; }

private:
    const ScoringContext& ctx_;
    std::size_t currencies_;
};

struct SteadyStateResult {
    OpinionState state;
    int sweeps = 0;  // tau: sweeps executed, including the final unchanged one
    bool converged = false;
    // Fingerprints of the last states visited when not converged.
    std::vector<std::uint64_t> recent_fingerprints;
};

class SteadyStateError : public Error {
public:
    SteadyStateError(const std::string& what, std::vector<std::uint64_t> fingerprints)
        : Error(what), fingerprints_(std::move(fingerprints)) {}
    const std::vector<std::uint64_t>& fingerprints() const noexcept { return fingerprints_; }

private:
    std::vector<std::uint64_t> fingerprints_;
};

// Sweeps until one sweep changes nothing. Never throws on non-convergence;
// check `converged`.
SteadyStateResult relax(const Dynamics& dynamics, OpinionState state, int max_sweeps, rng::Engine& rng,
                        std::vector<std::size_t>* currency0_counts = nullptr);

// Throwing variant: SteadyStateError when max_sweeps is exhausted.
SteadyStateResult run_to_steady_state(const Dynamics& dynamics, OpinionState initial, int max_sweeps,
                                      rng::Engine& rng);

struct Attractor {
    std::vector<std::size_t> counts;  // countries with data per currency
    std::vector<double> fractions;
    std::size_t runs = 0;
    double probability = 0.0;  // runs / converged runs
};

struct EnsembleOptions {
    double initial_fraction = 0.5;  // f_i, probability of currency 0 (two-currency mode)
    std::size_t runs = 10'000;
    std::uint64_t seed = 1;
    int max_sweeps = 100;
    unsigned jobs = 1;
    bool keep_final_states = false;
};

struct EnsembleSummary {
    std::vector<std::string> currencies;
    std::vector<int> frozen_currency;  // -1 for free countries
    std::vector<bool> no_data;
    double initial_fraction = 0.0;
    std::size_t runs = 0;
    std::size_t converged_runs = 0;
    std::size_t non_converged_runs = 0;
    std::size_t counted_countries = 0;  // countries with data
    std::vector<Attractor> attractors;  // sorted by counts
    // pref_prob[c][k]: fraction of converged runs ending with c on currency k.
    std::vector<std::vector<double>> pref_prob;
    double mean_sweeps = 0.0;
    double mean_final_fraction = 0.0;  // currency 0
    // Currency-0 fraction after each sweep, averaged over converged runs
    // (finished runs hold their final value). Entry 0 is the initial state.
    std::vector<double> mean_fraction_by_sweep;
    // Per-run final labels, only with EnsembleOptions::keep_final_states.
    std::vector<std::vector<CurrencyId>> final_states;
    std::vector<bool> final_converged;
};

// Independent runs from random initial states. Two currencies: each free
// country starts on currency 0 with probability f_i. More currencies: each
// free country starts on a uniformly random currency. Run r uses the engine
// derived from (seed, r), so results do not depend on `jobs`.
EnsembleSummary run_ensemble(const CoreGroupSpec& core, const ScoringContext& ctx, const EnsembleOptions& options);

struct GroupLabel {
    enum class Kind { fixed, swing, no_data };
    Kind kind = Kind::swing;
    CurrencyId currency = 0;  // only for Kind::fixed

    friend bool operator==(const GroupLabel&, const GroupLabel&) = default;
};

std::string group_name(const GroupLabel& label, std::span<const std::string> currencies);

// Fixed-k iff every converged run at every grid point ends on k; otherwise
// swing. Core members are fixed on their currency; countries without data
// are labeled no_data. Throws Error when summaries disagree on the scenario.
std::vector<GroupLabel> classify_groups(std::span<const EnsembleSummary> summaries);

} // namespace wtn
