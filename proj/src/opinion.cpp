#include "wtn/opinion.hpp"

#include "wtn/error.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

namespace wtn {

void CoreGroupSpec::validate(std::size_t country_count) const {
    if (currencies.size() < 2) throw Error("at least two currencies are required");
    if (currencies.size() > 255) throw Error("too many currencies");
    if (members.size() != currencies.size()) throw Error("core group list does not match currencies");
    std::vector<bool> seen(country_count, false);
    for (std::size_t k = 0; k < members.size(); ++k) {
        for (std::size_t c : members[k]) {
            if (c >= country_count) throw Error("core group member index out of range");
            if (seen[c]) throw Error("country " + std::to_string(c) + " belongs to more than one core group");
            seen[c] = true;
        }
    }
}

std::vector<std::optional<CurrencyId>> CoreGroupSpec::frozen_currency(std::size_t country_count) const {
    validate(country_count);
    std::vector<std::optional<CurrencyId>> out(country_count);
    for (std::size_t k = 0; k < members.size(); ++k)
        for (std::size_t c : members[k]) out[c] = static_cast<CurrencyId>(k);
    return out;
}

CoreGroupSpec CoreGroupSpec::from_iso3(std::vector<std::string> currencies,
                                       const std::map<std::string, std::vector<std::string>>& members_by_currency,
                                       const CountryRegistry& registry) {
    CoreGroupSpec spec;
    spec.members.resize(currencies.size());
    for (const auto& [currency, codes] : members_by_currency) {
        auto it = std::find(currencies.begin(), currencies.end(), currency);
        if (it == currencies.end()) throw Error("core group for unknown currency '" + currency + "'");
        auto& members = spec.members[static_cast<std::size_t>(it - currencies.begin())];
        for (const auto& code : codes) members.push_back(registry.index_of(code));
    }
    spec.currencies = std::move(currencies);
    spec.validate(registry.size());
    return spec;
}

WeightMode parse_weight_mode(std::string_view text) {
    if (text == "import_export") return WeightMode::import_export;
    if (text == "pagerank_cheirank") return WeightMode::pagerank_cheirank;
    if (text == "uniform") return WeightMode::uniform;
    throw Error("unknown weight mode '" + std::string(text) + "'");
}

std::string_view to_string(WeightMode mode) {
    switch (mode) {
    case WeightMode::import_export: return "import_export";
    case WeightMode::pagerank_cheirank: return "pagerank_cheirank";
    case WeightMode::uniform: return "uniform";
    }
    return "unknown";
}

ScoringContext::ScoringContext(const ShareMatrices& shares, const Eigen::VectorXd& partner_weight)
    : n_(shares.size()), coupling_(n_ * n_, 0.0), isolated_(n_, true) {
    if (static_cast<std::size_t>(partner_weight.size()) != n_) throw Error("partner weight size mismatch");
    const Eigen::MatrixXd& s = shares.import_shares;
    const Eigen::MatrixXd& s_star = shares.export_shares;
    for (std::size_t c = 0; c < n_; ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        for (std::size_t p = 0; p < n_; ++p) {
            if (p == c) continue;
            const auto pi = static_cast<Eigen::Index>(p);
            const double value = (s(pi, ci) + s_star(pi, ci)) * partner_weight(pi);
            coupling_[c * n_ + p] = value;
            if (value > 0.0) isolated_[c] = false;
        }
    }
}

Eigen::VectorXd partner_weights(WeightMode mode, const RankWeights& weights, const GoogleRanks* ranks) {
    switch (mode) {
    case WeightMode::import_export: return (weights.import_rank + weights.export_rank) / 2.0;
    case WeightMode::pagerank_cheirank:
        if (!ranks) throw Error("pagerank_cheirank weights need Google ranks");
        return (ranks->pagerank.vector + ranks->cheirank.vector) / 2.0;
    case WeightMode::uniform: return Eigen::VectorXd::Ones(weights.import_rank.size());
    }
    throw Error("unknown weight mode");
}

ScoringContext make_scoring_context(const ShareMatrices& shares, const RankWeights& weights, WeightMode mode,
                                    const GoogleRanks* ranks) {
    return ScoringContext(shares, partner_weights(mode, weights, ranks));
}

OpinionState make_state(const CoreGroupSpec& core, std::size_t country_count, CurrencyId fill) {
    const auto frozen = core.frozen_currency(country_count);
    OpinionState state;
    state.tcp.assign(country_count, fill);
    state.frozen.assign(country_count, false);
    for (std::size_t c = 0; c < country_count; ++c) {
        if (frozen[c]) {
            state.tcp[c] = *frozen[c];
            state.frozen[c] = true;
        }
    }
    return state;
}

std::uint64_t fingerprint(const OpinionState& state) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (CurrencyId v : state.tcp) {
        h ^= v;
        h *= 0x100000001B3ULL;
    }
    return h;
}

namespace {

double signed_score(std::size_t c, const OpinionState& state, const ScoringContext& ctx) {
    const auto row = ctx.coupling_row(c);
    double z = 0.0;
    for (std::size_t p = 0; p < row.size(); ++p) {
        if (p == c) continue;
        z += state.tcp[p] == 0 ? -row[p] : row[p];
    }
    return z;
}

} // namespace

double tcp_score_two(std::size_t c, const OpinionState& state, const ScoringContext& ctx) {
    for (CurrencyId v : state.tcp)
        if (v > 1) throw Error("two-currency score used with more than two currencies");
    return signed_score(c, state, ctx);
}

namespace {

// Unnormalized per-currency sums; returns their total.
double currency_sums(std::size_t c, const OpinionState& state, const ScoringContext& ctx, std::span<double> sums) {
    std::fill(sums.begin(), sums.end(), 0.0);
    const auto row = ctx.coupling_row(c);
    for (std::size_t p = 0; p < row.size(); ++p) {
        if (p == c) continue;
        sums[state.tcp[p]] += row[p];
    }
    double total = 0.0;
    for (double s : sums) total += s;
    return total;
}

} // namespace

std::optional<std::vector<double>> tcp_scores_multi(std::size_t c, const OpinionState& state,
                                                    const ScoringContext& ctx, std::size_t currency_count) {
    std::vector<double> z(currency_count);
    const double total = currency_sums(c, state, ctx, z);
    if (!(total > 0.0)) return std::nullopt;
    for (double& v : z) v /= total;
    return z;
}

double tcp_score_multi(std::size_t c, CurrencyId currency, const OpinionState& state, const ScoringContext& ctx,
                       std::size_t currency_count) {
    if (currency >= currency_count) throw Error("currency id out of range");
    auto z = tcp_scores_multi(c, state, ctx, currency_count);
    if (!z) throw Error("country " + std::to_string(c) + " has no weighted trade ties");
    return (*z)[currency];
}

Dynamics::Dynamics(const ScoringContext& ctx, std::size_t currency_count) : ctx_(ctx), currencies_(currency_count) {
    if (currency_count < 2 || currency_count > 255) throw Error("dynamics need 2..255 currencies");
}

CurrencyId Dynamics::preferred(std::size_t c, const OpinionState& state) const {
    const CurrencyId current = state.tcp[c];
    if (ctx_.isolated(c)) return current;
    if (currencies_ == 2) return signed_score(c, state, ctx_) >= 0.0 ? CurrencyId{1} : CurrencyId{0};

    // Comparing the unnormalized sums picks the same argmax as Z_{c,k}.
    double buffer[256];
    std::span<double> sums(buffer, currencies_);
    currency_sums(c, state, ctx_, sums);
    double best = sums[current];
    CurrencyId choice = current;
    for (std::size_t k = 0; k < currencies_; ++k) {
        if (sums[k] > best) {
            best = sums[k];
            choice = static_cast<CurrencyId>(k);
        }
    }
    return choice;
}

std::vector<std::size_t> Dynamics::free_countries(const OpinionState& state) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < state.size(); ++c)
        if (!state.frozen[c] && !ctx_.isolated(c)) out.push_back(c);
    return out;
}

bool Dynamics::sweep_in_order(OpinionState& state, std::span<const std::size_t> order) const {
    bool changed = false;
    for (std::size_t c : order) {
        if (state.frozen[c]) continue;
        const CurrencyId next = preferred(c, state);
        if (next != state.tcp[c]) {
            state.tcp[c] = next;
            changed = true;
        }
    }
    return changed;
}

bool Dynamics::sweep(OpinionState& state, rng::Engine& rng) const {
    auto order = free_countries(state);
    rng::shuffle(order, rng);
    return sweep_in_order(state, order);
}

bool Dynamics::is_fixed_point(const OpinionState& state) const {
    for (std::size_t c = 0; c < state.size(); ++c)
        if (!state.frozen[c] && preferred(c, state) != state.tcp[c]) return false;
    return true;
}

namespace {

std::size_t count_currency0(const OpinionState& state, const std::vector<bool>& no_data) {
    std::size_t n = 0;
    for (std::size_t c = 0; c < state.size(); ++c)
        if (!no_data[c] && state.tcp[c] == 0) ++n;
    return n;
}

} // namespace

SteadyStateResult relax(const Dynamics& dynamics, OpinionState state, int max_sweeps, rng::Engine& rng,
                        std::vector<std::size_t>* currency0_counts) {
    if (max_sweeps < 1) throw Error("max_sweeps must be at least 1");
    const auto& no_data = dynamics.context().isolated_mask();
    if (currency0_counts) currency0_counts->assign(1, count_currency0(state, no_data));

    constexpr std::size_t history = 8;
    std::vector<std::uint64_t> recent;
    auto order = dynamics.free_countries(state);
    for (int k = 1; k <= max_sweeps; ++k) {
        rng::shuffle(order, rng);
        const bool changed = dynamics.sweep_in_order(state, order);
        if (currency0_counts) currency0_counts->push_back(count_currency0(state, no_data));
        if (!changed) return SteadyStateResult{std::move(state), k, true, {}};
        recent.push_back(fingerprint(state));
        if (recent.size() > history) recent.erase(recent.begin());
    }
    return SteadyStateResult{std::move(state), max_sweeps, false, std::move(recent)};
}

SteadyStateResult run_to_steady_state(const Dynamics& dynamics, OpinionState initial, int max_sweeps,
                                      rng::Engine& rng) {
    SteadyStateResult result = relax(dynamics, std::move(initial), max_sweeps, rng);
    if (!result.converged) {
        std::string what = "no steady state after " + std::to_string(max_sweeps) + " sweeps; recent states:";
        for (std::uint64_t f : result.recent_fingerprints) {
            char buf[20];
            std::snprintf(buf, sizeof buf, " %016llx", static_cast<unsigned long long>(f));
            what += buf;
        }
        throw SteadyStateError(what, result.recent_fingerprints);
    }
    return result;
}

namespace {

struct RunOutcome {
    std::vector<CurrencyId> final_tcp;
    std::vector<std::size_t> trajectory;
    int sweeps = 0;
    bool converged = false;
};

OpinionState initial_state(const OpinionState& base, std::size_t currency_count, double initial_fraction,
                           rng::Engine& rng) {
    OpinionState state = base;
    for (std::size_t c = 0; c < state.size(); ++c) {
        if (state.frozen[c]) continue;
        if (currency_count == 2) {
            state.tcp[c] = rng::uniform01(rng) < initial_fraction ? CurrencyId{0} : CurrencyId{1};
        } else {
            state.tcp[c] = static_cast<CurrencyId>(rng::uniform_below(rng, currency_count));
        }
    }
    return state;
}

} // namespace

EnsembleSummary run_ensemble(const CoreGroupSpec& core, const ScoringContext& ctx, const EnsembleOptions& options) {
    const std::size_t n = ctx.size();
    const std::size_t k = core.currency_count();
    if (!(options.initial_fraction >= 0.0 && options.initial_fraction <= 1.0))
        throw Error("initial fraction must lie in [0, 1]");
    if (options.runs < 1) throw Error("ensemble needs at least one run");

    const OpinionState base = make_state(core, n);
    const Dynamics dynamics(ctx, k);

    std::vector<RunOutcome> outcomes(options.runs);
    auto run_one = [&](std::size_t r) {
        rng::Engine engine = rng::make_engine(options.seed, r);
        OpinionState start = initial_state(base, k, options.initial_fraction, engine);
        RunOutcome& out = outcomes[r];
        SteadyStateResult result = relax(dynamics, std::move(start), options.max_sweeps, engine, &out.trajectory);
        out.final_tcp = std::move(result.state.tcp);
        out.sweeps = result.sweeps;
        out.converged = result.converged;
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(options.runs)));
    if (jobs == 1) {
        for (std::size_t r = 0; r < options.runs; ++r) run_one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        for (unsigned j = 0; j < jobs; ++j) {
            workers.emplace_back([&] {
                try {
                    for (std::size_t r = next++; r < options.runs && !failed; r = next++) run_one(r);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            });
        }
        workers.clear();
        if (failure) std::rethrow_exception(failure);
    }

    EnsembleSummary s;
    s.currencies = core.currencies;
    s.frozen_currency.assign(n, -1);
    for (std::size_t c = 0; c < n; ++c)
        if (base.frozen[c]) s.frozen_currency[c] = base.tcp[c];
    s.no_data = ctx.isolated_mask();
    s.initial_fraction = options.initial_fraction;
    s.runs = options.runs;
    s.counted_countries = static_cast<std::size_t>(std::count(s.no_data.begin(), s.no_data.end(), false));

    std::map<std::vector<std::size_t>, std::size_t> attractor_runs;
    std::vector<std::vector<std::size_t>> pref_counts(n, std::vector<std::size_t>(k, 0));
    std::size_t sweep_total = 0;
    std::size_t longest = 0;
    for (const RunOutcome& out : outcomes) {
        if (!out.converged) {
            ++s.non_converged_runs;
            continue;
        }
        ++s.converged_runs;
        sweep_total += static_cast<std::size_t>(out.sweeps);
        longest = std::max(longest, out.trajectory.size());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t c = 0; c < n; ++c) {
            ++pref_counts[c][out.final_tcp[c]];
            if (!s.no_data[c]) ++counts[out.final_tcp[c]];
        }
        ++attractor_runs[counts];
    }

    const double converged = static_cast<double>(s.converged_runs);
    const double counted = static_cast<double>(s.counted_countries);
    if (s.converged_runs > 0) {
        for (const auto& [counts, runs] : attractor_runs) {
            Attractor a;
            a.counts = counts;
            for (std::size_t c : counts) a.fractions.push_back(counted > 0 ? static_cast<double>(c) / counted : 0.0);
            a.runs = runs;
            a.probability = static_cast<double>(runs) / converged;
            s.mean_final_fraction += a.probability * a.fractions[0];
            s.attractors.push_back(std::move(a));
        }
        s.mean_sweeps = static_cast<double>(sweep_total) / converged;

        s.mean_fraction_by_sweep.assign(longest, 0.0);
        std::vector<std::size_t> sums(longest, 0);
        for (const RunOutcome& out : outcomes) {
            if (!out.converged) continue;
            for (std::size_t t = 0; t < longest; ++t)
                sums[t] += out.trajectory[std::min(t, out.trajectory.size() - 1)];
        }
        for (std::size_t t = 0; t < longest; ++t)
            s.mean_fraction_by_sweep[t] = counted > 0 ? static_cast<double>(sums[t]) / converged / counted : 0.0;
    }

    s.pref_prob.assign(n, std::vector<double>(k, 0.0));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t j = 0; j < k; ++j)
            s.pref_prob[c][j] = s.converged_runs ? static_cast<double>(pref_counts[c][j]) / converged : 0.0;
    if (options.keep_final_states) {
        s.final_states.reserve(outcomes.size());
        for (RunOutcome& out : outcomes) {
            s.final_states.push_back(std::move(out.final_tcp));
            s.final_converged.push_back(out.converged);
        }
    }
    return s;
}

std::string group_name(const GroupLabel& label, std::span<const std::string> currencies) {
    switch (label.kind) {
    case GroupLabel::Kind::fixed: return currencies[label.currency];
    case GroupLabel::Kind::swing: return "swing";
    case GroupLabel::Kind::no_data: return "no_data";
    }
    return "unknown";
}

std::vector<GroupLabel> classify_groups(std::span<const EnsembleSummary> summaries) {
    if (summaries.empty()) throw Error("classification needs at least one ensemble summary");
    const EnsembleSummary& first = summaries.front();
    for (const EnsembleSummary& s : summaries) {
        if (s.currencies != first.currencies || s.frozen_currency != first.frozen_currency ||
            s.no_data != first.no_data)
            throw Error("ensemble summaries come from different scenarios");
    }

    const std::size_t n = first.frozen_currency.size();
    const std::size_t k = first.currencies.size();
    std::vector<GroupLabel> labels(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (first.no_data[c]) {
            labels[c] = GroupLabel{GroupLabel::Kind::no_data, 0};
            continue;
        }
        if (first.frozen_currency[c] >= 0) {
            labels[c] = GroupLabel{GroupLabel::Kind::fixed, static_cast<CurrencyId>(first.frozen_currency[c])};
            continue;
        }
        labels[c] = GroupLabel{GroupLabel::Kind::swing, 0};
        for (std::size_t j = 0; j < k; ++j) {
            const bool always = std::all_of(summaries.begin(), summaries.end(), [&](const EnsembleSummary& s) {
                return s.converged_runs > 0 && s.pref_prob[c][j] == 1.0;
            });
            if (always) {
                labels[c] = GroupLabel{GroupLabel::Kind::fixed, static_cast<CurrencyId>(j)};
                break;
            }
        }
    }
    return labels;
}

} // namespace wtn
