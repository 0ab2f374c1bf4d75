#include "stochmatch/probing.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "stochmatch/errors.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/rng.hpp"

namespace stochmatch {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile
constexpr std::uint64_t kChunk = 8192;       // replications per deterministic chunk
constexpr int kMaxExactEdges = 8;

double binomial_ci(double rate, std::uint64_t reps) {
    if (reps == 0) return 0.0;
    return kZ99 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

// Immutable per-run tables shared by all replications.
struct ProbeContext {
    const StochasticGraph& g;
    std::vector<double> y;
    std::vector<double> attenuation;  // a~(z_e)
    std::vector<int> order_buf;       // scratch, one per worker in parallel paths

    ProbeContext(const StochasticGraph& graph, std::span<const double> y_in,
                 const AttenuationSpec& spec)
        : g(graph), y(y_in.begin(), y_in.end()) {
        if (static_cast<int>(y.size()) != g.num_edges()) {
            throw ValidationError("attenuate_match: y has wrong dimension");
        }
        const FeasibilityReport feas = check_feasibility(g, y, 1e-7);
        if (!feas.feasible()) {
            throw ValidationError("attenuate_match: infeasible y (" +
                                  feas.violations.front().describe(g) + ")");
        }
        attenuation.resize(y.size());
        for (int e = 0; e < g.num_edges(); ++e) {
            attenuation[e] = evaluate(spec, y[e] * g.edge(e).prob);
        }
    }
};

struct TraceAccumulator {
    std::vector<std::uint64_t> probe_count;
    std::vector<std::uint64_t> match_count;
    double weight_sum = 0.0;
    double weight_sq_sum = 0.0;

    explicit TraceAccumulator(int edges) : probe_count(edges, 0), match_count(edges, 0) {}

    void fold(const TraceAccumulator& other) {
        for (size_t e = 0; e < probe_count.size(); ++e) {
            probe_count[e] += other.probe_count[e];
            match_count[e] += other.match_count[e];
        }
        weight_sum += other.weight_sum;
        weight_sq_sum += other.weight_sq_sum;
    }
};

// One probing pass; fills `trace` when non-null (single-trace API) and always
// updates the accumulator.
void run_trace(const ProbeContext& ctx, std::uint64_t seed, std::uint64_t rep,
               std::vector<int>& order, std::vector<double>& arrival,
               std::vector<int>& patience_left, std::vector<std::uint8_t>& matched,
               TraceAccumulator& acc, ProbeTrace* trace) {
    const StochasticGraph& g = ctx.g;
    const int m = g.num_edges();

    arrival.resize(m);
    order.resize(m);
    for (int e = 0; e < m; ++e) {
        arrival[e] = rng::uniform01(seed, rep, e, rng::Draw::arrival);
        order[e] = e;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return arrival[a] != arrival[b] ? arrival[a] < arrival[b] : a < b;
    });

    patience_left.assign(g.num_vertices(), 0);
    for (int v = 0; v < g.num_vertices(); ++v) {
        const Patience& t = g.vertex(v).patience;
        patience_left[v] = t.is_infinite() ? INT_MAX : t.value();
    }
    matched.assign(g.num_vertices(), 0);

    double weight = 0.0;
    for (int e : order) {
        const Edge& ed = g.edge(e);
        EdgeOutcome out;
        if (matched[ed.u] || matched[ed.v] || patience_left[ed.u] == 0 ||
            patience_left[ed.v] == 0) {
            out = EdgeOutcome::not_reached_safe;
        } else if (!rng::bernoulli(ctx.y[e], seed, rep, e, rng::Draw::include_y)) {
            out = EdgeOutcome::skipped_y;
            if (trace) trace->y_bit[e] = 0;
        } else if (!rng::bernoulli(ctx.attenuation[e], seed, rep, e, rng::Draw::attenuate)) {
            out = EdgeOutcome::skipped_a;
            if (trace) {
                trace->y_bit[e] = 1;
                trace->a_bit[e] = 0;
            }
        } else {
            // Probe: patience burns at both endpoints no matter the outcome.
            if (patience_left[ed.u] != INT_MAX) --patience_left[ed.u];
            if (patience_left[ed.v] != INT_MAX) --patience_left[ed.v];
            ++acc.probe_count[e];
            if (rng::bernoulli(ed.prob, seed, rep, e, rng::Draw::activate)) {
                out = EdgeOutcome::probed_active;
                matched[ed.u] = matched[ed.v] = 1;
                weight += ed.weight;
                ++acc.match_count[e];
                if (trace) trace->matching.push_back(e);
            } else {
                out = EdgeOutcome::probed_inactive;
            }
            if (trace) trace->y_bit[e] = trace->a_bit[e] = 1;
        }
        if (trace) trace->outcome[e] = out;
    }
    acc.weight_sum += weight;
    acc.weight_sq_sum += weight * weight;
    if (trace) {
        trace->arrival_order = order;
        trace->matched_weight = weight;
    }
}

}  // namespace

ProbeTrace attenuate_match(const StochasticGraph& g, std::span<const double> y,
                           const AttenuationSpec& spec, std::uint64_t seed) {
    ProbeContext ctx(g, y, spec);
    ProbeTrace trace;
    trace.y_bit.assign(g.num_edges(), 0);
    trace.a_bit.assign(g.num_edges(), 0);
    trace.outcome.assign(g.num_edges(), EdgeOutcome::not_reached_safe);

    TraceAccumulator acc(g.num_edges());
    std::vector<int> order;
    std::vector<double> arrival;
    std::vector<int> patience_left;
    std::vector<std::uint8_t> matched;
    run_trace(ctx, seed, 0, order, arrival, patience_left, matched, acc, &trace);
    return trace;
}

SimResult monte_carlo(const StochasticGraph& g, std::span<const double> y,
                      const AttenuationSpec& spec, std::uint64_t reps, std::uint64_t seed,
                      int jobs) {
    if (reps == 0) throw ValidationError("monte_carlo: reps must be positive");
    if (jobs < 1) jobs = 1;
    ProbeContext ctx(g, y, spec);

    const std::uint64_t num_chunks = (reps + kChunk - 1) / kChunk;
    std::vector<TraceAccumulator> chunk_acc(num_chunks, TraceAccumulator(g.num_edges()));

    auto process_chunk = [&](std::uint64_t chunk, std::vector<int>& order,
                             std::vector<double>& arrival, std::vector<int>& patience_left,
                             std::vector<std::uint8_t>& matched) {
        const std::uint64_t lo = chunk * kChunk;
        const std::uint64_t hi = std::min(reps, lo + kChunk);
        for (std::uint64_t rep = lo; rep < hi; ++rep) {
            run_trace(ctx, seed, rep, order, arrival, patience_left, matched, chunk_acc[chunk],
                      nullptr);
        }
    };

    if (jobs == 1 || num_chunks == 1) {
        std::vector<int> order;
        std::vector<double> arrival;
        std::vector<int> patience_left;
        std::vector<std::uint8_t> matched;
        for (std::uint64_t c = 0; c < num_chunks; ++c) {
            process_chunk(c, order, arrival, patience_left, matched);
        }
    } else {
        std::atomic<std::uint64_t> next{0};
        auto worker = [&]() {
            std::vector<int> order;
            std::vector<double> arrival;
            std::vector<int> patience_left;
            std::vector<std::uint8_t> matched;
            while (true) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= num_chunks) break;
                process_chunk(c, order, arrival, patience_left, matched);
            }
        };
        std::vector<std::thread> pool;
        const int workers = static_cast<int>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), num_chunks));
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    // Chunk-ordered fold: byte-identical results for every worker count.
    TraceAccumulator total(g.num_edges());
    for (const TraceAccumulator& acc : chunk_acc) total.fold(acc);

    SimResult r;
    r.reps = reps;
    r.probe_count = std::move(total.probe_count);
    r.match_count = std::move(total.match_count);
    r.probe_rate.resize(g.num_edges());
    r.probe_ci.resize(g.num_edges());
    r.match_rate.resize(g.num_edges());
    const double n = static_cast<double>(reps);
    for (int e = 0; e < g.num_edges(); ++e) {
        r.probe_rate[e] = static_cast<double>(r.probe_count[e]) / n;
        r.probe_ci[e] = binomial_ci(r.probe_rate[e], reps);
        r.match_rate[e] = static_cast<double>(r.match_count[e]) / n;
    }
    r.mean_weight = total.weight_sum / n;
    if (reps > 1) {
        const double var =
            std::max(0.0, (total.weight_sq_sum - total.weight_sum * total.weight_sum / n) /
                              (n - 1.0));
        r.weight_ci = kZ99 * std::sqrt(var / n);
    }
    return r;
}

namespace {

// DP state for the exact permutation expectation.  With <= 8 edges at most 16
// vertices touch an edge; residual patience packs into 4-bit nibbles (0..8,
// or 0xf = infinite).
struct ExactKey {
    std::uint16_t remaining = 0;
    std::uint16_t matched = 0;
    std::uint64_t patience = 0;

    bool operator==(const ExactKey&) const = default;
};

struct ExactKeyHash {
    size_t operator()(const ExactKey& k) const {
        std::uint64_t h = k.patience ^ (static_cast<std::uint64_t>(k.matched) << 16) ^ k.remaining;
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
        return static_cast<size_t>(h);
    }
};

constexpr std::uint64_t kNibbleInf = 0xf;

std::uint64_t nibble_get(std::uint64_t pack, int i) { return (pack >> (4 * i)) & 0xf; }

std::uint64_t nibble_set(std::uint64_t pack, int i, std::uint64_t v) {
    const int shift = 4 * i;
    return (pack & ~(0xfULL << shift)) | (v << shift);
}

}  // namespace

std::vector<double> exact_probe_probabilities(const StochasticGraph& g, std::span<const double> y,
                                              const AttenuationSpec& spec) {
    const int m = g.num_edges();
    if (m > kMaxExactEdges) {
        throw ValidationError("exact_probe_probabilities: instance too large (" +
                              std::to_string(m) + " edges, cap is " +
                              std::to_string(kMaxExactEdges) + ")");
    }
    ProbeContext ctx(g, y, spec);
    if (m == 0) return {};

    // Compact ids for touched vertices.
    std::vector<int> compact(g.num_vertices(), -1);
    int num_compact = 0;
    for (const Edge& e : g.edges()) {
        for (int v : {e.u, e.v}) {
            if (compact[v] < 0) compact[v] = num_compact++;
        }
    }

    ExactKey init;
    init.remaining = static_cast<std::uint16_t>((1u << m) - 1u);
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (compact[v] < 0) continue;
        const Patience& t = g.vertex(v).patience;
        const std::uint64_t nib =
            t.is_infinite() ? kNibbleInf
                            : static_cast<std::uint64_t>(std::min(t.value(), g.degree(v)));
        init.patience = nibble_set(init.patience, compact[v], nib);
    }

    // Visiting a uniformly random permutation is the same process as taking a
    // uniformly random next edge among the remaining ones, so states bucketed
    // by |remaining| aggregate all |E|! orders exactly.
    std::vector<std::unordered_map<ExactKey, double, ExactKeyHash>> layers(m + 1);
    layers[m].emplace(init, 1.0);
    std::vector<double> probe_prob(m, 0.0);

    for (int count = m; count >= 1; --count) {
        for (const auto& [state, prob] : layers[count]) {
            const double share = prob / count;
            for (int e = 0; e < m; ++e) {
                if (!(state.remaining >> e & 1u)) continue;
                const Edge& ed = g.edge(e);
                const int cu = compact[ed.u], cv = compact[ed.v];
                const std::uint16_t rest =
                    state.remaining & static_cast<std::uint16_t>(~(1u << e));

                const bool safe = !(state.matched >> cu & 1u) && !(state.matched >> cv & 1u) &&
                                  nibble_get(state.patience, cu) != 0 &&
                                  nibble_get(state.patience, cv) != 0;
                if (!safe) {
                    ExactKey next = state;
                    next.remaining = rest;
                    layers[count - 1][next] += share;
                    continue;
                }

                const double q = ctx.y[e] * ctx.attenuation[e];
                probe_prob[e] += share * q;

                if (q < 1.0) {  // skipped (Y or A fails)
                    ExactKey next = state;
                    next.remaining = rest;
                    layers[count - 1][next] += share * (1.0 - q);
                }
                if (q > 0.0 && ed.prob > 0.0) {  // probed, active
                    ExactKey next = state;
                    next.remaining = rest;
                    next.matched |= static_cast<std::uint16_t>((1u << cu) | (1u << cv));
                    // Matched endpoints' residual patience is irrelevant;
                    // zero it so equivalent states merge.
                    next.patience = nibble_set(next.patience, cu, 0);
                    next.patience = nibble_set(next.patience, cv, 0);
                    layers[count - 1][next] += share * q * ed.prob;
                }
                if (q > 0.0 && ed.prob < 1.0) {  // probed, inactive
                    ExactKey next = state;
                    next.remaining = rest;
                    for (int c : {cu, cv}) {
                        const std::uint64_t nib = nibble_get(next.patience, c);
                        if (nib != kNibbleInf) next.patience = nibble_set(next.patience, c, nib - 1);
                    }
                    layers[count - 1][next] += share * q * (1.0 - ed.prob);
                }
            }
        }
        layers[count].clear();
    }
    return probe_prob;
}

BaselineResult star_counterexample_baseline(int T, std::uint64_t reps, std::uint64_t seed) {
    if (T < 1) throw ValidationError("star_counterexample_baseline: T must be >= 1");
    if (reps == 0) throw ValidationError("star_counterexample_baseline: reps must be positive");

    const double p0 = 1.0 / (T + 1);
    const double pi = static_cast<double>(T) / (T + 1);

    // Only edge 0 and the rounded leaf edge i carry Y = 1, and the center has
    // patience 2, so a trace reduces to the relative order of those two edges
    // plus their activations.  Edge 0 is probed unless i arrives first and
    // activates; its own activation is independent of that event, so
    // Pr[matched] = Pr[probed] * p0 exactly, and the probed indicator is the
    // low-variance estimator for the selectability ratio.
    std::uint64_t probed0 = 0;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        const std::uint64_t i =
            1 + rng::uniform_index(static_cast<std::uint64_t>(T), seed, rep, 0, rng::Draw::pick);
        const double x0 = rng::uniform01(seed, rep, 0, rng::Draw::arrival);
        const double xi = rng::uniform01(seed, rep, i, rng::Draw::arrival);
        const bool zero_first = x0 < xi || (x0 == xi);  // tie: lower id first
        if (zero_first) {
            ++probed0;
        } else if (!rng::bernoulli(pi, seed, rep, i, rng::Draw::activate)) {
            ++probed0;
        }
    }

    BaselineResult r;
    r.reps = reps;
    r.z0 = p0;  // y_0 = 1, so z_0 = p_0
    const double probe_rate = static_cast<double>(probed0) / static_cast<double>(reps);
    r.match_prob = probe_rate * p0;
    r.selectability = r.match_prob / r.z0;
    r.ci = binomial_ci(probe_rate, reps);
    return r;
}

}  // namespace stochmatch
