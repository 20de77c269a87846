// Copyright 2026 The qsslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Derivative-free search over single protocol rounds for a pure entangled output.

#ifndef QSSLAB_SEARCH_HPP
#define QSSLAB_SEARCH_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qsslab/linalg.hpp"
#include "qsslab/protocol.hpp"
#include "qsslab/qss.hpp"
#include "qsslab/states.hpp"

namespace qsslab {

struct SearchOptions {
    std::size_t restarts = 64;
    std::size_t iterations = 500;  // coordinate polls per restart, each at most two evaluations
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double initial_step = 0.3;
    double shrink = 0.5;
    double min_step = 1e-4;
    SuccessThresholds thresholds;
};

struct RestartResult {
    std::string origin;  // named round, "seed:<i>" or "haar"
    double best_score = 0;
    std::size_t evaluations = 0;
    std::vector<double> improvements;  // accepted scores, non-decreasing
    ProtocolRound round;
};

struct SearchReport {
    double best_score = 0;
    ProtocolRound best_round;
    RoundOutcome best_outcome;
    std::size_t best_restart = 0;
    std::string best_origin;
    std::size_t restarts_used = 0;
    std::size_t evaluations = 0;
    bool success = false;
    std::vector<double> trace;  // best score of each restart, in restart order
};

namespace detail {

struct ScoredOutcome {
    double score = 0;
    std::size_t index = 0;
};

/// Best outcome of a round by score, then by probability. The entanglement
/// witness is skipped when the other two ramps already rule an outcome out.
inline ScoredOutcome best_outcome(const RoundSimulator &sim, const ProtocolRound &round, const SuccessThresholds &t) {
    const auto branches = sim.branches(round);
    const auto [da, db] = sim.source_layout().size() == 2
                              ? std::pair{sim.source_layout()[0].dim, sim.source_layout()[1].dim}
                              : std::pair<std::size_t, std::size_t>{0, 0};
    const std::size_t ds = da * db;
    ScoredOutcome best{-1, 0};
    double best_probability = -1;
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const auto &br = branches[k];
        double score = 0;
        if (br.probability > probability_floor) {
            double purity = 0;
            for (const auto &x : br.block.entries()) purity += std::norm(x);
            purity /= br.probability * br.probability;
            const OutcomeMetrics partial{br.probability, purity, t.entanglement};
            const double bound = outcome_score(partial, ds, t);
            if (bound > 0 && bound >= best.score) score = outcome_score(outcome_metrics(br.probability, br.block, da, db), ds, t);
        }
        if (score > best.score || (score == best.score && br.probability > best_probability)) {
            best = {score, k};
            best_probability = br.probability;
        }
    }
    return best;
}

inline ProtocolRound round_from(std::span<const double> p, const ProtocolRound &start) {
    const std::size_t na = start.u_alice.rows(), nb = start.u_bob.rows();
    return {parameterized_unitary(p.subspan(0, na * na), na) * start.u_alice,
            parameterized_unitary(p.subspan(na * na, nb * nb), nb) * start.u_bob};
}

/// Coordinate pattern search around `start`: u = U(θ)·u_start with θ = 0 initially.
inline RestartResult pattern_search(const RoundSimulator &sim, const ProtocolRound &start, const SearchOptions &o) {
    const std::size_t na = start.u_alice.rows(), nb = start.u_bob.rows();
    std::vector<double> p(na * na + nb * nb, 0.0);
    RestartResult r;
    auto evaluate = [&](std::span<const double> q) {
        ++r.evaluations;
        return best_outcome(sim, round_from(q, start), o.thresholds).score;
    };
    double value = evaluate(p);
    r.improvements.push_back(value);
    std::size_t polls = 0, since_improvement = 0, coord = 0;
    double step = o.initial_step;
    while (polls < o.iterations && step >= o.min_step && value < 1.0) {
        ++polls;
        bool improved = false;
        for (double dir : {1.0, -1.0}) {
            p[coord] += dir * step;
            const double trial = evaluate(p);
            if (trial > value) {
                value = trial;
                improved = true;
                r.improvements.push_back(value);
                break;
            }
            p[coord] -= dir * step;
        }
        since_improvement = improved ? 0 : since_improvement + 1;
        if (since_improvement == p.size()) {
            step *= o.shrink;
            since_improvement = 0;
        }
        coord = (coord + 1) % p.size();
    }
    r.best_score = value;
    r.round = round_from(p, start);
    return r;
}

}  // namespace detail

/// Highest outcome score of one round. Equals 1 exactly when some outcome meets all thresholds.
inline double score_round(const QuantumState &source, const QuantumState &ancilla, const ProtocolRound &round,
                          const SuccessThresholds &t = {}) {
    const RoundSimulator sim(source, ancilla);
    sim.check(round);
    return std::max(0.0, detail::best_outcome(sim, round, t).score);
}

/// Starting rounds in restart order: named rounds valid for these dimensions, then `seeds_in`.
inline std::vector<std::pair<std::string, ProtocolRound>> search_seeds(const QuantumState &source,
                                                                        const QuantumState &ancilla,
                                                                        std::span<const ProtocolRound> seeds_in = {}) {
    const auto [ss_a, ss_b] = source.bipartite_dims();
    const auto [as_a, as_b] = ancilla.bipartite_dims();
    std::vector<std::pair<std::string, ProtocolRound>> out;
    for (const auto &name : named_rounds()) {
        try {
            out.emplace_back(name, named_round(name, ss_a, ss_b, as_a, as_b));
        } catch (const error &) {
        }
    }
    for (std::size_t i = 0; i < seeds_in.size(); ++i) out.emplace_back("seed:" + std::to_string(i), seeds_in[i]);
    return out;
}

/// Restarted pattern search over single rounds.
///
/// Restarts begin with the seed rounds and continue from Haar-random unitaries
/// drawn from derive_seed(seed, restart). At least `restarts` are run, and every
/// seed is run even when there are more seeds than that. Restarts are spread over
/// `workers` threads; the best score wins and ties go to the lowest restart index,
/// so the report does not depend on scheduling.
inline SearchReport optimize_protocol(const QuantumState &source, const QuantumState &ancilla, const SearchOptions &o,
                                      std::span<const ProtocolRound> seeds_in = {}) {
    if (o.restarts == 0) throw error(errc::bad_parameters, "restarts must be at least 1");
    const RoundSimulator sim(source, ancilla);
    const auto seeds = search_seeds(source, ancilla, seeds_in);
    for (const auto &s : seeds) sim.check(s.second);
    const std::size_t total = std::max(o.restarts, seeds.size());

    std::vector<RestartResult> results(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                if (i < seeds.size()) {
                    results[i] = detail::pattern_search(sim, seeds[i].second, o);
                    results[i].origin = seeds[i].first;
                } else {
                    Rng rng(derive_seed(o.seed, i));
                    const ProtocolRound start{haar_unitary(sim.alice_dim(), rng), haar_unitary(sim.bob_dim(), rng)};
                    results[i] = detail::pattern_search(sim, start, o);
                    results[i].origin = "haar";
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(o.workers, 1, total);
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    SearchReport rep;
    rep.restarts_used = total;
    for (std::size_t i = 0; i < total; ++i) {
        rep.trace.push_back(results[i].best_score);
        rep.evaluations += results[i].evaluations;
        if (i == 0 || results[i].best_score > results[rep.best_restart].best_score) rep.best_restart = i;
    }
    const RestartResult &best = results[rep.best_restart];
    rep.best_score = best.best_score;
    rep.best_round = best.round;
    rep.best_origin = best.origin;
    const auto outcomes = sim.run(best.round);
    rep.best_outcome = outcomes[detail::best_outcome(sim, best.round, o.thresholds).index];
    rep.success = meets_success(outcome_metrics(rep.best_outcome), o.thresholds);
    return rep;
}

struct ProbeReport {
    QssVerdict source_verdict;
    QssVerdict ancilla_verdict;
    SearchReport search;
    bool violation = false;  // both inputs certified QSS and the search succeeded
};

/// Classifies both inputs, then searches for a round with a pure entangled outcome.
inline ProbeReport impossibility_probe(const QuantumState &source, const QuantumState &ancilla, const SearchOptions &o,
                                       std::size_t qss_budget = 10000) {
    ProbeReport r;
    r.source_verdict = classify(source, qss_budget, derive_seed(o.seed, 0x5353));
    r.ancilla_verdict = classify(ancilla, qss_budget, derive_seed(o.seed, 0x4153));
    r.search = optimize_protocol(source, ancilla, o);
    r.violation = r.source_verdict.status == QssStatus::qss && r.ancilla_verdict.status == QssStatus::qss &&
                  r.search.success;
    return r;
}

}  // namespace qsslab

#endif  // QSSLAB_SEARCH_HPP
