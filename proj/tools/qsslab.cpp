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

// qsslab command-line tool. Every subcommand prints one JSON report.
//
// Exit status: 0 on success, 2 on invalid input, 1 on internal failure.

#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qsslab/entanglement.hpp"
#include "qsslab/io.hpp"
#include "qsslab/protocol.hpp"
#include "qsslab/qss.hpp"
#include "qsslab/search.hpp"

using namespace qsslab;

namespace {

struct Common {
    std::string out;
    std::string seed_text = "0";
    std::size_t workers = 0;
};

std::uint64_t resolve_seed(const std::string &text) {
    if (text == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    try {
        std::size_t used = 0;
        const std::uint64_t s = std::stoull(text, &used);
        if (used == text.size()) return s;
    } catch (const std::exception &) {
    }
    throw error(errc::bad_parameters, "--seed must be a non-negative integer or 'random'");
}

std::size_t resolve_workers(std::size_t flag) {
    if (flag > 0) return flag;
    if (const char *env = std::getenv("QSSLAB_WORKERS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<std::size_t>(n);
        } catch (const std::exception &) {
        }
        throw error(errc::bad_parameters, "QSSLAB_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// State files may also be reports produced by `random-state`.
QuantumState load_density(const std::string &path) {
    const json j = read_json_file(path);
    try {
        if (j.is_object() && j.contains("command") && j.contains("results") && j["results"].contains("state"))
            return state_from_json(j["results"]["state"]);
        return density(state_file_from_json(j));
    } catch (const json::exception &ex) {
        throw error(errc::parse_error, path + ": " + ex.what());
    }
}

QuantumState with_labels(const QuantumState &rho, const char *a, const char *b) {
    const auto [da, db] = rho.bipartite_dims();
    return {QuantumState::trusted, rho.matrix(), bipartite(da, db, a, b)};
}

json outcomes_json(const std::vector<RoundOutcome> &outs) {
    json a = json::array();
    double total = 0;
    for (const auto &o : outs) {
        a.push_back(to_json(o));
        total += o.probability;
    }
    json j;
    j["outcomes"] = std::move(a);
    j["total_probability"] = total;
    return j;
}

SearchOptions search_options(std::size_t restarts, std::size_t iters, std::uint64_t seed, std::size_t workers) {
    SearchOptions o;
    o.restarts = restarts;
    o.iterations = iters;
    o.seed = seed;
    o.workers = workers;
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quasi-separable states and entanglement purification rounds"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App *sub, bool randomized) {
        sub->add_option("--out", common.out, "Write the report here instead of stdout");
        if (randomized) {
            sub->add_option("--seed", common.seed_text, "Integer seed, or 'random'")->capture_default_str();
            sub->add_option("--workers", common.workers, "Worker threads (default: QSSLAB_WORKERS or all cores)");
        }
    };

    std::string state_path, source_path, ancilla_path, round_path, named, filter_path;
    std::vector<std::string> seed_rounds;
    std::size_t budget = 10000, restarts = 64, iters = 500, rank = 0;
    double p1 = 0.5, lambda2 = 0.5;
    std::vector<std::size_t> dims{2, 2};

    auto *qss = app.add_subcommand("qss", "Classify a state as QSS / NOT_QSS_CANDIDATE / UNKNOWN");
    qss->add_option("--state", state_path)->required();
    qss->add_option("--budget", budget, "Heuristic search evaluations")->capture_default_str();
    add_common(qss, true);

    auto *conc = app.add_subcommand("concurrence", "Two-qubit concurrence and λ' spectrum");
    conc->add_option("--state", state_path)->required();
    add_common(conc, false);

    auto *magic = app.add_subcommand("magic", "Magic decomposition of a two-qubit state");
    magic->add_option("--state", state_path)->required();
    add_common(magic, false);

    auto *ppt = app.add_subcommand("ppt", "Partial-transpose test");
    ppt->add_option("--state", state_path)->required();
    add_common(ppt, false);

    auto *sim = app.add_subcommand("simulate", "Run one protocol round");
    sim->add_option("--source", source_path)->required();
    sim->add_option("--ancilla", ancilla_path)->required();
    auto *round_opt = sim->add_option("--round", round_path, "Round file {u_alice, u_bob}");
    sim->add_option("--named", named, "identity | swap | bilateral-cnot")->excludes(round_opt);
    add_common(sim, false);

    auto *filt = app.add_subcommand("filter", "Apply a local {a, b} or global {c} filter");
    filt->add_option("--state", state_path)->required();
    filt->add_option("--filter", filter_path, "Filter file")->required();
    add_common(filt, false);

    auto *cnot = app.add_subcommand("reproduce-cnot", "Bilateral-CNOT example on the rank-two source and ancilla");
    cnot->add_option("--p1", p1)->capture_default_str();
    cnot->add_option("--lambda2", lambda2)->capture_default_str();
    add_common(cnot, false);

    auto *search = app.add_subcommand("search", "Pattern search over protocol rounds");
    auto *probe = app.add_subcommand("probe", "Classify both inputs and search for a purifying round");
    for (auto *sub : {search, probe}) {
        sub->add_option("--source", source_path)->required();
        sub->add_option("--ancilla", ancilla_path)->required();
        sub->add_option("--restarts", restarts)->capture_default_str();
        sub->add_option("--iters", iters)->capture_default_str();
        add_common(sub, true);
    }
    search->add_option("--seed-round", seed_rounds, "Extra starting round files");
    probe->add_option("--budget", budget, "QSS heuristic search evaluations")->capture_default_str();

    auto *rnd = app.add_subcommand("random-state", "Sample a random state of given dims and rank");
    rnd->add_option("--dims", dims, "Subsystem dims")->delimiter(',')->capture_default_str();
    rnd->add_option("--rank", rank, "Rank (default: full)");
    add_common(rnd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ReportDocument doc;
        const std::uint64_t seed = resolve_seed(common.seed_text);
        doc.seed = seed;

        if (*qss) {
            const QuantumState rho = load_density(state_path);
            doc.command = "qss";
            doc.inputs = {{"state", state_path}, {"budget", budget}};
            doc.results = to_json(classify(rho, budget, seed));
        } else if (*conc) {
            const QuantumState rho = load_density(state_path);
            detail::require_two_qubits(rho);
            const auto lp = lambda_prime_spectrum(rho.matrix());
            doc.command = "concurrence";
            doc.inputs = {{"state", state_path}};
            doc.results = {{"concurrence", concurrence_from_spectrum(lp)}, {"lambda_primes", to_json(lp)}};
        } else if (*magic) {
            const QuantumState rho = load_density(state_path);
            const MagicDecomposition md = magic_decomposition(rho);
            json zs = json::array(), ws = json::array();
            for (std::size_t i = 0; i < md.z_states.size(); ++i) {
                zs.push_back(to_json(md.z_states[i]));
                ws.push_back(md.weight(i));
            }
            doc.command = "magic";
            doc.inputs = {{"state", state_path}};
            doc.results = {{"lambda_primes", to_json(md.lambda_primes)},
                           {"weights", std::move(ws)},
                           {"z_states", std::move(zs)},
                           {"transform", to_json(md.transform)}};
        } else if (*ppt) {
            const QuantumState rho = load_density(state_path);
            const double m = min_pt_eigenvalue(rho);
            doc.command = "ppt";
            doc.inputs = {{"state", state_path}};
            doc.results = {{"min_pt_eigenvalue", m}, {"ppt", m >= -ppt_tolerance}, {"exact", ppt_is_exact(rho)}};
        } else if (*sim) {
            const QuantumState src = with_labels(load_density(source_path), "SS_A", "SS_B");
            const QuantumState anc = with_labels(load_density(ancilla_path), "AS_A", "AS_B");
            ProtocolRound round;
            if (!round_path.empty()) {
                round = load_round(round_path);
            } else {
                const auto [sa, sb] = src.bipartite_dims();
                const auto [aa, ab] = anc.bipartite_dims();
                round = named_round(named.empty() ? "identity" : named, sa, sb, aa, ab);
            }
            doc.command = "simulate";
            doc.inputs = {{"source", source_path},
                          {"ancilla", ancilla_path},
                          {"round", round_path.empty() ? json(named.empty() ? "identity" : named) : json(round_path)}};
            doc.results = outcomes_json(run_round(src, anc, round));
        } else if (*filt) {
            const QuantumState rho = load_density(state_path);
            const json f = read_json_file(filter_path);
            FilterResult r;
            try {
                if (f.contains("c")) {
                    r = apply_global_filter(rho, matrix_from_json(f["c"]));
                } else {
                    r = apply_local_filter(rho, matrix_from_json(detail::field(f, "a")), matrix_from_json(detail::field(f, "b")));
                }
            } catch (const json::exception &ex) {
                throw error(errc::parse_error, filter_path + ": " + ex.what());
            }
            doc.command = "filter";
            doc.inputs = {{"state", state_path}, {"filter", filter_path}};
            doc.results = {{"probability", r.probability}, {"state", to_json(r.state)}};
        } else if (*cnot) {
            doc.command = "reproduce-cnot";
            doc.inputs = {{"p1", p1}, {"lambda2", lambda2}};
            doc.results = outcomes_json(cnot_example(p1, lambda2));
        } else if (*search || *probe) {
            const QuantumState src = with_labels(load_density(source_path), "SS_A", "SS_B");
            const QuantumState anc = with_labels(load_density(ancilla_path), "AS_A", "AS_B");
            const std::size_t workers = resolve_workers(common.workers);
            const SearchOptions o = search_options(restarts, iters, seed, workers);
            doc.inputs = {{"source", source_path}, {"ancilla", ancilla_path}, {"restarts", restarts}, {"iters", iters}};
            if (*search) {
                std::vector<ProtocolRound> extra;
                for (const auto &p : seed_rounds) extra.push_back(load_round(p));
                doc.command = "search";
                doc.inputs["seed_rounds"] = seed_rounds;
                doc.results = to_json(optimize_protocol(src, anc, o, extra));
            } else {
                doc.command = "probe";
                doc.inputs["budget"] = budget;
                doc.results = to_json(impossibility_probe(src, anc, o, budget));
            }
        } else if (*rnd) {
            Layout layout;
            for (std::size_t i = 0; i < dims.size(); ++i)
                layout.push_back({dims.size() == 2 ? (i == 0 ? "A" : "B") : "S" + std::to_string(i), dims[i]});
            const std::size_t d = layout_size(layout);
            if (d == 0 || dims.empty()) throw error(errc::bad_parameters, "--dims must be positive");
            const std::size_t r = rank == 0 ? d : rank;
            if (r > d) throw error(errc::bad_parameters, "--rank exceeds the dimension");
            doc.command = "random-state";
            doc.inputs = {{"dims", dims}, {"rank", r}};
            doc.results = {{"state", to_json(random_state(layout, r, seed))}};
        }
        try {
            write_report(doc, common.out);
        } catch (const error &e) {
            std::cerr << "qsslab: " << e.what() << "\n";
            return e.code() == errc::io_error ? 1 : 2;
        }
        return 0;
    } catch (const error &e) {
        std::cerr << "qsslab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "qsslab: internal error: " << e.what() << "\n";
        return 1;
    }
}
