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

// JSON encoding of states, ensembles, rounds, verdicts and reports.
//
// Complex numbers are [re, im] pairs. Doubles are printed in shortest round-trip
// form, so decoding an encoded value gives back the same bits.

#ifndef QSSLAB_IO_HPP
#define QSSLAB_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qsslab/protocol.hpp"
#include "qsslab/qss.hpp"
#include "qsslab/search.hpp"
#include "qsslab/states.hpp"

#ifndef QSSLAB_VERSION
#define QSSLAB_VERSION "0.1.0"
#endif

namespace qsslab {

using json = nlohmann::ordered_json;

inline constexpr std::string_view version = QSSLAB_VERSION;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string &what) { throw error(errc::parse_error, what); }

inline const json &field(const json &j, const char *name) {
    if (!j.is_object() || !j.contains(name)) parse_fail(std::string("missing field '") + name + "'");
    return j.at(name);
}

inline double number(const json &j, const char *what) {
    if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
    return j.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Values

inline json to_json(complex z) { return json::array({z.real(), z.imag()}); }

inline complex complex_from_json(const json &j) {
    if (!j.is_array() || j.size() != 2) detail::parse_fail("complex numbers are [re, im] pairs");
    return {detail::number(j[0], "real part"), detail::number(j[1], "imaginary part")};
}

inline json to_json(const CVector &v) {
    json a = json::array();
    for (const auto &z : v.entries()) a.push_back(to_json(z));
    return a;
}

inline CVector vector_from_json(const json &j) {
    if (!j.is_array()) detail::parse_fail("vector must be an array");
    CVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i]);
    return v;
}

inline json to_json(const CMatrix &m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(to_json(m(i, k)));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline CMatrix matrix_from_json(const json &j) {
    if (!j.is_array() || j.empty()) detail::parse_fail("matrix must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    CMatrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) detail::parse_fail("matrix rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    return m;
}

inline json to_json(std::span<const double> xs) {
    json a = json::array();
    for (double x : xs) a.push_back(x);
    return a;
}

// ---------------------------------------------------------------------------
// States and ensembles

inline void layout_to_json(json &j, const Layout &layout) {
    json dims = json::array(), labels = json::array();
    for (const auto &s : layout) {
        dims.push_back(s.dim);
        labels.push_back(s.label);
    }
    j["dims"] = std::move(dims);
    j["labels"] = std::move(labels);
}

inline Layout layout_from_json(const json &j) {
    const json &dims = detail::field(j, "dims");
    if (!dims.is_array() || dims.empty()) detail::parse_fail("dims must be a non-empty array");
    const json *labels = j.contains("labels") ? &j.at("labels") : nullptr;
    if (labels && (!labels->is_array() || labels->size() != dims.size()))
        detail::parse_fail("labels must match dims in length");
    Layout layout;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (!dims[i].is_number_unsigned() || dims[i].get<std::size_t>() == 0)
            detail::parse_fail("dims must be positive integers");
        std::string label;
        if (labels) {
            if (!(*labels)[i].is_string()) detail::parse_fail("labels must be strings");
            label = (*labels)[i].get<std::string>();
        } else {
            label = dims.size() == 2 ? (i == 0 ? "A" : "B") : "S" + std::to_string(i);
        }
        layout.push_back({std::move(label), dims[i].get<std::size_t>()});
    }
    return layout;
}

inline json to_json(const QuantumState &rho) {
    json j;
    layout_to_json(j, rho.layout());
    j["matrix"] = to_json(rho.matrix());
    return j;
}

inline QuantumState state_from_json(const json &j) {
    Layout layout = layout_from_json(j);
    return {matrix_from_json(detail::field(j, "matrix")), std::move(layout)};
}

inline json to_json(const Ensemble &e) {
    json j;
    layout_to_json(j, e.layout());
    json members = json::array();
    for (const auto &m : e.members()) {
        json x;
        x["weight"] = m.weight;
        x["vector"] = to_json(m.state);
        members.push_back(std::move(x));
    }
    j["members"] = std::move(members);
    return j;
}

inline Ensemble ensemble_from_json(const json &j) {
    Layout layout = layout_from_json(j);
    const json &members = detail::field(j, "members");
    if (!members.is_array()) detail::parse_fail("members must be an array");
    std::vector<EnsembleMember> out;
    for (const auto &m : members)
        out.push_back({detail::number(detail::field(m, "weight"), "weight"), vector_from_json(detail::field(m, "vector"))});
    return {std::move(out), std::move(layout)};
}

/// Contents of a state file: a density matrix or an ensemble.
using StateFile = std::variant<QuantumState, Ensemble>;

inline StateFile state_file_from_json(const json &j) {
    if (j.is_object() && j.contains("members")) return ensemble_from_json(j);
    return state_from_json(j);
}

inline QuantumState density(const StateFile &f) {
    if (const auto *rho = std::get_if<QuantumState>(&f)) return *rho;
    return from_ensemble(std::get<Ensemble>(f));
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception &ex) {
        throw error(errc::parse_error, path + ": " + ex.what());
    }
}

/// Reads and validates a state or ensemble file.
inline StateFile load_state(const std::string &path) {
    const json j = read_json_file(path);
    try {
        return state_file_from_json(j);
    } catch (const json::exception &ex) {
        throw error(errc::parse_error, path + ": " + ex.what());
    }
}

// ---------------------------------------------------------------------------
// Rounds, outcomes, verdicts, reports

inline json to_json(const ProtocolRound &r) {
    json j;
    j["u_alice"] = to_json(r.u_alice);
    j["u_bob"] = to_json(r.u_bob);
    return j;
}

inline ProtocolRound round_from_json(const json &j) {
    ProtocolRound r{matrix_from_json(detail::field(j, "u_alice")), matrix_from_json(detail::field(j, "u_bob"))};
    if (!is_unitary(r.u_alice) || !is_unitary(r.u_bob)) throw error(errc::non_unitary, "round matrices must be unitary");
    return r;
}

inline ProtocolRound load_round(const std::string &path) {
    const json j = read_json_file(path);
    try {
        return round_from_json(j);
    } catch (const json::exception &ex) {
        throw error(errc::parse_error, path + ": " + ex.what());
    }
}

inline json to_json(const RoundOutcome &o) {
    json j;
    j["label"] = o.label;
    j["alice_index"] = o.alice_index;
    j["bob_index"] = o.bob_index;
    j["probability"] = o.probability;
    if (o.post_state) {
        const OutcomeMetrics m = outcome_metrics(o);
        j["purity"] = m.purity;
        j["entanglement"] = m.entanglement;
        j["post_state"] = to_json(*o.post_state);
    } else {
        j["purity"] = nullptr;
        j["entanglement"] = nullptr;
        j["post_state"] = nullptr;
    }
    return j;
}

inline json to_json(const QssVerdict &v) {
    json j;
    j["status"] = std::string(to_string(v.status));
    if (v.certificate) {
        json c;
        c["method"] = v.certificate->method;
        c["ensemble"] = to_json(v.certificate->ensemble);
        c["weights"] = to_json(v.certificate->weights);
        c["separability"] = v.evidence.ppt_exact ? "separable" : "PPT-separable";
        j["certificate"] = std::move(c);
    } else {
        j["certificate"] = nullptr;
    }
    json ev;
    ev["lambda_primes"] = to_json(v.evidence.lambda_primes);
    ev["rank"] = v.evidence.rank;
    ev["best_pt_eigenvalue"] = v.evidence.best_pt_eigenvalue ? json(*v.evidence.best_pt_eigenvalue) : json(nullptr);
    ev["evaluations"] = v.evidence.evaluations;
    ev["ppt_exact"] = v.evidence.ppt_exact;
    j["evidence"] = std::move(ev);
    return j;
}

inline json to_json(const SearchReport &r) {
    json j;
    j["success"] = r.success;
    j["best_score"] = r.best_score;
    j["best_restart"] = r.best_restart;
    j["best_origin"] = r.best_origin;
    j["restarts_used"] = r.restarts_used;
    j["evaluations"] = r.evaluations;
    j["best_outcome"] = to_json(r.best_outcome);
    j["best_round"] = to_json(r.best_round);
    j["trace"] = to_json(r.trace);
    return j;
}

inline json to_json(const ProbeReport &r) {
    json j;
    j["source_verdict"] = to_json(r.source_verdict);
    j["ancilla_verdict"] = to_json(r.ancilla_verdict);
    j["search"] = to_json(r.search);
    j["violation"] = r.violation;
    j["scope"] = "single round";
    return j;
}

/// Every tolerance the library applies, as printed into reports.
inline json tolerances(const SuccessThresholds &t = {}) {
    json j;
    j["rank_cutoff"] = rank_cutoff;
    j["hermitian"] = 1e-10;
    j["trace"] = 1e-10;
    j["positivity"] = 1e-10;
    j["unitarity"] = 1e-10;
    j["ppt"] = ppt_tolerance;
    j["probability_floor"] = probability_floor;
    j["pure"] = 1e-9;
    j["certificate_weight_floor"] = certificate_weight_floor;
    j["search_weight_floor"] = detail::search_weight_floor;
    j["success_probability"] = t.probability;
    j["success_purity_gap"] = t.purity_gap;
    j["success_entanglement"] = t.entanglement;
    return j;
}

/// FNV-1a over the compact encoding of `tolerances`, as 16 hex digits.
inline std::string config_hash(const json &tol) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tol.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ReportDocument {
    std::string command;
    json inputs = json::object();
    json results = json::object();
    json tolerances = qsslab::tolerances();
    std::uint64_t seed = 0;

    friend bool operator==(const ReportDocument &, const ReportDocument &) = default;
};

inline json to_json(const ReportDocument &d) {
    json j;
    j["command"] = d.command;
    j["seed"] = d.seed;
    j["inputs"] = d.inputs;
    j["results"] = d.results;
    json v;
    v["qsslab"] = std::string(version);
    v["config_hash"] = config_hash(d.tolerances);
    v["tolerances"] = d.tolerances;
    j["versions"] = std::move(v);
    return j;
}

inline ReportDocument report_from_json(const json &j) {
    ReportDocument d;
    try {
        d.command = detail::field(j, "command").get<std::string>();
        d.seed = detail::field(j, "seed").get<std::uint64_t>();
        d.inputs = detail::field(j, "inputs");
        d.results = detail::field(j, "results");
        const json &v = detail::field(j, "versions");
        d.tolerances = detail::field(v, "tolerances");
        if (detail::field(v, "config_hash").get<std::string>() != config_hash(d.tolerances))
            detail::parse_fail("config_hash does not match tolerances");
    } catch (const json::exception &ex) {
        detail::parse_fail(ex.what());
    }
    return d;
}

namespace detail {

inline bool all_finite(const json &j) {
    if (j.is_number_float()) return std::isfinite(j.get<double>());
    if (j.is_structured())
        for (const auto &x : j)
            if (!all_finite(x)) return false;
    return true;
}

}  // namespace detail

/// Stable text form of a report: two-space indent, trailing newline.
inline std::string encode_report(const ReportDocument &d) {
    const json j = to_json(d);
    if (!detail::all_finite(j)) throw error(errc::invalid_state, "finite: report contains NaN or Inf");
    return j.dump(2) + "\n";
}

/// Writes to `path`, or to stdout when `path` is empty or "-".
inline void write_report(const ReportDocument &d, const std::string &path = "") {
    const std::string text = encode_report(d);
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        if (!std::cout) throw error(errc::io_error, "cannot write to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error(errc::io_error, "cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw error(errc::io_error, "failed writing '" + path + "'");
}

inline ReportDocument load_report(const std::string &path) { return report_from_json(read_json_file(path)); }

}  // namespace qsslab

#endif  // QSSLAB_IO_HPP
