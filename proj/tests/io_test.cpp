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

#include "qsslab/io.hpp"

#include <filesystem>
#include <fstream>
#include <limits>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace qsslab;

namespace {

class TempDir {
   public:
    TempDir() : path_(std::filesystem::temp_directory_path() / ("qsslab_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    std::string file(const std::string &name, const std::string &contents = "") const {
        const auto p = (path_ / name).string();
        if (!contents.empty()) std::ofstream(p) << contents;
        return p;
    }

   private:
    std::filesystem::path path_;
};

std::string read_all(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

errc code_of(auto &&fn) {
    try {
        fn();
    } catch (const error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return errc::io_error;
}

std::string message_of(auto &&fn) {
    try {
        fn();
    } catch (const error &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(io, state_round_trip_is_bit_exact) {
    Rng rng(501);
    const QuantumState rho = random_state(bipartite(2, 3, "left", "right"), 4, rng);
    const QuantumState back = state_from_json(json::parse(to_json(rho).dump()));
    EXPECT_EQ(back.matrix(), rho.matrix());
    EXPECT_EQ(back.layout(), rho.layout());
}

TEST(io, ensemble_round_trip_is_bit_exact) {
    Rng rng(502);
    const Ensemble e = spectral_ensemble(test::random_two_qubit(rng, 3));
    const Ensemble back = ensemble_from_json(json::parse(to_json(e).dump()));
    ASSERT_EQ(back.size(), e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_EQ(back.members()[i].weight, e.members()[i].weight);
        EXPECT_EQ(back.members()[i].state, e.members()[i].state);
    }
}

TEST(io, labels_default_for_bipartite_files) {
    const QuantumState rho = state_from_json(json::parse(R"({"dims": [2, 1], "matrix": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]})"));
    EXPECT_EQ(rho.layout(), bipartite(2, 1));
}

TEST(io, load_state_reads_density_and_ensemble_files) {
    TempDir dir;
    const auto werner_path = dir.file("werner.json", to_json(werner(0.9)).dump());
    const auto ens_path = dir.file("bell.json", R"({"dims": [2, 2], "members": [{"weight": 1.0, "vector": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}]})");
    EXPECT_LE(max_abs_diff(density(load_state(werner_path)).matrix(), werner(0.9).matrix()), 0.0);
    const StateFile bell = load_state(ens_path);
    ASSERT_TRUE(std::holds_alternative<Ensemble>(bell));
    EXPECT_NEAR(fidelity_pure(density(bell), bell::phi_plus()), 1.0, 1e-15);
}

TEST(io, load_state_names_the_violated_invariant) {
    TempDir dir;
    CMatrix m = werner(0.5).matrix();
    m *= 0.9;
    const auto trace_path = dir.file("trace.json", json{{"dims", {2, 2}}, {"matrix", to_json(m)}}.dump());
    EXPECT_EQ(code_of([&] { load_state(trace_path); }), errc::invalid_state);
    EXPECT_NE(message_of([&] { load_state(trace_path); }).find("trace"), std::string::npos);

    CMatrix h = werner(0.5).matrix();
    h(0, 1) = complex(0.1, 0.2);
    const auto herm_path = dir.file("herm.json", json{{"dims", {2, 2}}, {"matrix", to_json(h)}}.dump());
    EXPECT_NE(message_of([&] { load_state(herm_path); }).find("hermitian"), std::string::npos);
}

TEST(io, load_state_rejects_malformed_input) {
    TempDir dir;
    EXPECT_EQ(code_of([&] { load_state(dir.file("a.json", "{not json")); }), errc::parse_error);
    EXPECT_EQ(code_of([&] { load_state(dir.file("b.json", R"({"dims": [2, 2]})")); }), errc::parse_error);
    EXPECT_EQ(code_of([&] { load_state(dir.file("c.json", R"({"dims": [2], "matrix": [[[1, 0], [0]], [[0, 0], [0, 0]]]})")); }),
              errc::parse_error);
    EXPECT_EQ(code_of([&] { load_state(dir.file("d.json", R"({"dims": ["2"], "matrix": [[[1, 0]]]})")); }), errc::parse_error);
    EXPECT_EQ(code_of([&] { load_state(dir.file("missing.json")); }), errc::io_error);
}

TEST(io, round_file_requires_unitaries) {
    json j = to_json(named_round("bilateral-cnot"));
    EXPECT_EQ(round_from_json(j).u_alice, cnot_gate());
    j["u_bob"] = to_json(2.0 * CMatrix::identity(4));
    EXPECT_EQ(code_of([&] { round_from_json(j); }), errc::non_unitary);
}

TEST(io, verdict_json_has_status_certificate_and_evidence) {
    const json j = to_json(classify(werner(0.9)));
    EXPECT_EQ(j["status"], "QSS");
    EXPECT_EQ(j["certificate"]["method"], "full-rank");
    EXPECT_EQ(j["certificate"]["weights"].size(), 4u);
    EXPECT_EQ(j["evidence"]["rank"], 4);
    EXPECT_EQ(j["evidence"]["lambda_primes"].size(), 4u);
    EXPECT_TRUE(j["evidence"]["best_pt_eigenvalue"].is_number());

    const json k = to_json(classify(pure_state(bell::phi_plus(), bipartite(2, 2))));
    EXPECT_EQ(k["status"], "NOT_QSS_CANDIDATE");
    EXPECT_TRUE(k["certificate"].is_null());
}

TEST(io, outcome_json_marks_vanishing_branches) {
    const auto outs = run_round(pure_state(CVector::basis(4, 0), bipartite(2, 2, "SS_A", "SS_B")), product_ancilla(),
                                named_round("identity"));
    const json j = to_json(outs[1]);
    EXPECT_EQ(j["probability"], 0.0);
    EXPECT_TRUE(j["post_state"].is_null());
    EXPECT_EQ(to_json(outs[0])["purity"], 1.0);
}

TEST(write_report, identical_documents_give_identical_bytes) {
    TempDir dir;
    ReportDocument doc;
    doc.command = "reproduce-cnot";
    doc.inputs = {{"p1", 0.5}, {"lambda2", 0.5}};
    json outs = json::array();
    for (const auto &o : cnot_example(0.5, 0.5)) outs.push_back(to_json(o));
    doc.results = {{"outcomes", outs}};
    const auto a = dir.file("a.json"), b = dir.file("b.json");
    write_report(doc, a);
    write_report(doc, b);
    const std::string text = read_all(a);
    EXPECT_EQ(text, read_all(b));
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(text, encode_report(doc));
}

TEST(write_report, round_trips_through_its_encoding) {
    TempDir dir;
    ReportDocument doc;
    doc.command = "qss";
    doc.seed = 18446744073709551615ULL;
    doc.inputs = {{"state", "w.json"}, {"budget", 10}};
    doc.results = to_json(classify(werner(0.7)));
    const auto path = dir.file("r.json");
    write_report(doc, path);
    const ReportDocument back = load_report(path);
    EXPECT_EQ(back, doc);
    EXPECT_EQ(encode_report(back), read_all(path));
}

TEST(write_report, refuses_non_finite_numbers) {
    ReportDocument doc;
    doc.command = "ppt";
    doc.results = {{"nested", {{"x", std::numeric_limits<double>::quiet_NaN()}}}};
    EXPECT_EQ(code_of([&] { encode_report(doc); }), errc::invalid_state);
    doc.results = {{"y", json::array({1.0, std::numeric_limits<double>::infinity()})}};
    EXPECT_EQ(code_of([&] { encode_report(doc); }), errc::invalid_state);
}

TEST(write_report, unwritable_path_is_an_io_error) {
    ReportDocument doc;
    doc.command = "ppt";
    EXPECT_EQ(code_of([&] { write_report(doc, "/nonexistent-dir/x/report.json"); }), errc::io_error);
}

TEST(config_hash, tracks_tolerances) {
    const json base = tolerances();
    EXPECT_EQ(config_hash(base), config_hash(tolerances()));
    EXPECT_EQ(config_hash(base).size(), 16u);
    SuccessThresholds t;
    t.purity_gap = 1e-9;
    EXPECT_NE(config_hash(base), config_hash(tolerances(t)));
    EXPECT_EQ(base["ppt"], 1e-10);
    EXPECT_EQ(base["rank_cutoff"], 1e-10);
}

TEST(config_hash, tampered_report_is_rejected) {
    json j = to_json(ReportDocument{"ppt"});
    j["versions"]["tolerances"]["ppt"] = 1e-3;
    EXPECT_EQ(code_of([&] { report_from_json(j); }), errc::parse_error);
}
