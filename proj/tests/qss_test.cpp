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

#include "qsslab/qss.hpp"

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "qsslab/protocol.hpp"
#include "test_util.hpp"

using namespace qsslab;

namespace {

QuantumState mix(std::initializer_list<std::pair<double, CVector>> parts, Layout layout = bipartite(2, 2)) {
    CMatrix m(layout_size(layout), layout_size(layout));
    for (const auto &[w, v] : parts) m += w * CMatrix::projector(v.normalized());
    return {m, std::move(layout)};
}

CVector ket(std::size_t dim, std::size_t i) { return CVector::basis(dim, i); }

// Every QSS verdict must carry a certificate that an independent check accepts
// and whose base weights rebuild the input.
void expect_sound(const QssVerdict &v, const QuantumState &rho) {
    if (v.status != QssStatus::qss) return;
    ASSERT_TRUE(v.certificate.has_value());
    const auto &c = *v.certificate;
    EXPECT_TRUE(verify_certificate(c));
    for (double w : c.weights) EXPECT_GE(w, certificate_weight_floor * (1 - 1e-12));
    EXPECT_LE(max_abs_diff(from_ensemble(c.ensemble).matrix(), rho.matrix()), 1e-9);
    if (rho.dims() == std::vector<std::size_t>{2, 2})
        EXPECT_GE(test::min_pt_eigenvalue_oracle(c.realize().matrix()), -1e-7);
}

}  // namespace

TEST(qss_status, names) {
    EXPECT_EQ(to_string(QssStatus::qss), "QSS");
    EXPECT_EQ(to_string(QssStatus::not_qss_candidate), "NOT_QSS_CANDIDATE");
    EXPECT_EQ(to_string(QssStatus::unknown), "UNKNOWN");
}

TEST(full_rank_certificate, werner_reweights_to_maximally_mixed) {
    const QuantumState w = werner(0.9);
    const QssVerdict v = full_rank_certificate(w);
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.evidence.rank, 4u);
    EXPECT_LE(max_abs_diff(v.certificate->realize().matrix(), 0.25 * CMatrix::identity(4)), 1e-10);
    expect_sound(v, w);
}

TEST(full_rank_certificate, rank_deficient_is_deferred) {
    const QssVerdict v = full_rank_certificate(pure_state(bell::phi_plus(), bipartite(2, 2)));
    EXPECT_EQ(v.status, QssStatus::unknown);
    EXPECT_FALSE(v.certificate.has_value());
    EXPECT_EQ(v.evidence.rank, 1u);
}

TEST(full_rank_certificate, pure_state_with_a_little_identity) {
    const CMatrix m = (1 - 1e-3) * CMatrix::projector(bell::phi_plus()) + (1e-3 / 4) * CMatrix::identity(4);
    const QuantumState rho(m, bipartite(2, 2));
    const QssVerdict v = full_rank_certificate(rho);
    ASSERT_EQ(v.status, QssStatus::qss);
    expect_sound(v, rho);
}

TEST(reweight_certificate_2q, bell_mixture_balances_to_half_half) {
    const QuantumState rho = mix({{0.7, bell::phi_plus()}, {0.3, bell::psi_minus()}});
    const QssVerdict v = reweight_certificate_2q(rho);
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.certificate->method, "lambda-prime");
    ASSERT_EQ(v.certificate->weights.size(), 2u);
    EXPECT_NEAR(v.certificate->weights[0], 0.5, 1e-9);
    EXPECT_NEAR(v.certificate->weights[1], 0.5, 1e-9);
    EXPECT_LE(test::concurrence_oracle(v.certificate->realize().matrix()), 1e-4);
    expect_sound(v, rho);
}

TEST(reweight_certificate_2q, cnot_example_source_is_a_candidate) {
    const QuantumState rho = mix({{0.5, bell::phi_plus()}, {0.5, ket(4, 1)}});
    const QssVerdict v = reweight_certificate_2q(rho);
    EXPECT_EQ(v.status, QssStatus::not_qss_candidate);
    EXPECT_FALSE(v.certificate.has_value());
    ASSERT_EQ(v.evidence.lambda_primes.size(), 4u);
    EXPECT_NEAR(v.evidence.lambda_primes[0], 0.5, 1e-9);
    for (int i = 1; i < 4; ++i) EXPECT_LE(v.evidence.lambda_primes[i], 1e-9);
}

TEST(reweight_certificate_2q, separable_input_uses_identity_reweighting) {
    const QuantumState rho = mix({{0.3, ket(4, 0)}, {0.7, kron(CVector{1, 1}, CVector{1, 0}).normalized()}});
    const QssVerdict v = reweight_certificate_2q(rho);
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.certificate->method, "separable");
    EXPECT_LE(max_abs_diff(v.certificate->realize().matrix(), rho.matrix()), 1e-10);
    expect_sound(v, rho);
}

TEST(reweight_certificate_2q, rejects_other_dimensions) {
    EXPECT_THROW(reweight_certificate_2q(maximally_mixed(bipartite(2, 3))), error);
}

TEST(classify, full_rank_takes_precedence_over_separable) {
    const QssVerdict v = classify(maximally_mixed(bipartite(2, 2)));
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.certificate->method, "full-rank");
}

TEST(classify, rank_deficient_separable_state_keeps_its_weights) {
    const QuantumState rho = mix({{0.4, ket(4, 0)}, {0.6, ket(4, 3)}});
    const QssVerdict v = classify(rho);
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.certificate->method, "separable");
    EXPECT_LE(max_abs_diff(v.certificate->realize().matrix(), rho.matrix()), 1e-10);
}

TEST(classify, cnot_example_ancilla_is_a_candidate) {
    const QuantumState rho = mix({{0.5, ket(4, 3)}, {0.5, bell::psi_plus()}});
    EXPECT_EQ(classify(rho).status, QssStatus::not_qss_candidate);
}

TEST(classify, random_rank3_entangled_states_are_qss) {
    Rng rng(301);
    int entangled = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const QuantumState rho = test::random_two_qubit(rng, 3);
        if (concurrence(rho) < 1e-3) continue;
        ++entangled;
        const QssVerdict v = classify(rho);
        EXPECT_EQ(v.status, QssStatus::qss) << trial;
        EXPECT_EQ(v.certificate->method, "lambda-prime");
        expect_sound(v, rho);
    }
    EXPECT_GT(entangled, 5);
}

TEST(classify, soundness_over_random_ranks) {
    Rng rng(302);
    for (int trial = 0; trial < 60; ++trial) {
        const QuantumState rho = test::random_two_qubit(rng, 1 + trial % 4);
        const QssVerdict v = classify(rho);
        expect_sound(v, rho);
        if (trial % 4 == 0) EXPECT_EQ(v.status, QssStatus::not_qss_candidate);
    }
}

TEST(classify, deterministic_for_fixed_seed) {
    const QuantumState rho = random_state(bipartite(2, 3), 3, 7);
    const QssVerdict a = classify(rho, 3000, 11), b = classify(rho, 3000, 11);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.evidence.evaluations, b.evidence.evaluations);
    EXPECT_EQ(a.evidence.best_pt_eigenvalue, b.evidence.best_pt_eigenvalue);
    if (a.certificate) EXPECT_EQ(a.certificate->weights, b.certificate->weights);
}

TEST(heuristic_search, full_rank_needs_one_evaluation) {
    Rng rng(303);
    const QuantumState rho = test::random_two_qubit(rng);
    const QssVerdict v = heuristic_search(rho, 100, 0);
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.evidence.evaluations, 1u);
    expect_sound(v, rho);
}

TEST(heuristic_search, pure_entangled_state_stays_unknown) {
    const QuantumState rho = pure_state(bell::phi_plus(), bipartite(2, 2));
    const QssVerdict v = heuristic_search(rho, 500, 0);
    EXPECT_EQ(v.status, QssStatus::unknown);
    EXPECT_EQ(v.evidence.evaluations, 500u);
    EXPECT_NEAR(*v.evidence.best_pt_eigenvalue, -0.5, 1e-9);
}

TEST(heuristic_search, cnot_example_source_stays_unknown) {
    const QuantumState rho = mix({{0.5, bell::phi_plus()}, {0.5, ket(4, 1)}});
    const QssVerdict v = heuristic_search(rho, 10000, 0);
    EXPECT_EQ(v.status, QssStatus::unknown);
    EXPECT_LT(*v.evidence.best_pt_eigenvalue, -ppt_tolerance);
}

TEST(heuristic_search, finds_certificate_for_qubit_qutrit_mixture) {
    // Entangled, rank 3, and a balanced reweighting of these members is PPT.
    const CVector psi = (kron(ket(2, 0), ket(3, 0)) + kron(ket(2, 1), ket(3, 1))).normalized();
    const QuantumState rho = mix({{0.6, psi}, {0.2, kron(ket(2, 0), ket(3, 1))}, {0.2, kron(ket(2, 1), ket(3, 0))}},
                                 bipartite(2, 3));
    ASSERT_LT(min_pt_eigenvalue(rho), -1e-3);
    const QssVerdict v = classify(rho, 20000, 5);
    ASSERT_EQ(v.status, QssStatus::qss);
    EXPECT_EQ(v.certificate->method, "search");
    expect_sound(v, rho);
}

TEST(filter_certificate, transported_certificate_matches_filtered_state) {
    Rng rng(304);
    for (int trial = 0; trial < 20; ++trial) {
        const QuantumState rho = test::random_two_qubit(rng, 2 + trial % 3);
        const QssVerdict v = classify(rho);
        if (v.status != QssStatus::qss) continue;
        CMatrix a = test::random_matrix(2, 2, rng), b = test::random_matrix(2, 2, rng);
        a *= 1.0 / singular_values(a).front();
        b *= 1.0 / singular_values(b).front();
        const FilterResult filtered = apply_local_filter(rho, a, b);
        const QssCertificate moved = filter_certificate(*v.certificate, a, b);
        EXPECT_LE(max_abs_diff(from_ensemble(moved.ensemble).matrix(), filtered.state.matrix()), 1e-9);

        CMatrix image = kron(a, b) * v.certificate->realize().matrix() * kron(a, b).adjoint();
        image *= 1.0 / image.trace().real();
        EXPECT_LE(max_abs_diff(moved.realize().matrix(), image), 1e-9);
        EXPECT_GE(min_pt_eigenvalue(moved.realize()), -1e-9);
    }
}
