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

#include "qsslab/states.hpp"

#include <numbers>

#include "gtest/gtest.h"
#include "qsslab/entanglement.hpp"
#include "test_util.hpp"

using namespace qsslab;
using qsslab::test::random_weights;

namespace {

const Layout two_qubits = bipartite(2, 2);

CVector ket(std::size_t index) { return CVector::basis(4, index); }

}  // namespace

TEST(from_ensemble, pure_member) {
    const Ensemble e({{1.0, ket(0)}}, two_qubits);
    EXPECT_LE(max_abs_diff(from_ensemble(e).matrix(), CMatrix::projector(ket(0))), 0.0);
}

TEST(from_ensemble, source_state_of_cnot_example) {
    const Ensemble e({{0.5, bell::phi_plus()}, {0.5, ket(1)}}, two_qubits);
    CMatrix expected(4, 4);
    expected(0, 0) = expected(0, 3) = expected(3, 0) = expected(3, 3) = 0.25;
    expected(1, 1) = 0.5;
    EXPECT_LE(max_abs_diff(from_ensemble(e).matrix(), expected), 1e-15);
}

TEST(from_ensemble, orthonormal_basis_gives_maximally_mixed) {
    const Ensemble e({{0.25, bell::phi_plus()}, {0.25, bell::phi_minus()}, {0.25, bell::psi_plus()}, {0.25, bell::psi_minus()}},
                     two_qubits);
    EXPECT_LE(max_abs_diff(from_ensemble(e).matrix(), 0.25 * CMatrix::identity(4)), 1e-15);
}

TEST(spectral_ensemble, pure_projector) {
    const auto e = spectral_ensemble(pure_state(bell::psi_minus(), two_qubits));
    ASSERT_EQ(e.size(), 1u);
    EXPECT_NEAR(e.members()[0].weight, 1.0, 1e-14);
    EXPECT_NEAR(std::abs(inner(e.members()[0].state, bell::psi_minus())), 1.0, 1e-14);
}

TEST(spectral_ensemble, maximally_mixed) {
    const auto e = spectral_ensemble(maximally_mixed(two_qubits));
    ASSERT_EQ(e.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(e.members()[i].weight, 0.25, 1e-15);
        for (std::size_t j = 0; j < 4; ++j)
            EXPECT_NEAR(std::abs(inner(e.members()[i].state, e.members()[j].state)), i == j ? 1.0 : 0.0, 1e-14);
    }
}

TEST(spectral_ensemble, werner_weights) {
    const auto w = spectral_ensemble(werner(0.5)).weights();
    ASSERT_EQ(w.size(), 4u);
    EXPECT_NEAR(w[0], 0.625, 1e-14);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(w[k], 0.125, 1e-14);
}

TEST(spectral_ensemble, round_trip) {
    Rng rng(31);
    for (int t = 0; t < 500; ++t) {
        const QuantumState rho = random_state(bipartite(2, 3), 1 + t % 6, rng);
        EXPECT_LE(max_abs_diff(from_ensemble(spectral_ensemble(rho)).matrix(), rho.matrix()), 1e-9);
    }
}

TEST(reweight, identity_reweighting) {
    const auto e = spectral_ensemble(werner(0.3));
    EXPECT_LE(max_abs_diff(reweight(e, e.weights()).matrix(), werner(0.3).matrix()), 1e-14);
}

TEST(reweight, uniform_weights_on_full_rank) {
    Rng rng(32);
    const auto e = spectral_ensemble(random_state(two_qubits, 4, rng));
    const std::vector<double> w(4, 0.25);
    EXPECT_LE(max_abs_diff(reweight(e, w).matrix(), 0.25 * CMatrix::identity(4)), 1e-12);
}

TEST(reweight, bell_mixture_to_separable) {
    const Ensemble e({{0.7, bell::phi_plus()}, {0.3, bell::psi_minus()}}, two_qubits);
    EXPECT_NEAR(concurrence(from_ensemble(e)), 0.4, 1e-12);
    const std::vector<double> w{0.5, 0.5};
    EXPECT_LE(concurrence(reweight(e, w)), 1e-12);
}

TEST(reweight, rejects_bad_weights) {
    const Ensemble e({{0.7, bell::phi_plus()}, {0.3, bell::psi_minus()}}, two_qubits);
    for (const auto &w : {std::vector<double>{0.5}, std::vector<double>{0.6, 0.6}, std::vector<double>{1.2, -0.2},
                          std::vector<double>{0.0, 1.0}}) {
        try {
            reweight(e, w);
            ADD_FAILURE();
        } catch (const error &err) {
            EXPECT_EQ(err.code(), errc::bad_weights);
        }
    }
}

TEST(reweight, convex_weights_stay_valid) {
    Rng rng(33);
    for (int t = 0; t < 200; ++t) {
        const auto e = spectral_ensemble(random_state(two_qubits, 4, rng));
        std::vector<double> w = random_weights(4, rng, 1e-9);
        // Drift towards a vertex.
        for (double lam : {0.5, 0.9, 0.999}) {
            std::vector<double> v(4);
            for (std::size_t k = 0; k < 4; ++k) v[k] = (1 - lam) * w[k] + (k == 0 ? lam : 0.0);
            EXPECT_NO_THROW(QuantumState(reweight(e, v).matrix(), two_qubits));
        }
    }
}

TEST(transform_ensemble, identity) {
    const auto e = spectral_ensemble(werner(0.7));
    const auto t = transform_ensemble(e, CMatrix::identity(4));
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(t.members()[k].weight, e.members()[k].weight, 1e-14);
        EXPECT_LE(max_abs_diff(t.members()[k].state, e.members()[k].state), 1e-14);
    }
}

TEST(transform_ensemble, hadamard_mix_of_maximally_mixed_qubit) {
    const Ensemble e({{0.5, CVector{1, 0}}, {0.5, CVector{0, 1}}}, {{"A", 2}});
    const double s = std::numbers::sqrt2 / 2;
    const auto t = transform_ensemble(e, CMatrix{{s, s}, {s, -s}});
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(std::abs(inner(t.members()[0].state, t.members()[1].state)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t.members()[0].state[0]), s, 1e-15);
    EXPECT_LE(max_abs_diff(from_ensemble(t).matrix(), 0.5 * CMatrix::identity(2)), 1e-15);
}

TEST(transform_ensemble, random_isometries_preserve_state) {
    Rng rng(34);
    for (int t = 0; t < 300; ++t) {
        const std::size_t rank = 1 + t % 4;
        const auto e = spectral_ensemble(random_state(two_qubits, rank, rng));
        const std::size_t k = rank + t % 3;
        const CMatrix u = haar_unitary(k, rng);
        CMatrix iso(k, e.size());
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < e.size(); ++j) iso(i, j) = u(i, j);
        EXPECT_LE(max_abs_diff(from_ensemble(transform_ensemble(e, iso)).matrix(), from_ensemble(e).matrix()), 1e-10);
    }
}

TEST(transform_ensemble, rejects_non_isometry) {
    const auto e = spectral_ensemble(werner(0.7));
    try {
        transform_ensemble(e, 2.0 * CMatrix::identity(4));
        ADD_FAILURE();
    } catch (const error &err) {
        EXPECT_EQ(err.code(), errc::not_isometry);
    }
}

TEST(purity, reference_values) {
    const auto proj = pure_state(bell::phi_plus(), two_qubits);
    EXPECT_NEAR(purity(proj), 1.0, 1e-15);
    EXPECT_TRUE(is_pure(proj));
    EXPECT_NEAR(purity(maximally_mixed(two_qubits)), 0.25, 1e-15);
    EXPECT_FALSE(is_pure(maximally_mixed(two_qubits)));
    const Ensemble e({{0.5, bell::phi_plus()}, {0.5, ket(1)}}, two_qubits);
    const CMatrix m = from_ensemble(e).matrix();
    EXPECT_NEAR(purity(from_ensemble(e)), (m * m).trace().real(), 1e-15);
    EXPECT_NEAR(purity(from_ensemble(e)), 0.5, 1e-15);
}

TEST(fidelity_pure, reference_values) {
    EXPECT_NEAR(fidelity_pure(pure_state(bell::phi_plus(), two_qubits), bell::phi_plus()), 1.0, 1e-15);
    EXPECT_NEAR(fidelity_pure(pure_state(bell::phi_plus(), two_qubits), bell::psi_minus()), 0.0, 1e-15);
    for (double p : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const CMatrix w = werner(p).matrix();
        const CVector phi = bell::phi_plus();
        complex expectation = 0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) expectation += std::conj(phi[i]) * w(i, j) * phi[j];
        EXPECT_NEAR(fidelity_pure(werner(p), phi), expectation.real(), 1e-15);
        EXPECT_NEAR(fidelity_pure(werner(p), phi), p + (1 - p) / 4, 1e-15);
    }
}

TEST(fidelity_pure, rejects_dimension_mismatch) {
    try {
        fidelity_pure(werner(0.5), CVector{1, 0});
        ADD_FAILURE();
    } catch (const error &err) {
        EXPECT_EQ(err.code(), errc::dimension_mismatch);
    }
}

TEST(quantum_state, names_violated_invariant) {
    auto message = [](CMatrix m) {
        try {
            QuantumState(std::move(m), bipartite(2, 2));
        } catch (const error &err) {
            EXPECT_EQ(err.code(), errc::invalid_state);
            return std::string(err.what());
        }
        return std::string();
    };
    EXPECT_NE(message(0.9 * werner(0.5).matrix()).find("trace"), std::string::npos);
    CMatrix nonherm = werner(0.5).matrix();
    nonherm(0, 1) = 0.1;
    EXPECT_NE(message(nonherm).find("hermitian"), std::string::npos);
    CMatrix negative = CMatrix::diagonal(std::vector<double>{1.5, -0.5, 0, 0});
    EXPECT_NE(message(negative).find("positive"), std::string::npos);
    EXPECT_NE(message(CMatrix::identity(3)).find("dims"), std::string::npos);
}
