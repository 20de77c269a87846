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

// Purification rounds: Alice and Bob each apply a unitary to their source and
// ancilla particles, then measure the whole ancilla in its computational
// product basis and keep the source state conditioned on the outcome.
//
// Storage order of a joint state is [SS_A, SS_B, AS_A, AS_B]. The local
// unitaries act in the order [SS_A, AS_A, SS_B, AS_B]; the two are related
// by `source_ancilla_permutation`.

#ifndef QSSLAB_PROTOCOL_HPP
#define QSSLAB_PROTOCOL_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qsslab/entanglement.hpp"
#include "qsslab/error.hpp"
#include "qsslab/linalg.hpp"
#include "qsslab/states.hpp"

namespace qsslab {

/// Branches below this probability carry no post-measurement state.
inline constexpr double probability_floor = 1e-12;

struct ProtocolRound {
    CMatrix u_alice;  // on SS_A ⊗ AS_A
    CMatrix u_bob;    // on SS_B ⊗ AS_B
};

struct RoundOutcome {
    std::string label;  // ancilla digits, Alice first: "01" means AS_A = 0, AS_B = 1
    std::size_t alice_index = 0;
    std::size_t bob_index = 0;
    double probability = 0;
    std::optional<QuantumState> post_state;
};

inline std::string outcome_label(std::size_t alice, std::size_t bob, std::size_t dim_alice, std::size_t dim_bob) {
    if (dim_alice <= 10 && dim_bob <= 10) return std::to_string(alice) + std::to_string(bob);
    return std::to_string(alice) + "," + std::to_string(bob);
}

/// Maps storage order [SS_A, SS_B, AS_A, AS_B] to action order [SS_A, AS_A, SS_B, AS_B].
inline CMatrix source_ancilla_permutation(std::size_t ss_a, std::size_t ss_b, std::size_t as_a, std::size_t as_b) {
    const std::vector<std::size_t> dims{ss_a, ss_b, as_a, as_b};
    const std::vector<std::size_t> perm{0, 2, 1, 3};
    return permutation_matrix(dims, perm);
}

/// Joint source⊗ancilla state prepared once, then pushed through many candidate rounds.
class RoundSimulator {
   public:
    struct Branch {
        double probability = 0;
        CMatrix block;  // unnormalized source block, trace = probability
    };

    RoundSimulator(const QuantumState &source, const QuantumState &ancilla) : source_layout_(source.layout()) {
        std::tie(ss_a_, ss_b_) = source.bipartite_dims();
        std::tie(as_a_, as_b_) = ancilla.bipartite_dims();
        const CMatrix p = source_ancilla_permutation(ss_a_, ss_b_, as_a_, as_b_);
        joint_ = p * kron(source.matrix(), ancilla.matrix()) * p.adjoint();
    }

    std::size_t alice_dim() const noexcept { return ss_a_ * as_a_; }
    std::size_t bob_dim() const noexcept { return ss_b_ * as_b_; }
    std::size_t ancilla_alice_dim() const noexcept { return as_a_; }
    std::size_t ancilla_bob_dim() const noexcept { return as_b_; }
    const Layout &source_layout() const noexcept { return source_layout_; }

    void check(const ProtocolRound &round) const {
        if (!round.u_alice.is_square() || round.u_alice.rows() != alice_dim())
            throw error(errc::dimension_mismatch, "u_alice must act on SS_A ⊗ AS_A");
        if (!round.u_bob.is_square() || round.u_bob.rows() != bob_dim())
            throw error(errc::dimension_mismatch, "u_bob must act on SS_B ⊗ AS_B");
        if (!is_unitary(round.u_alice)) throw error(errc::non_unitary, "u_alice is not unitary");
        if (!is_unitary(round.u_bob)) throw error(errc::non_unitary, "u_bob is not unitary");
    }

    /// Unnormalized source blocks indexed by alice_index * as_b + bob_index. No validation.
    std::vector<Branch> branches(const ProtocolRound &round) const {
        const CMatrix u = kron(round.u_alice, round.u_bob);
        const CMatrix evolved = u * joint_ * u.adjoint();
        const std::size_t ds = ss_a_ * ss_b_;
        std::vector<Branch> out(as_a_ * as_b_);
        for (std::size_t ma = 0; ma < as_a_; ++ma)
            for (std::size_t mb = 0; mb < as_b_; ++mb) {
                Branch &br = out[ma * as_b_ + mb];
                br.block = CMatrix(ds, ds);
                for (std::size_t i = 0; i < ds; ++i) {
                    const std::size_t gi = index(i / ss_b_, ma, i % ss_b_, mb);
                    for (std::size_t j = 0; j < ds; ++j)
                        br.block(i, j) = evolved(gi, index(j / ss_b_, ma, j % ss_b_, mb));
                }
                br.probability = std::max(0.0, br.block.trace().real());
            }
        return out;
    }

    std::vector<RoundOutcome> run(const ProtocolRound &round) const {
        check(round);
        auto brs = branches(round);
        std::vector<RoundOutcome> out;
        out.reserve(brs.size());
        for (std::size_t ma = 0; ma < as_a_; ++ma)
            for (std::size_t mb = 0; mb < as_b_; ++mb) {
                Branch &br = brs[ma * as_b_ + mb];
                RoundOutcome o{outcome_label(ma, mb, as_a_, as_b_), ma, mb, br.probability, std::nullopt};
                if (br.probability > probability_floor)
                    o.post_state.emplace(QuantumState::trusted, (1.0 / br.probability) * br.block, source_layout_);
                out.push_back(std::move(o));
            }
        return out;
    }

   private:
    std::size_t index(std::size_t sa, std::size_t ma, std::size_t sb, std::size_t mb) const {
        return ((sa * as_a_ + ma) * ss_b_ + sb) * as_b_ + mb;
    }

    Layout source_layout_;
    std::size_t ss_a_ = 0, ss_b_ = 0, as_a_ = 0, as_b_ = 0;
    CMatrix joint_;
};

/// One round: local unitaries on ρ_s⊗ρ_a, ancilla measured in its product basis.
inline std::vector<RoundOutcome> run_round(const QuantumState &source, const QuantumState &ancilla,
                                           const ProtocolRound &round) {
    return RoundSimulator(source, ancilla).run(round);
}

struct FilterResult {
    QuantumState state;
    double probability = 0;
};

/// C ρ C† / tr(C ρ C†)
inline FilterResult apply_global_filter(const QuantumState &source, const CMatrix &c) {
    if (!c.is_square() || c.rows() != source.dim()) throw error(errc::dimension_mismatch, "filter must act on the source space");
    CMatrix out = c * source.matrix() * c.adjoint();
    const double p = out.trace().real();
    if (!(p > probability_floor)) throw error(errc::zero_probability, "filter annihilates the state");
    out *= 1.0 / p;
    return {QuantumState(QuantumState::trusted, std::move(out), source.layout()), p};
}

/// (A⊗B) ρ (A⊗B)† / tr(...)
inline FilterResult apply_local_filter(const QuantumState &source, const CMatrix &a, const CMatrix &b) {
    const auto [da, db] = source.bipartite_dims();
    if (!a.is_square() || a.rows() != da || !b.is_square() || b.rows() != db)
        throw error(errc::dimension_mismatch, "local filters must act on SS_A and SS_B");
    return apply_global_filter(source, kron(a, b));
}

/// Unitary on S ⊗ (qubit ancilla) whose ancilla-0 → ancilla-0 block is the contraction `a`.
///
/// Uses [[A, D_{A*}], [D_A, -A^dagger]] with the defect operators built from one
/// singular value decomposition, so that A D_A = D_{A*} A holds to round-off.
inline CMatrix unitary_dilation(const CMatrix &a) {
    if (!a.is_square()) throw error(errc::dimension_mismatch, "filter must be square");
    const std::size_t d = a.rows();
    const auto dec = svd(a);
    if (dec.s.front() > 1 + 1e-12) throw error(errc::bad_parameters, "filter norm exceeds 1");
    std::vector<double> defect(d);
    for (std::size_t k = 0; k < d; ++k) defect[k] = std::sqrt(std::max(0.0, (1 - dec.s[k]) * (1 + dec.s[k])));
    const CMatrix dm = CMatrix::diagonal(defect);
    const CMatrix defect_a = dec.v * dm * dec.v.adjoint();
    const CMatrix defect_a_star = dec.u * dm * dec.u.adjoint();
    const CMatrix minus_a_adj = -1.0 * a.adjoint();
    const std::array<std::array<const CMatrix *, 2>, 2> block{{{&a, &defect_a_star}, {&defect_a, &minus_a_adj}}};
    CMatrix u(2 * d, 2 * d);
    for (std::size_t ao = 0; ao < 2; ++ao)
        for (std::size_t ai = 0; ai < 2; ++ai)
            for (std::size_t s = 0; s < d; ++s)
                for (std::size_t t = 0; t < d; ++t) u(2 * s + ao, 2 * t + ai) = (*block[ao][ai])(s, t);
    return u;
}

/// Round that realizes the local filter A⊗B on outcome "00" when the ancilla is |00>.
inline ProtocolRound filter_round(const CMatrix &a, const CMatrix &b) { return {unitary_dilation(a), unitary_dilation(b)}; }

inline QuantumState product_ancilla(std::size_t dim_alice = 2, std::size_t dim_bob = 2) {
    return pure_state(CVector::basis(dim_alice * dim_bob, 0), bipartite(dim_alice, dim_bob, "AS_A", "AS_B"));
}

// ---------------------------------------------------------------------------
// Named rounds

inline CMatrix swap_gate(std::size_t d) {
    CMatrix s(d * d, d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
    return s;
}

/// Controlled-NOT with the source particle as control and the ancilla particle as target.
inline CMatrix cnot_gate() { return CMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}; }

inline const std::vector<std::string> &named_rounds() {
    static const std::vector<std::string> names{"identity", "swap", "bilateral-cnot"};
    return names;
}

/// Built-in rounds for the given local dimensions (source particle, ancilla particle) per party.
inline ProtocolRound named_round(std::string_view name, std::size_t ss_a = 2, std::size_t ss_b = 2, std::size_t as_a = 2,
                                 std::size_t as_b = 2) {
    if (name == "identity") return {CMatrix::identity(ss_a * as_a), CMatrix::identity(ss_b * as_b)};
    if (name == "swap") {
        if (ss_a != as_a || ss_b != as_b) throw error(errc::dimension_mismatch, "swap needs equal source and ancilla dims");
        return {swap_gate(ss_a), swap_gate(ss_b)};
    }
    if (name == "bilateral-cnot") {
        if (ss_a != 2 || ss_b != 2 || as_a != 2 || as_b != 2)
            throw error(errc::dimension_mismatch, "bilateral-cnot is defined on qubits");
        return {cnot_gate(), cnot_gate()};
    }
    throw error(errc::bad_parameters, "unknown named round '" + std::string(name) + "'");
}

struct CnotExample {
    QuantumState source;
    QuantumState ancilla;
    ProtocolRound round;
};

/// ρ_s = p1 Φ+ + (1 - p1)|01><01|, ρ_a = (1 - λ2)|11><11| + λ2 Ψ+, bilateral CNOT.
inline CnotExample cnot_example_inputs(double p1, double lambda2) {
    if (!(p1 > 0 && p1 < 1 && lambda2 > 0 && lambda2 < 1))
        throw error(errc::bad_parameters, "p1 and lambda2 must lie in (0, 1)");
    const Layout ss = bipartite(2, 2, "SS_A", "SS_B");
    const Layout as = bipartite(2, 2, "AS_A", "AS_B");
    QuantumState source = from_ensemble(Ensemble({{p1, bell::phi_plus()}, {1 - p1, CVector::basis(4, 1)}}, ss));
    QuantumState ancilla =
        from_ensemble(Ensemble({{1 - lambda2, CVector::basis(4, 3)}, {lambda2, bell::psi_plus()}}, as));
    return {std::move(source), std::move(ancilla), named_round("bilateral-cnot")};
}

inline std::vector<RoundOutcome> cnot_example(double p1, double lambda2) {
    const auto in = cnot_example_inputs(p1, lambda2);
    return run_round(in.source, in.ancilla, in.round);
}

// ---------------------------------------------------------------------------
// Scoring of a single outcome

/// Numerical witnesses for "nonzero probability" and "pure entangled".
struct SuccessThresholds {
    double probability = 1e-6;
    double purity_gap = 1e-6;   // purity >= 1 - purity_gap
    double entanglement = 1e-3; // concurrence, or second Schmidt coefficient beyond qubits
};

/// Concurrence for two qubits, otherwise the second Schmidt coefficient of the dominant eigenvector.
inline double entanglement_witness(const CMatrix &normalized, std::size_t dim_a, std::size_t dim_b) {
    if (dim_a == 2 && dim_b == 2) return concurrence(normalized);
    const auto es = hermitian_eig(normalized);
    const auto sc = schmidt_coefficients(es.vectors.front(), dim_a, dim_b);
    return sc.size() >= 2 ? sc[1] : 0.0;
}

struct OutcomeMetrics {
    double probability = 0;
    double purity = 0;
    double entanglement = 0;
};

inline OutcomeMetrics outcome_metrics(double probability, const CMatrix &block, std::size_t dim_a, std::size_t dim_b) {
    OutcomeMetrics m{probability, 0, 0};
    if (probability <= probability_floor) return m;
    const CMatrix rho = (1.0 / probability) * block;
    for (const auto &x : rho.entries()) m.purity += std::norm(x);
    m.entanglement = entanglement_witness(rho, dim_a, dim_b);
    return m;
}

inline bool meets_success(const OutcomeMetrics &m, const SuccessThresholds &t) {
    return m.probability > t.probability && m.purity >= 1 - t.purity_gap && m.entanglement >= t.entanglement;
}

/// Product of three ramps, each reaching 1 exactly at its success threshold.
inline double outcome_score(const OutcomeMetrics &m, std::size_t source_dim, const SuccessThresholds &t) {
    if (m.probability <= probability_floor) return 0.0;
    const double floor_purity = 1.0 / static_cast<double>(source_dim);
    const double p_ramp = std::min(1.0, m.probability / t.probability);
    const double u_ramp = std::clamp((m.purity - floor_purity) / ((1 - t.purity_gap) - floor_purity), 0.0, 1.0);
    const double e_ramp = std::min(1.0, m.entanglement / t.entanglement);
    return p_ramp * u_ramp * e_ramp;
}

inline OutcomeMetrics outcome_metrics(const RoundOutcome &o) {
    if (!o.post_state) return {o.probability, 0, 0};
    const auto [da, db] = o.post_state->bipartite_dims();
    return outcome_metrics(o.probability, o.probability * o.post_state->matrix(), da, db);
}

inline double outcome_score(const RoundOutcome &o, const SuccessThresholds &t = {}) {
    if (!o.post_state) return 0.0;
    return outcome_score(outcome_metrics(o), o.post_state->dim(), t);
}

// ---------------------------------------------------------------------------
// Multi-round chaining

struct SequenceStep {
    QuantumState ancilla;  // fresh for every round
    ProtocolRound round;
};

enum class BranchPolicy { all_branches, postselect_best_score };

struct BranchNode {
    RoundOutcome outcome;
    double cumulative_probability = 0;
    std::vector<BranchNode> children;
};

namespace detail {

inline std::vector<BranchNode> expand(const QuantumState &source, std::span<const SequenceStep> steps, double prior,
                                      BranchPolicy policy, const SuccessThresholds &t) {
    if (steps.empty()) return {};
    auto outcomes = run_round(source, steps.front().ancilla, steps.front().round);
    if (policy == BranchPolicy::postselect_best_score) {
        std::size_t best = 0;
        double best_score = -1;
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            const double s = outcome_score(outcomes[k], t);
            const bool better = s > best_score ||
                                (s == best_score && outcomes[k].probability > outcomes[best].probability);
            if (better) {
                best = k;
                best_score = s;
            }
        }
        outcomes = {outcomes[best]};
    }
    std::vector<BranchNode> nodes;
    for (auto &o : outcomes) {
        const double cumulative = prior * o.probability;
        BranchNode node{std::move(o), cumulative, {}};
        if (node.outcome.post_state)
            node.children = expand(*node.outcome.post_state, steps.subspan(1), node.cumulative_probability, policy, t);
        nodes.push_back(std::move(node));
    }
    return nodes;
}

}  // namespace detail

/// Chains rounds along measurement branches; cumulative probability is the product along a branch.
inline std::vector<BranchNode> run_sequence(const QuantumState &source, std::span<const SequenceStep> steps,
                                            BranchPolicy policy = BranchPolicy::all_branches,
                                            const SuccessThresholds &thresholds = {}) {
    return detail::expand(source, steps, 1.0, policy, thresholds);
}

}  // namespace qsslab

#endif  // QSSLAB_PROTOCOL_HPP
