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

// Density matrices, pure-state ensembles, and reweighted ("new") states.

#ifndef QSSLAB_STATES_HPP
#define QSSLAB_STATES_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qsslab/error.hpp"
#include "qsslab/linalg.hpp"

namespace qsslab {

struct Subsystem {
    std::string label;
    std::size_t dim = 0;

    friend bool operator==(const Subsystem &, const Subsystem &) = default;
};

using Layout = std::vector<Subsystem>;

/// Alice/Bob two-party layout, e.g. {"A",2},{"B",2}.
inline Layout bipartite(std::size_t dim_a, std::size_t dim_b, std::string label_a = "A", std::string label_b = "B") {
    return {{std::move(label_a), dim_a}, {std::move(label_b), dim_b}};
}

inline std::vector<std::size_t> layout_dims(const Layout &layout) {
    std::vector<std::size_t> d;
    d.reserve(layout.size());
    for (const auto &s : layout) d.push_back(s.dim);
    return d;
}

inline std::size_t layout_size(const Layout &layout) {
    std::size_t n = 1;
    for (const auto &s : layout) n *= s.dim;
    return n;
}

/// Validated density matrix with subsystem layout.
class QuantumState {
   public:
    struct trusted_t {};
    static constexpr trusted_t trusted{};

    QuantumState() = default;

    /// Throws InvalidState naming the first violated invariant.
    QuantumState(CMatrix matrix, Layout layout) : matrix_(std::move(matrix)), layout_(std::move(layout)) {
        validate();
    }

    /// Skips the spectral positivity check; the matrix is still symmetrized and checked for shape.
    QuantumState(trusted_t, CMatrix matrix, Layout layout) : matrix_(std::move(matrix)), layout_(std::move(layout)) {
        if (!matrix_.is_square() || layout_size(layout_) != matrix_.rows())
            throw error(errc::invalid_state, "dims: product of dims must equal the matrix dimension");
        symmetrize();
    }

    const CMatrix &matrix() const noexcept { return matrix_; }
    const Layout &layout() const noexcept { return layout_; }
    std::vector<std::size_t> dims() const { return layout_dims(layout_); }
    std::size_t dim() const noexcept { return matrix_.rows(); }

    /// Dimension of the first party and of the remaining parties, for bipartite routines.
    std::pair<std::size_t, std::size_t> bipartite_dims() const {
        if (layout_.size() != 2) throw error(errc::dimension_mismatch, "state is not bipartite");
        return {layout_[0].dim, layout_[1].dim};
    }

   private:
    void symmetrize() {
        const std::size_t n = matrix_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            matrix_(i, i) = matrix_(i, i).real();
            for (std::size_t j = i + 1; j < n; ++j) {
                const complex avg = 0.5 * (matrix_(i, j) + std::conj(matrix_(j, i)));
                matrix_(i, j) = avg;
                matrix_(j, i) = std::conj(avg);
            }
        }
    }

    void validate() {
        if (!matrix_.is_square()) throw error(errc::invalid_state, "dims: matrix is not square");
        if (layout_size(layout_) != matrix_.rows())
            throw error(errc::invalid_state, "dims: product of dims must equal the matrix dimension");
        if (!matrix_.is_finite()) throw error(errc::invalid_state, "finite: matrix has NaN or Inf entries");
        if (hermiticity_error(matrix_) > 1e-10) throw error(errc::invalid_state, "hermitian: matrix is not Hermitian");
        if (std::abs(matrix_.trace() - 1.0) > 1e-10) throw error(errc::invalid_state, "trace: trace differs from 1");
        symmetrize();
        const auto es = hermitian_eig(matrix_);
        if (!es.values.empty() && es.values.back() < -1e-10)
            throw error(errc::invalid_state, "positive: minimum eigenvalue below -1e-10");
    }

    CMatrix matrix_;
    Layout layout_;
};

struct EnsembleMember {
    double weight = 0;
    CVector state;
};

/// Weighted list of normalized pure states.
class Ensemble {
   public:
    Ensemble() = default;

    Ensemble(std::vector<EnsembleMember> members, Layout layout)
        : members_(std::move(members)), layout_(std::move(layout)) {
        validate();
    }

    const std::vector<EnsembleMember> &members() const noexcept { return members_; }
    const Layout &layout() const noexcept { return layout_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t dim() const noexcept { return layout_size(layout_); }

    std::vector<double> weights() const {
        std::vector<double> w;
        w.reserve(members_.size());
        for (const auto &m : members_) w.push_back(m.weight);
        return w;
    }

   private:
    void validate() const {
        if (members_.empty()) throw error(errc::invalid_state, "members: ensemble is empty");
        double total = 0;
        for (const auto &m : members_) {
            if (m.state.dim() != layout_size(layout_))
                throw error(errc::invalid_state, "dims: member dimension differs from layout");
            if (!m.state.is_finite() || !std::isfinite(m.weight))
                throw error(errc::invalid_state, "finite: member has NaN or Inf entries");
            if (!(m.weight > 0 && m.weight <= 1 + 1e-12))
                throw error(errc::invalid_state, "weight: member weight outside (0, 1]");
            if (std::abs(m.state.norm() - 1) > 1e-10) throw error(errc::invalid_state, "norm: member is not unit norm");
            total += m.weight;
        }
        if (std::abs(total - 1) > 1e-10) throw error(errc::invalid_state, "weights: weights do not sum to 1");
    }

    std::vector<EnsembleMember> members_;
    Layout layout_;
};

namespace detail {

inline CMatrix mixture(const Ensemble &e, std::span<const double> w) {
    const std::size_t d = e.dim();
    CMatrix rho(d, d);
    for (std::size_t k = 0; k < e.size(); ++k) {
        const CVector &v = e.members()[k].state;
        for (std::size_t i = 0; i < d; ++i) {
            const complex a = w[k] * v[i];
            for (std::size_t j = 0; j < d; ++j) rho(i, j) += a * std::conj(v[j]);
        }
    }
    return rho;
}

}  // namespace detail

/// Σ w_i |ψ_i><ψ_i|
inline QuantumState from_ensemble(const Ensemble &e) {
    const auto w = e.weights();
    return {detail::mixture(e, w), e.layout()};
}

/// Orthonormal eigenvectors with eigenvalues above the rank cutoff, renormalized to sum to one.
inline Ensemble spectral_ensemble(const QuantumState &rho) {
    const auto es = hermitian_eig(rho.matrix());
    const std::size_t r = numerical_rank(es.values);
    double total = 0;
    for (std::size_t k = 0; k < r; ++k) total += es.values[k];
    std::vector<EnsembleMember> members;
    members.reserve(r);
    for (std::size_t k = 0; k < r; ++k) members.push_back({es.values[k] / total, es.vectors[k]});
    return {std::move(members), rho.layout()};
}

/// Keep the pure states of `e`, replace their probabilities by `w`.
inline QuantumState reweight(const Ensemble &e, std::span<const double> w) {
    if (w.size() != e.size()) throw error(errc::bad_weights, "weight count differs from member count");
    double total = 0;
    for (double x : w) {
        if (!(x > 0 && x <= 1)) throw error(errc::bad_weights, "weights must lie in (0, 1]");
        total += x;
    }
    if (std::abs(total - 1) > 1e-10) throw error(errc::bad_weights, "weights must sum to 1");
    return {detail::mixture(e, w), e.layout()};
}

/// An ensemble together with replacement weights.
struct NewState {
    Ensemble base;
    std::vector<double> new_weights;

    QuantumState realize() const { return reweight(base, new_weights); }
};

/// z_i = Σ_j u_ij x_j with x_j = sqrt(w_j) ψ_j; members of zero norm are dropped.
inline Ensemble transform_ensemble(const Ensemble &e, const CMatrix &u) {
    if (u.cols() != e.size()) throw error(errc::dimension_mismatch, "isometry column count differs from member count");
    if (max_abs_diff(u.adjoint() * u, CMatrix::identity(u.cols())) > 1e-10)
        throw error(errc::not_isometry, "u^dagger u differs from identity");
    const std::size_t d = e.dim();
    std::vector<EnsembleMember> out;
    std::vector<CVector> zs;
    double total = 0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        CVector z(d);
        for (std::size_t j = 0; j < e.size(); ++j) {
            const complex c = u(i, j) * std::sqrt(e.members()[j].weight);
            const CVector &x = e.members()[j].state;
            for (std::size_t a = 0; a < d; ++a) z[a] += c * x[a];
        }
        const double n2 = std::pow(z.norm(), 2);
        if (n2 <= 1e-15) continue;
        total += n2;
        out.push_back({n2, z.normalized()});
    }
    for (auto &m : out) m.weight /= total;
    return {std::move(out), e.layout()};
}

/// tr(ρ²)
inline double purity(const QuantumState &rho) {
    const CMatrix &m = rho.matrix();
    double s = 0;
    for (const auto &x : m.entries()) s += std::norm(x);
    return s;
}

inline bool is_pure(const QuantumState &rho) { return purity(rho) >= 1 - 1e-9; }

/// <ψ|ρ|ψ>
inline double fidelity_pure(const QuantumState &rho, const CVector &psi) {
    if (psi.dim() != rho.dim()) throw error(errc::dimension_mismatch, "vector and state dimensions differ");
    return std::clamp(inner(psi, rho.matrix() * psi).real(), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Named states used throughout

namespace bell {

inline CVector phi_plus() { return {std::numbers::sqrt2 / 2, 0, 0, std::numbers::sqrt2 / 2}; }
inline CVector phi_minus() { return {std::numbers::sqrt2 / 2, 0, 0, -std::numbers::sqrt2 / 2}; }
inline CVector psi_plus() { return {0, std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2, 0}; }
inline CVector psi_minus() { return {0, std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2, 0}; }

}  // namespace bell

inline QuantumState pure_state(const CVector &psi, Layout layout) {
    return {CMatrix::projector(psi.normalized()), std::move(layout)};
}

inline QuantumState maximally_mixed(Layout layout) {
    const std::size_t d = layout_size(layout);
    return {(1.0 / static_cast<double>(d)) * CMatrix::identity(d), std::move(layout)};
}

/// p |Φ+><Φ+| + (1 - p) I/4
inline QuantumState werner(double p) {
    CMatrix m = p * CMatrix::projector(bell::phi_plus()) + ((1 - p) / 4) * CMatrix::identity(4);
    return {std::move(m), bipartite(2, 2)};
}

/// Ginibre-induced random state of the given rank (rank = dim gives full rank almost surely).
inline QuantumState random_state(const Layout &layout, std::size_t rank, Rng &rng) {
    const std::size_t d = layout_size(layout);
    const CMatrix g = ginibre(d, rank, rng);
    CMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return {QuantumState::trusted, std::move(rho), layout};
}

inline QuantumState random_state(const Layout &layout, std::size_t rank, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(layout, rank, rng);
}

}  // namespace qsslab

#endif  // QSSLAB_STATES_HPP
