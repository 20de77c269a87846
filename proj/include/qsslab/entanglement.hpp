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

// Two-qubit spin-flip machinery (concurrence, magic decomposition) and
// general bipartite separability/Schmidt tools.

#ifndef QSSLAB_ENTANGLEMENT_HPP
#define QSSLAB_ENTANGLEMENT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsslab/error.hpp"
#include "qsslab/linalg.hpp"
#include "qsslab/states.hpp"

namespace qsslab {

namespace detail {

inline void require_two_qubits(const QuantumState &rho) {
    if (rho.layout().size() != 2 || rho.layout()[0].dim != 2 || rho.layout()[1].dim != 2)
        throw error(errc::dimension_mismatch, "expected a 2x2 two-qubit state");
}

}  // namespace detail

/// σ_y ⊗ σ_y |v^*>
inline CVector spin_flip(const CVector &v) {
    if (v.dim() != 4) throw error(errc::dimension_mismatch, "spin flip is defined on two qubits");
    return {-std::conj(v[3]), std::conj(v[2]), std::conj(v[1]), -std::conj(v[0])};
}

/// Descending square roots of the eigenvalues of ρ ρ̃.
///
/// These are the Takagi values of τ_ij = <x_i|x̃_j> over subnormalized
/// eigenvectors x_i = √p_i e_i. Eigenvalues at the eigensolver noise level
/// (below 1e-14) are treated as zero.
inline std::vector<double> lambda_prime_spectrum(const CMatrix &rho) {
    const EigenSystem es = hermitian_eig(rho);
    std::vector<CVector> xs;
    for (std::size_t k = 0; k < es.values.size(); ++k)
        if (es.values[k] > 1e-14) xs.push_back(std::sqrt(es.values[k]) * es.vectors[k]);
    std::vector<double> vals(4, 0.0);
    if (xs.empty()) return vals;
    CMatrix tau(xs.size(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) tau(i, j) = inner(xs[i], spin_flip(xs[j]));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) tau(i, j) = tau(j, i) = 0.5 * (tau(i, j) + tau(j, i));
    const auto d = takagi(tau).d;
    std::copy(d.begin(), d.end(), vals.begin());
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

inline double concurrence_from_spectrum(std::span<const double> lp) {
    return std::clamp(lp[0] - lp[1] - lp[2] - lp[3], 0.0, 1.0);
}

inline double concurrence(const QuantumState &rho) {
    detail::require_two_qubits(rho);
    return concurrence_from_spectrum(lambda_prime_spectrum(rho.matrix()));
}

/// Concurrence of an arbitrary 4x4 density matrix without layout checks.
inline double concurrence(const CMatrix &rho) { return concurrence_from_spectrum(lambda_prime_spectrum(rho)); }

struct MagicDecomposition {
    std::vector<CVector> z_states;     // unnormalized: <z_i|z_i> is the weight
    std::vector<double> lambda_primes; // <z_i|z̃_i>, descending
    CMatrix transform;                 // z_i = Σ_j transform(i, j) x_j
    std::vector<CVector> x_states;     // subnormalized eigenvectors the transform acts on

    double weight(std::size_t i) const { return std::pow(z_states[i].norm(), 2); }
};

/// Decomposition ρ = Σ|z_i><z_i| with <z_i|z̃_j> = λ'_i δ_ij.
///
/// τ_ij = <x_i|x̃_j> over the subnormalized eigenvectors is complex symmetric.
/// With its Takagi factorization τ = U D U^T, the vectors z = X U diagonalize
/// the spin-flip overlap to D with real non-negative entries.
inline MagicDecomposition magic_decomposition(const QuantumState &rho) {
    detail::require_two_qubits(rho);
    const auto es = hermitian_eig(rho.matrix());
    const std::size_t l = numerical_rank(es.values);

    std::vector<CVector> xs;
    xs.reserve(l);
    for (std::size_t j = 0; j < l; ++j) xs.push_back(std::sqrt(std::max(es.values[j], 0.0)) * es.vectors[j]);

    CMatrix tau(l, l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i; j < l; ++j) tau(i, j) = tau(j, i) = inner(xs[i], spin_flip(xs[j]));

    const TakagiFactorization tk = takagi(tau);

    struct Entry {
        CVector z;
        double lp;
        std::size_t col;
    };
    std::vector<Entry> entries;
    entries.reserve(l);
    for (std::size_t i = 0; i < l; ++i) {
        CVector z(4);
        for (std::size_t j = 0; j < l; ++j) z += tk.u(j, i) * xs[j];
        entries.push_back({z, tk.d[i], i});
    }
    // Degenerate λ' are ordered by the lexicographic order of their entries.
    auto lex_less = [](const CVector &a, const CVector &b) {
        for (std::size_t k = 0; k < a.dim(); ++k) {
            if (std::abs(a[k].real() - b[k].real()) > 1e-12) return a[k].real() < b[k].real();
            if (std::abs(a[k].imag() - b[k].imag()) > 1e-12) return a[k].imag() < b[k].imag();
        }
        return false;
    };
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry &a, const Entry &b) {
        if (std::abs(a.lp - b.lp) > 1e-9) return a.lp > b.lp;
        return lex_less(a.z, b.z);
    });

    MagicDecomposition out;
    out.transform = CMatrix(l, l);
    for (std::size_t i = 0; i < l; ++i) {
        out.z_states.push_back(entries[i].z);
        out.lambda_primes.push_back(entries[i].lp);
        for (std::size_t j = 0; j < l; ++j) out.transform(i, j) = tk.u(j, entries[i].col);
    }
    out.x_states = std::move(xs);
    return out;
}

/// Smallest eigenvalue of the partial transpose on Bob's side.
inline double min_pt_eigenvalue(const CMatrix &rho, std::size_t dim_a, std::size_t dim_b) {
    return hermitian_eig(partial_transpose(rho, dim_a, dim_b, Side::B)).values.back();
}

inline double min_pt_eigenvalue(const QuantumState &rho) {
    const auto [da, db] = rho.bipartite_dims();
    return min_pt_eigenvalue(rho.matrix(), da, db);
}

/// Positive-partial-transpose test at tolerance 1e-10. Decides separability exactly only when d_A * d_B <= 6.
inline bool ppt_separable(const QuantumState &rho) { return min_pt_eigenvalue(rho) >= -1e-10; }

inline bool ppt_is_exact(const QuantumState &rho) {
    const auto [da, db] = rho.bipartite_dims();
    return da * db <= 6;
}

/// Singular values of the d_A x d_B amplitude matrix, descending. Squared coefficients
/// below the rank cutoff are dropped, so the length is the numerical Schmidt rank.
inline std::vector<double> schmidt_coefficients(const CVector &psi, std::size_t dim_a, std::size_t dim_b) {
    if (psi.dim() != dim_a * dim_b) throw error(errc::dimension_mismatch, "d_A * d_B != vector dimension");
    CMatrix m(dim_a, dim_b);
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j) m(i, j) = psi[i * dim_b + j];
    auto vals = hermitian_eig(dim_a <= dim_b ? m * m.adjoint() : m.adjoint() * m).values;
    vals.resize(numerical_rank(vals));
    for (auto &x : vals) x = std::sqrt(x);
    return vals;
}

}  // namespace qsslab

#endif  // QSSLAB_ENTANGLEMENT_HPP
