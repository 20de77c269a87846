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

// Quasi-separable state (QSS) classification.
//
// A state is QSS when some reweighting of some pure-state decomposition of it is
// separable. A QSS verdict always carries that decomposition and the weights, so
// callers can check it without trusting the search that produced it.

#ifndef QSSLAB_QSS_HPP
#define QSSLAB_QSS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsslab/entanglement.hpp"
#include "qsslab/linalg.hpp"
#include "qsslab/states.hpp"

namespace qsslab {

/// Smallest weight a certificate may give any member.
inline constexpr double certificate_weight_floor = 1e-6;

/// Minimum partial-transpose eigenvalue accepted as PPT.
inline constexpr double ppt_tolerance = 1e-10;

enum class QssStatus { qss, not_qss_candidate, unknown };

inline std::string_view to_string(QssStatus s) {
    switch (s) {
        case QssStatus::qss: return "QSS";
        case QssStatus::not_qss_candidate: return "NOT_QSS_CANDIDATE";
        case QssStatus::unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

struct QssCertificate {
    Ensemble ensemble;
    std::vector<double> weights;
    std::string method;  // "separable", "full-rank", "lambda-prime" or "search"

    QuantumState realize() const { return reweight(ensemble, weights); }
};

struct QssEvidence {
    std::vector<double> lambda_primes;  // two-qubit inputs only
    std::size_t rank = 0;
    std::optional<double> best_pt_eigenvalue;
    std::size_t evaluations = 0;
    bool ppt_exact = true;  // false when PPT is only necessary for separability
};

struct QssVerdict {
    QssStatus status = QssStatus::unknown;
    std::optional<QssCertificate> certificate;
    QssEvidence evidence;
};

/// Independent check of a certificate: weights in range and the reweighted state PPT.
inline bool verify_certificate(const QssCertificate &c) {
    if (c.weights.size() != c.ensemble.size()) return false;
    for (double w : c.weights)
        if (!(w >= certificate_weight_floor * (1 - 1e-12) && w <= 1)) return false;
    try {
        return min_pt_eigenvalue(c.realize()) >= -ppt_tolerance;
    } catch (const error &) {
        return false;
    }
}

namespace detail {

inline QssEvidence basic_evidence(const QuantumState &rho) {
    QssEvidence ev;
    ev.rank = numerical_rank(hermitian_eig(rho.matrix()).values);
    ev.ppt_exact = ppt_is_exact(rho);
    if (rho.dims() == std::vector<std::size_t>{2, 2}) ev.lambda_primes = lambda_prime_spectrum(rho.matrix());
    return ev;
}

inline QssVerdict with_certificate(QssEvidence ev, QssCertificate c) {
    const double pt = min_pt_eigenvalue(c.realize());
    if (!ev.best_pt_eigenvalue || *ev.best_pt_eigenvalue < pt) ev.best_pt_eigenvalue = pt;
    return {QssStatus::qss, std::move(c), std::move(ev)};
}

}  // namespace detail

/// Identity reweighting of the spectral ensemble when ρ itself is PPT.
inline QssVerdict separable_certificate(const QuantumState &rho) {
    QssEvidence ev = detail::basic_evidence(rho);
    const double pt = min_pt_eigenvalue(rho);
    ev.best_pt_eigenvalue = pt;
    if (pt < -ppt_tolerance) return {QssStatus::unknown, std::nullopt, std::move(ev)};
    Ensemble e = spectral_ensemble(rho);
    auto w = e.weights();
    if (*std::min_element(w.begin(), w.end()) < certificate_weight_floor) return {QssStatus::unknown, std::nullopt, ev};
    return detail::with_certificate(std::move(ev), {std::move(e), std::move(w), "separable"});
}

/// Full-rank states: uniform weights over the spectral ensemble give I/d.
inline QssVerdict full_rank_certificate(const QuantumState &rho) {
    QssEvidence ev = detail::basic_evidence(rho);
    if (ev.rank != rho.dim()) return {QssStatus::unknown, std::nullopt, std::move(ev)};
    Ensemble e = spectral_ensemble(rho);
    std::vector<double> w(e.size(), 1.0 / static_cast<double>(e.size()));
    return detail::with_certificate(std::move(ev), {std::move(e), std::move(w), "full-rank"});
}

/// Two-qubit criterion on the magic decomposition.
///
/// Changing the weight q of |z_1> while scaling the others proportionally keeps
/// the spin-flip overlap diagonal, so a separable reweighting exists exactly when
/// some λ'_2..4 is nonzero. The minimum partial-transpose eigenvalue is concave in
/// q; golden-section search maximizes it over [1e-6, w_1]. If the optimum found
/// is not separable, a 1000-point grid over the same interval is scanned instead.
inline QssVerdict reweight_certificate_2q(const QuantumState &rho) {
    detail::require_two_qubits(rho);
    QssEvidence ev = detail::basic_evidence(rho);
    if (concurrence_from_spectrum(ev.lambda_primes) <= 1e-9) {
        QssVerdict v = separable_certificate(rho);
        if (v.status == QssStatus::qss) return v;
    }

    const MagicDecomposition md = magic_decomposition(rho);
    ev.lambda_primes = md.lambda_primes;
    ev.lambda_primes.resize(4, 0.0);
    const bool tail = std::any_of(md.lambda_primes.begin() + 1, md.lambda_primes.end(),
                                  [](double x) { return x > 1e-9; });
    if (!tail) return {md.lambda_primes.front() > 0 ? QssStatus::not_qss_candidate : QssStatus::unknown, std::nullopt,
                       std::move(ev)};

    std::vector<EnsembleMember> members;
    double total = 0;
    for (std::size_t i = 0; i < md.z_states.size(); ++i) total += md.weight(i);
    for (std::size_t i = 0; i < md.z_states.size(); ++i)
        members.push_back({md.weight(i) / total, md.z_states[i].normalized()});
    const Ensemble z(std::move(members), rho.layout());
    const auto base = z.weights();
    const double w1 = base[0];

    auto weights_at = [&](double q) {
        std::vector<double> w(base.size());
        w[0] = q;
        for (std::size_t i = 1; i < base.size(); ++i) w[i] = base[i] * (1 - q) / (1 - w1);
        return w;
    };
    auto pt_at = [&](double q) {
        ++ev.evaluations;
        const double pt = min_pt_eigenvalue(reweight(z, weights_at(q)));
        if (!ev.best_pt_eigenvalue || pt > *ev.best_pt_eigenvalue) ev.best_pt_eigenvalue = pt;
        return pt;
    };
    auto separable_at = [&](double q) {
        return pt_at(q) >= -ppt_tolerance && concurrence(reweight(z, weights_at(q))) <= 1e-9;
    };

    std::optional<double> found;
    const double lo_end = certificate_weight_floor;
    if (w1 > lo_end) {
        const double g = (std::sqrt(5.0) - 1) / 2;
        double a = lo_end, b = w1;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = pt_at(c), fd = pt_at(d);
        while (b - a > 1e-13) {
            if (fc >= fd) {
                b = d, d = c, fd = fc;
                c = b - g * (b - a), fc = pt_at(c);
            } else {
                a = c, c = d, fc = fd;
                d = a + g * (b - a), fd = pt_at(d);
            }
        }
        const double q = fc >= fd ? c : d;
        if (separable_at(q)) found = q;
        for (int k = 999; k >= 0 && !found; --k) {
            const double qk = lo_end + (w1 - lo_end) * k / 999.0;
            if (separable_at(qk)) found = qk;
        }
    }
    if (!found) return {QssStatus::unknown, std::nullopt, std::move(ev)};
    QssCertificate c{z, weights_at(*found), "lambda-prime"};
    if (!verify_certificate(c)) return {QssStatus::unknown, std::nullopt, std::move(ev)};
    return detail::with_certificate(std::move(ev), std::move(c));
}

namespace detail {

/// Ensemble and weights encoded by a heuristic-search parameter vector: k² unitary
/// angles (first l columns form the isometry) followed by k weight logits.
struct SearchPoint {
    Ensemble ensemble;
    std::vector<double> weights;
};

inline constexpr double search_weight_floor = 1e-3;

inline std::optional<SearchPoint> decode(const Ensemble &spectral, std::size_t k, std::span<const double> p) {
    const std::size_t l = spectral.size();
    const CMatrix u = parameterized_unitary(p.subspan(0, k * k), k);
    CMatrix iso(k, l);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < l; ++j) iso(i, j) = u(i, j);

    // Members whose amplitude vanishes are dropped by transform_ensemble; the
    // logits are matched to survivors by recomputing the norms.
    std::vector<std::size_t> kept;
    const std::size_t d = spectral.dim();
    for (std::size_t i = 0; i < k; ++i) {
        CVector zv(d);
        for (std::size_t j = 0; j < l; ++j) zv += (iso(i, j) * std::sqrt(spectral.members()[j].weight)) * spectral.members()[j].state;
        if (std::pow(zv.norm(), 2) > 1e-15) kept.push_back(i);
    }
    Ensemble z = transform_ensemble(spectral, iso);
    if (z.size() != kept.size()) return std::nullopt;

    const auto logits = p.subspan(k * k);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i : kept) top = std::max(top, logits[i]);
    std::vector<double> w;
    double s = 0;
    for (std::size_t i : kept) {
        w.push_back(std::exp(logits[i] - top));
        s += w.back();
    }
    const double n = static_cast<double>(kept.size());
    const double floor = n * search_weight_floor < 1 ? search_weight_floor : 0.0;
    for (auto &x : w) x = floor + (1 - n * floor) * x / s;
    return SearchPoint{std::move(z), std::move(w)};
}

}  // namespace detail

/// Derivative-free search for a PPT reweighting of some decomposition of ρ.
///
/// Parameters are the angles of a k×k unitary whose first l columns act as the
/// isometry on the spectral ensemble (k = d, l = rank), plus k weight logits.
/// Each restart runs coordinate pattern search maximizing the minimum
/// partial-transpose eigenvalue (step 0.3, halved on failure, stop at 1e-4).
/// Restart 0 starts from the identity isometry with uniform weights; later
/// restarts draw their start from derive_seed(seed, restart). `budget` counts
/// objective evaluations across all restarts.
inline QssVerdict heuristic_search(const QuantumState &rho, std::size_t budget, std::uint64_t seed) {
    QssEvidence ev = detail::basic_evidence(rho);
    const Ensemble spectral = spectral_ensemble(rho);
    const std::size_t k = rho.dim();
    const std::size_t n = k * k + k;

    std::optional<detail::SearchPoint> best_point;
    double best = -std::numeric_limits<double>::infinity();

    auto evaluate = [&](std::span<const double> p) {
        ++ev.evaluations;
        const auto sp = detail::decode(spectral, k, p);
        if (!sp) return -std::numeric_limits<double>::infinity();
        const double v = min_pt_eigenvalue(detail::mixture(sp->ensemble, sp->weights), rho.bipartite_dims().first,
                                           rho.bipartite_dims().second);
        if (v > best) {
            best = v;
            best_point = *sp;
        }
        return v;
    };
    auto done = [&] { return best >= -ppt_tolerance || ev.evaluations >= budget; };

    for (std::uint64_t restart = 0; !done(); ++restart) {
        std::vector<double> p(n, 0.0);
        if (restart > 0) {
            Rng rng(derive_seed(seed, restart));
            std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
            std::normal_distribution<double> logit(0.0, 1.0);
            for (std::size_t i = 0; i < k * k; ++i) p[i] = angle(rng);
            for (std::size_t i = k * k; i < n; ++i) p[i] = logit(rng);
        }
        double value = evaluate(p);
        for (double step = 0.3; step >= 1e-4 && !done(); step *= 0.5) {
            bool improved = true;
            while (improved && !done()) {
                improved = false;
                for (std::size_t i = 0; i < n && !done(); ++i) {
                    for (double dir : {1.0, -1.0}) {
                        p[i] += dir * step;
                        const double trial = evaluate(p);
                        if (trial > value) {
                            value = trial;
                            improved = true;
                            break;
                        }
                        p[i] -= dir * step;
                        if (done()) break;
                    }
                }
            }
        }
    }

    ev.best_pt_eigenvalue = best;
    if (best >= -ppt_tolerance && best_point) {
        QssCertificate c{std::move(best_point->ensemble), std::move(best_point->weights), "search"};
        if (verify_certificate(c)) return detail::with_certificate(std::move(ev), std::move(c));
    }
    return {QssStatus::unknown, std::nullopt, std::move(ev)};
}

/// Full rank, then separable, then the two-qubit criterion, then heuristic search.
/// A QSS verdict is returned only if its certificate re-verifies.
inline QssVerdict classify(const QuantumState &rho, std::size_t budget = 10000, std::uint64_t seed = 0) {
    auto checked = [](QssVerdict v) {
        if (v.status == QssStatus::qss && (!v.certificate || !verify_certificate(*v.certificate))) {
            v.status = QssStatus::unknown;
            v.certificate.reset();
        }
        return v;
    };
    QssVerdict v = checked(full_rank_certificate(rho));
    if (v.status == QssStatus::qss) return v;
    v = checked(separable_certificate(rho));
    if (v.status == QssStatus::qss) return v;
    if (rho.dims() == std::vector<std::size_t>{2, 2}) return checked(reweight_certificate_2q(rho));
    return checked(heuristic_search(rho, budget, seed));
}

/// Carry a certificate through the local filter a ⊗ b.
///
/// Members become (a ⊗ b)ψ_i normalized; certificate weights w_i become
/// proportional to w_i ‖(a ⊗ b)ψ_i‖². The result reweights to the filtered image
/// of the original new-state. Members annihilated by the filter are dropped.
inline QssCertificate filter_certificate(const QssCertificate &c, const CMatrix &a, const CMatrix &b) {
    const CMatrix f = kron(a, b);
    if (f.cols() != c.ensemble.dim()) throw error(errc::dimension_mismatch, "filter does not match the state dimension");
    std::vector<EnsembleMember> base;
    std::vector<double> w;
    double base_total = 0, w_total = 0;
    for (std::size_t i = 0; i < c.ensemble.size(); ++i) {
        const auto &m = c.ensemble.members()[i];
        const CVector v = f * m.state;
        const double n2 = std::pow(v.norm(), 2);
        if (n2 <= 1e-15) continue;
        base.push_back({m.weight * n2, v.normalized()});
        w.push_back(c.weights[i] * n2);
        base_total += m.weight * n2;
        w_total += c.weights[i] * n2;
    }
    if (base.empty()) throw error(errc::zero_probability, "filter annihilates every member");
    for (auto &m : base) m.weight /= base_total;
    for (auto &x : w) x /= w_total;
    return {Ensemble(std::move(base), c.ensemble.layout()), std::move(w), c.method};
}

}  // namespace qsslab

#endif  // QSSLAB_QSS_HPP
