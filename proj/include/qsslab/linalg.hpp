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

// Dense complex linear algebra for small Hilbert spaces (dimension up to ~64).
//
// Everything here is a pure function of its arguments. Randomized routines take
// an explicit seed and never share generator state.

#ifndef QSSLAB_LINALG_HPP
#define QSSLAB_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsslab/error.hpp"

namespace qsslab {

using complex = std::complex<double>;

/// Eigenvalues below this fraction of the largest one are treated as zero.
inline constexpr double rank_cutoff = 1e-10;

class CVector {
   public:
    CVector() = default;
    explicit CVector(std::size_t dim) : data_(dim) {}
    CVector(std::initializer_list<complex> entries) : data_(entries) {}
    explicit CVector(std::vector<complex> entries) : data_(std::move(entries)) {}

    static CVector basis(std::size_t dim, std::size_t index) {
        CVector v(dim);
        v[index] = 1.0;
        return v;
    }

    std::size_t dim() const noexcept { return data_.size(); }
    complex &operator[](std::size_t i) { return data_[i]; }
    const complex &operator[](std::size_t i) const { return data_[i]; }
    std::span<const complex> entries() const noexcept { return data_; }
    std::span<complex> entries() noexcept { return data_; }

    double norm() const {
        double s = 0;
        for (const auto &x : data_) s += std::norm(x);
        return std::sqrt(s);
    }

    CVector normalized() const {
        CVector r = *this;
        const double n = norm();
        for (auto &x : r.data_) x /= n;
        return r;
    }

    CVector conj() const {
        CVector r = *this;
        for (auto &x : r.data_) x = std::conj(x);
        return r;
    }

    CVector &operator+=(const CVector &o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    CVector &operator-=(const CVector &o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    CVector &operator*=(complex s) {
        for (auto &x : data_) x *= s;
        return *this;
    }
    friend CVector operator+(CVector a, const CVector &b) { return a += b; }
    friend CVector operator-(CVector a, const CVector &b) { return a -= b; }
    friend CVector operator*(complex s, CVector v) { return v *= s; }
    friend CVector operator*(CVector v, complex s) { return v *= s; }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const complex &x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
    }

    friend bool operator==(const CVector &, const CVector &) = default;

   private:
    std::vector<complex> data_;
};

/// <a|b>, conjugate-linear in the first argument.
inline complex inner(const CVector &a, const CVector &b) {
    complex s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// Row-major dense complex matrix.
class CMatrix {
   public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::initializer_list<std::initializer_list<complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto &r : rows) {
            if (r.size() != cols_) throw error(errc::dimension_mismatch, "ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static CMatrix diagonal(std::span<const double> d) {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    /// |a><b|
    static CMatrix outer(const CVector &a, const CVector &b) {
        CMatrix m(a.dim(), b.dim());
        for (std::size_t i = 0; i < a.dim(); ++i)
            for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
        return m;
    }

    static CMatrix projector(const CVector &v) { return outer(v, v); }

    /// Matrix whose columns are the given vectors.
    static CMatrix from_columns(std::span<const CVector> cols) {
        if (cols.empty()) return {};
        CMatrix m(cols[0].dim(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    complex &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const complex &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const complex> entries() const noexcept { return data_; }
    std::span<complex> entries() noexcept { return data_; }

    CVector column(std::size_t j) const {
        CVector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    void set_column(std::size_t j, const CVector &v) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    CMatrix adjoint() const {
        CMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    CMatrix transpose() const {
        CMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    CMatrix conj() const {
        CMatrix r = *this;
        for (auto &x : r.data_) x = std::conj(x);
        return r;
    }

    complex trace() const {
        complex t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const complex &x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
    }

    CMatrix &operator+=(const CMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    CMatrix &operator-=(const CMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    CMatrix &operator*=(complex s) {
        for (auto &x : data_) x *= s;
        return *this;
    }
    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator*(complex s, CMatrix m) { return m *= s; }
    friend CMatrix operator*(CMatrix m, complex s) { return m *= s; }

    friend CMatrix operator*(const CMatrix &a, const CMatrix &b) {
        if (a.cols_ != b.rows_) throw error(errc::dimension_mismatch, "matrix product shape");
        CMatrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            complex *out = &r.data_[i * b.cols_];
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const complex aik = a(i, k);
                if (aik == complex{}) continue;
                const complex *brow = &b.data_[k * b.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) out[j] += aik * brow[j];
            }
        }
        return r;
    }

    friend CVector operator*(const CMatrix &a, const CVector &v) {
        if (a.cols_ != v.dim()) throw error(errc::dimension_mismatch, "matrix-vector shape");
        CVector r(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            complex s = 0;
            for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    friend bool operator==(const CMatrix &, const CMatrix &) = default;

   private:
    void require_same_shape(const CMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw error(errc::dimension_mismatch, "matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<complex> data_;
};

/// max_ij |a_ij - b_ij|
inline double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw error(errc::dimension_mismatch, "matrix shapes differ");
    double m = 0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

inline double max_abs_diff(const CVector &a, const CVector &b) {
    if (a.dim() != b.dim()) throw error(errc::dimension_mismatch, "vector sizes differ");
    double m = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double hermiticity_error(const CMatrix &h) {
    if (!h.is_square()) return INFINITY;
    double m = 0;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = i; j < h.cols(); ++j) m = std::max(m, std::abs(h(i, j) - std::conj(h(j, i))));
    return m;
}

inline double unitarity_error(const CMatrix &u) {
    if (!u.is_square()) return INFINITY;
    return max_abs_diff(u * u.adjoint(), CMatrix::identity(u.rows()));
}

inline bool is_unitary(const CMatrix &u, double tol = 1e-10) { return unitarity_error(u) <= tol; }

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    const std::size_t p = b.rows(), q = b.cols();
    CMatrix r(a.rows() * p, a.cols() * q);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const complex aij = a(i, j);
            for (std::size_t k = 0; k < p; ++k)
                for (std::size_t l = 0; l < q; ++l) r(i * p + k, j * q + l) = aij * b(k, l);
        }
    return r;
}

inline CVector kron(const CVector &a, const CVector &b) {
    CVector r(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = 0; k < b.dim(); ++k) r[i * b.dim() + k] = a[i] * b[k];
    return r;
}

// ---------------------------------------------------------------------------
// Spectral routines

struct EigenSystem {
    std::vector<double> values;   // descending
    std::vector<CVector> vectors; // orthonormal, vectors[i] belongs to values[i]
};

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
inline EigenSystem hermitian_eig(const CMatrix &h) {
    if (!h.is_square()) throw error(errc::dimension_mismatch, "hermitian_eig needs a square matrix");
    if (hermiticity_error(h) > 1e-10) throw error(errc::not_hermitian, "||h - h^dagger||_max exceeds 1e-10");

    const std::size_t n = h.rows();
    CMatrix a = h;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    CMatrix v = CMatrix::identity(n);

    double scale = 0;
    for (const auto &x : a.entries()) scale = std::max(scale, std::abs(x));

    for (int sweep = 0; sweep < 100 && scale > 0; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-17 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= 1e-300 || mag <= 1e-18 * scale) {
                    a(p, q) = a(q, p) = 0;
                    continue;
                }
                // Phase the pair into a real symmetric 2x2 block, then rotate it away.
                const complex phase = a(p, q) / mag;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double theta = (aqq - app) / (2 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                const complex jpp = c, jpq = s, jqp = -s * std::conj(phase), jqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // a <- a J
                    const complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // a <- J^dagger a
                    const complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {  // v <- v J
                    const complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });
    EigenSystem out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t k : order) {
        out.values.push_back(a(k, k).real());
        out.vectors.push_back(v.column(k));
    }
    return out;
}

/// Number of eigenvalues at or above `rank_cutoff * max(values)`.
inline std::size_t numerical_rank(std::span<const double> values) {
    double top = 0;
    for (double x : values) top = std::max(top, x);
    if (top <= 0) return 0;
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double x) { return x >= rank_cutoff * top; }));
}

inline CMatrix from_eigen(const EigenSystem &es, auto &&fn) {
    const std::size_t n = es.vectors.empty() ? 0 : es.vectors.front().dim();
    CMatrix r(n, n);
    for (std::size_t k = 0; k < es.values.size(); ++k) {
        const double f = fn(es.values[k]);
        if (f == 0) continue;
        const CVector &vk = es.vectors[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += f * vk[i] * std::conj(vk[j]);
    }
    return r;
}

/// Principal square root of a positive semidefinite matrix; negative round-off is clipped.
inline CMatrix psd_sqrt(const CMatrix &h) {
    return from_eigen(hermitian_eig(h), [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

/// Singular values, descending.
inline std::vector<double> singular_values(const CMatrix &m) {
    const CMatrix g = m.rows() <= m.cols() ? m * m.adjoint() : m.adjoint() * m;
    auto vals = hermitian_eig(g).values;
    for (auto &x : vals) x = x > 0 ? std::sqrt(x) : 0.0;
    return vals;
}

struct SingularValueDecomposition {
    CMatrix u;             // left singular vectors as columns
    std::vector<double> s; // descending
    CMatrix v;             // right singular vectors as columns
};

/// a = u diag(s) v^dagger for square a. Left vectors of (numerically) zero
/// singular values are completed to an orthonormal basis.
inline SingularValueDecomposition svd(const CMatrix &a) {
    if (!a.is_square()) throw error(errc::dimension_mismatch, "svd is implemented for square matrices");
    const std::size_t n = a.rows();
    const EigenSystem es = hermitian_eig(a.adjoint() * a);
    SingularValueDecomposition out{CMatrix(n, n), std::vector<double>(n), CMatrix(n, n)};
    const double top = std::sqrt(std::max(es.values.front(), 0.0));
    std::vector<CVector> left;
    for (std::size_t k = 0; k < n; ++k) {
        out.v.set_column(k, es.vectors[k]);
        const CVector av = a * es.vectors[k];
        const double sk = av.norm();
        out.s[k] = sk;
        if (sk > 1e-10 * top && sk > 0) {
            CVector w = (1.0 / sk) * av;
            for (const auto &c : left) w -= inner(c, w) * c;
            left.push_back(w.normalized());
        } else {
            left.emplace_back();
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (left[k].dim() == n) continue;
        for (std::size_t e = 0; e < n; ++e) {
            CVector w = CVector::basis(n, e);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto &c : left)
                    if (c.dim() == n) w -= inner(c, w) * c;
            if (w.norm() > 0.5) {
                left[k] = w.normalized();
                break;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) out.u.set_column(k, left[k]);
    return out;
}

struct TakagiFactorization {
    CMatrix u;             // unitary
    std::vector<double> d; // descending, non-negative
};

/// Autonne-Takagi factorization s = u diag(d) u^T of a complex symmetric matrix.
///
/// Eigenvectors of s s^* with eigenvalue d^2 span subspaces invariant under the
/// antiunitary involution v -> s conj(v) / d. Fixed vectors of that map are
/// extracted one at a time inside each degenerate block; each satisfies
/// s conj(u) = d u, which is the column condition for the factorization.
inline TakagiFactorization takagi(const CMatrix &s) {
    if (!s.is_square()) throw error(errc::dimension_mismatch, "takagi needs a square matrix");
    if (max_abs_diff(s, s.transpose()) > 1e-10) throw error(errc::not_symmetric, "||s - s^T||_max exceeds 1e-10");
    const std::size_t n = s.rows();
    const EigenSystem es = hermitian_eig(s * s.adjoint());

    double top = 0;
    for (double x : es.values) top = std::max(top, x);
    const double block_tol = 1e-9 * std::max(top, 1e-300);
    const double zero_tol = 1e-24 * std::max(top, 1e-300) + 1e-300;

    TakagiFactorization out{CMatrix(n, n), std::vector<double>(n, 0.0)};
    std::vector<CVector> fixed;
    fixed.reserve(n);

    auto orthogonalize = [&](CVector v, std::size_t from) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = from; k < fixed.size(); ++k) v -= inner(fixed[k], v) * fixed[k];
        return v;
    };

    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && std::abs(es.values[end] - es.values[start]) <= block_tol) ++end;
        const std::size_t block_begin = fixed.size();
        const bool null_block = es.values[start] <= zero_tol;
        double mean = 0;
        for (std::size_t k = start; k < end; ++k) mean += std::max(es.values[k], 0.0);
        const double dval = std::sqrt(mean / static_cast<double>(end - start));

        for (std::size_t k = start; k < end; ++k) {
            // Any vector of the block works as a seed once earlier fixed vectors are projected out.
            CVector v;
            for (std::size_t probe = start; probe < end; ++probe) {
                v = orthogonalize(es.vectors[probe], block_begin);
                if (v.norm() > 1e-6) break;
            }
            v = v.normalized();
            if (null_block) {
                fixed.push_back(v);
                continue;
            }
            auto flip = [&](const CVector &x) {
                CVector y = s * x.conj();
                return (1.0 / dval) * y;
            };
            CVector u = v + flip(v);
            if (u.norm() < 0.5) {
                const CVector iv = complex(0, 1) * v;
                u = iv + flip(iv);
            }
            u = orthogonalize(u, block_begin).normalized();
            fixed.push_back(u);
        }
        start = end;
    }

    for (std::size_t k = 0; k < n; ++k) {
        const CVector su = s * fixed[k].conj();
        double dk = inner(fixed[k], su).real();
        if (dk < 0) dk = 0;
        out.d[k] = dk;
        out.u.set_column(k, fixed[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tensor structure

inline std::size_t dims_product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

namespace detail {

inline std::vector<std::size_t> strides(std::span<const std::size_t> dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
    return s;
}

}  // namespace detail

/// Trace out every subsystem not listed in `keep`. Kept factors retain their original order.
inline CMatrix partial_trace(const CMatrix &m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
    const std::size_t total = dims_product(dims);
    if (!m.is_square() || m.rows() != total) throw error(errc::dimension_mismatch, "dims product != matrix dimension");
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw error(errc::dimension_mismatch, "keep index out of range");
        kept[k] = true;
    }
    std::vector<std::size_t> kdims, tdims;
    std::vector<std::size_t> kpos, tpos;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        (kept[k] ? kdims : tdims).push_back(dims[k]);
        (kept[k] ? kpos : tpos).push_back(k);
    }
    const auto st = detail::strides(dims);
    const std::size_t kd = dims_product(kdims), td = dims_product(tdims);

    // Global offset of every kept index and every traced index.
    auto offsets = [&](const std::vector<std::size_t> &sub, const std::vector<std::size_t> &pos, std::size_t count) {
        std::vector<std::size_t> off(count, 0);
        const auto sst = detail::strides(sub);
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::size_t rem = idx, o = 0;
            for (std::size_t f = 0; f < sub.size(); ++f) {
                o += (rem / sst[f]) * st[pos[f]];
                rem %= sst[f];
            }
            off[idx] = o;
        }
        return off;
    };
    const auto koff = offsets(kdims, kpos, kd);
    const auto toff = offsets(tdims, tpos, td);

    CMatrix r(kd, kd);
    for (std::size_t i = 0; i < kd; ++i)
        for (std::size_t j = 0; j < kd; ++j) {
            complex acc = 0;
            for (std::size_t t = 0; t < td; ++t) acc += m(koff[i] + toff[t], koff[j] + toff[t]);
            r(i, j) = acc;
        }
    return r;
}

enum class Side { A, B };

inline CMatrix partial_transpose(const CMatrix &m, std::size_t dim_a, std::size_t dim_b, Side side) {
    if (!m.is_square() || m.rows() != dim_a * dim_b) throw error(errc::dimension_mismatch, "d_A * d_B != matrix dimension");
    CMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t k = 0; k < dim_b; ++k)
            for (std::size_t j = 0; j < dim_a; ++j)
                for (std::size_t l = 0; l < dim_b; ++l) {
                    const complex x = m(i * dim_b + k, j * dim_b + l);
                    if (side == Side::A)
                        r(j * dim_b + k, i * dim_b + l) = x;
                    else
                        r(i * dim_b + l, j * dim_b + k) = x;
                }
    return r;
}

/// Unitary P with P (x_0 ⊗ ... ⊗ x_{n-1}) = x_{perm[0]} ⊗ ... ⊗ x_{perm[n-1]}.
inline CMatrix permutation_matrix(std::span<const std::size_t> dims, std::span<const std::size_t> perm) {
    if (perm.size() != dims.size()) throw error(errc::dimension_mismatch, "permutation length");
    std::vector<bool> seen(dims.size(), false);
    for (std::size_t p : perm) {
        if (p >= dims.size() || seen[p]) throw error(errc::dimension_mismatch, "not a permutation");
        seen[p] = true;
    }
    const std::size_t total = dims_product(dims);
    std::vector<std::size_t> new_dims(dims.size());
    for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = dims[perm[k]];
    const auto old_st = detail::strides(dims);
    const auto new_st = detail::strides(new_dims);
    CMatrix p(total, total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t target = 0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            const std::size_t digit = (idx / old_st[perm[k]]) % dims[perm[k]];
            target += digit * new_st[k];
        }
        p(target, idx) = 1.0;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Random sampling and unitary coordinates

/// SplitMix64 finalizer; derives independent stream seeds from (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline CMatrix ginibre(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix g(rows, cols);
    for (auto &x : g.entries()) {
        const double re = normal(rng);
        const double im = normal(rng);
        x = {re, im};
    }
    return g;
}

inline CMatrix haar_unitary(std::size_t dim, Rng &rng) {
    // Gram-Schmidt on a Ginibre matrix; R ends up with a positive diagonal, which makes Q Haar distributed.
    CMatrix g = ginibre(dim, dim, rng);
    std::vector<CVector> cols;
    cols.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        CVector v = g.column(j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &c : cols) v -= inner(c, v) * c;
        cols.push_back(v.normalized());
    }
    return CMatrix::from_columns(cols);
}

inline CMatrix haar_unitary(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    return haar_unitary(dim, rng);
}

inline CVector random_unit_vector(std::size_t dim, Rng &rng) { return ginibre(dim, 1, rng).column(0).normalized(); }

/// Number of real coordinates used by `parameterized_unitary` for U(dim).
constexpr std::size_t unitary_parameter_count(std::size_t dim) { return dim * dim; }

/// Coordinates on U(dim): one Givens rotation (angle, phase) for every index pair
/// followed by a diagonal phase layer. Layout of `theta`:
///   [angle_01, phase_01, angle_02, phase_02, ..., angle_{n-2,n-1}, phase_{n-2,n-1}, diag_0, ..., diag_{n-1}]
/// All zeros is the identity. For dim = 2, theta[0] is the rotation angle with |<0|u|0>| = |cos(theta[0]/2)|.
inline CMatrix parameterized_unitary(std::span<const double> theta, std::size_t dim) {
    if (theta.size() != unitary_parameter_count(dim))
        throw error(errc::bad_parameter_count,
                    "expected " + std::to_string(unitary_parameter_count(dim)) + " parameters, got " + std::to_string(theta.size()));
    CMatrix u = CMatrix::identity(dim);
    std::size_t k = 0;
    for (std::size_t p = 0; p < dim; ++p) {
        for (std::size_t q = p + 1; q < dim; ++q) {
            const double half = 0.5 * theta[k++];
            const complex ph = std::polar(1.0, theta[k++]);
            const double c = std::cos(half), s = std::sin(half);
            // u <- G u, G acts on rows p and q.
            for (std::size_t col = 0; col < dim; ++col) {
                const complex up = u(p, col), uq = u(q, col);
                u(p, col) = c * up - ph * s * uq;
                u(q, col) = std::conj(ph) * s * up + c * uq;
            }
        }
    }
    for (std::size_t p = 0; p < dim; ++p) {
        const complex ph = std::polar(1.0, theta[k++]);
        for (std::size_t col = 0; col < dim; ++col) u(p, col) *= ph;
    }
    return u;
}

}  // namespace qsslab

#endif  // QSSLAB_LINALG_HPP
