#pragma once

// Finite-dimensional complex linear algebra for small composite spin systems:
// states and Hermitian/unitary operators over a labeled product basis, tensor
// products, and eigendecomposition into (eigenvalue, projector) pairs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsvflab/errors.hpp"

namespace tsvflab {

using cx = std::complex<double>;

inline constexpr std::size_t kMaxTotalDimension = 4096;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kDegeneracyMergeTolerance = 1e-10;

namespace detail {

// Row-major dense complex square matrix. Internal workhorse; the public
// surface exposes it only through HermitianOperator/UnitaryOperator.
struct CMat {
    std::size_t n = 0;
    std::vector<cx> a;

    CMat() = default;
    explicit CMat(std::size_t n_) : n(n_), a(n_ * n_, cx(0.0, 0.0)) {}

    cx& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static CMat identity(std::size_t n) {
        CMat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline CMat mul(const CMat& x, const CMat& y) {
    CMat r(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k) {
            const cx xv = x(i, k);
            if (xv == cx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < x.n; ++j) r(i, j) += xv * y(k, j);
        }
    return r;
}

inline CMat adjoint(const CMat& x) {
    CMat r(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.n; ++j) r(j, i) = std::conj(x(i, j));
    return r;
}

inline CMat kron(const CMat& x, const CMat& y) {
    CMat r(x.n * y.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.n; ++j) {
            const cx xv = x(i, j);
            if (xv == cx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < y.n; ++k)
                for (std::size_t l = 0; l < y.n; ++l)
                    r(i * y.n + k, j * y.n + l) = xv * y(k, l);
        }
    return r;
}

inline double max_abs_diff(const CMat& x, const CMat& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

inline double frobenius(const CMat& x) {
    double s = 0.0;
    for (const cx& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

}  // namespace detail

inline std::size_t total_dimension(const std::vector<int>& dims) {
    std::size_t t = 1;
    for (int d : dims) {
        if (d < 1) throw DimensionMismatch("particle dimension must be positive");
        t *= static_cast<std::size_t>(d);
        if (t > kMaxTotalDimension)
            throw DimensionOverflow("total dimension exceeds cap of " +
                                    std::to_string(kMaxTotalDimension));
    }
    return t;
}

// Flat index of a product-basis label, particle-major (first particle is the
// most significant digit). Label order is fixed at construction.
inline std::size_t flat_index(const std::vector<int>& dims, const std::vector<int>& labels) {
    if (labels.size() != dims.size())
        throw DimensionMismatch("label count does not match particle count");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (labels[k] < 0 || labels[k] >= dims[k])
            throw DimensionMismatch("basis label out of range for particle " + std::to_string(k));
        idx = idx * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(labels[k]);
    }
    return idx;
}

inline std::vector<int> unflatten_index(const std::vector<int>& dims, std::size_t idx) {
    std::vector<int> labels(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        labels[k] = static_cast<int>(idx % static_cast<std::size_t>(dims[k]));
        idx /= static_cast<std::size_t>(dims[k]);
    }
    return labels;
}

// Complex amplitude vector over a product basis. Unnormalized states are
// first-class; anything probabilistic normalizes internally.
class StateVector {
public:
    StateVector(std::vector<int> dims, std::vector<cx> amplitudes)
        : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
        const std::size_t n = total_dimension(dims_);
        if (amps_.size() != n)
            throw DimensionMismatch("amplitude count " + std::to_string(amps_.size()) +
                                    " does not match total dimension " + std::to_string(n));
        for (const cx& a : amps_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw Error("non-finite amplitude");
    }

    static StateVector basis_state(std::vector<int> dims, const std::vector<int>& labels) {
        std::vector<cx> amps(total_dimension(dims), cx(0.0, 0.0));
        amps[flat_index(dims, labels)] = 1.0;
        return StateVector(std::move(dims), std::move(amps));
    }

    const std::vector<int>& dims() const { return dims_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<cx>& amplitudes() const { return amps_; }
    const cx& operator[](std::size_t i) const { return amps_[i]; }

    cx amplitude(const std::vector<int>& labels) const {
        return amps_[flat_index(dims_, labels)];
    }

    double norm() const {
        double s = 0.0;
        for (const cx& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    StateVector normalized() const {
        const double n = norm();
        if (n <= 1e-300) throw NormVanishes("cannot normalize zero state");
        return scaled(1.0 / n);
    }

    StateVector scaled(cx factor) const {
        std::vector<cx> amps(amps_);
        for (cx& a : amps) a *= factor;
        return StateVector(dims_, std::move(amps));
    }

private:
    std::vector<int> dims_;
    std::vector<cx> amps_;
};

inline StateVector operator+(const StateVector& x, const StateVector& y) {
    if (x.dims() != y.dims()) throw DimensionMismatch("state dimensions differ");
    std::vector<cx> amps(x.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = x[i] + y[i];
    return StateVector(x.dims(), std::move(amps));
}

inline StateVector operator-(const StateVector& x, const StateVector& y) {
    return x + y.scaled(-1.0);
}

inline StateVector operator*(cx factor, const StateVector& s) { return s.scaled(factor); }

// Conjugate-linear in the first argument.
inline cx inner(const StateVector& bra, const StateVector& ket) {
    if (bra.dims() != ket.dims())
        throw DimensionMismatch("inner product of states with different dimensions");
    cx s(0.0, 0.0);
    for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
    return s;
}

inline StateVector tensor(const StateVector& x, const StateVector& y) {
    std::vector<int> dims(x.dims());
    dims.insert(dims.end(), y.dims().begin(), y.dims().end());
    total_dimension(dims);
    std::vector<cx> amps(x.size() * y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) amps[i * y.size() + j] = x[i] * y[j];
    return StateVector(std::move(dims), std::move(amps));
}

// Reorders tensor factors: new_order[k] is the old particle slot that ends up
// at new slot k.
inline StateVector permute_particles(const StateVector& s, const std::vector<int>& new_order) {
    const std::vector<int>& dims = s.dims();
    if (new_order.size() != dims.size())
        throw DimensionMismatch("permutation length does not match particle count");
    std::vector<int> new_dims(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k)
        new_dims[k] = dims[static_cast<std::size_t>(new_order[k])];
    std::vector<cx> amps(s.size());
    std::vector<int> new_labels(dims.size());
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
        const std::vector<int> old_labels = unflatten_index(dims, idx);
        for (std::size_t k = 0; k < dims.size(); ++k)
            new_labels[k] = old_labels[static_cast<std::size_t>(new_order[k])];
        amps[flat_index(new_dims, new_labels)] = s[idx];
    }
    return StateVector(std::move(new_dims), std::move(amps));
}

struct Eigenspace {
    double eigenvalue = 0.0;
    detail::CMat projector;
    int multiplicity = 0;
};

struct Eigensystem {
    std::vector<Eigenspace> spaces;  // sorted by eigenvalue ascending
};

namespace detail {

// Cyclic Jacobi sweeps for complex Hermitian matrices. Plenty for the
// dimensions this library caps at.
inline void jacobi_hermitian(CMat a, std::vector<double>& eigenvalues, CMat& vectors) {
    const std::size_t n = a.n;
    vectors = CMat::identity(n);
    const double scale = std::max(1.0, frobenius(a));
    const double stop = 1e-14 * scale;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(2.0 * off) <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;

                // Phase fold so the pivot becomes real, then a real rotation.
                const cx u = apq / mag;  // e^{i phi}
                for (std::size_t k = 0; k < n; ++k) a(k, q) *= std::conj(u);
                for (std::size_t k = 0; k < n; ++k) a(q, k) *= u;
                for (std::size_t k = 0; k < n; ++k) vectors(k, q) *= std::conj(u);

                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
                const double c = std::cos(theta);
                const double s = std::sin(theta);

                for (std::size_t k = 0; k < n; ++k) {
                    const cx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cx vkp = vectors(k, p), vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i).real();
}

inline Eigensystem eigensystem_of(const CMat& m) {
    std::vector<double> vals;
    CMat vecs;
    jacobi_hermitian(m, vals, vecs);

    const std::size_t n = m.n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });

    Eigensystem sys;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        // Consecutive eigenvalues closer than the merge tolerance share one
        // degenerate eigenspace.
        while (j < n && vals[order[j]] - vals[order[j - 1]] <= kDegeneracyMergeTolerance) ++j;
        Eigenspace space;
        space.projector = CMat(n);
        double sum = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            const std::size_t col = order[k];
            sum += vals[col];
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c)
                    space.projector(r, c) += vecs(r, col) * std::conj(vecs(c, col));
        }
        space.multiplicity = static_cast<int>(j - i);
        space.eigenvalue = sum / static_cast<double>(space.multiplicity);
        sys.spaces.push_back(std::move(space));
        i = j;
    }
    return sys;
}

inline StateVector apply_matrix(const CMat& m, const StateVector& s) {
    std::vector<cx> out(s.size(), cx(0.0, 0.0));
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) out[i] += m(i, j) * s[j];
    return StateVector(s.dims(), std::move(out));
}

}  // namespace detail

// Hermitian observable on a product basis, with a lazily built cache of
// (eigenvalue, projector) pairs. Immutable after construction; the cache is
// populated once under std::call_once and read-only afterwards.
class HermitianOperator {
public:
    HermitianOperator(std::vector<int> dims, detail::CMat matrix)
        : dims_(std::move(dims)),
          m_(std::move(matrix)),
          cache_(std::make_shared<Cache>()) {
        const std::size_t n = total_dimension(dims_);
        if (m_.n != n) throw DimensionMismatch("matrix size does not match dimensions");
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dev = std::max(dev, std::abs(m_(i, j) - std::conj(m_(j, i))));
        if (dev > kHermitianTolerance)
            throw NotHermitian("matrix deviates from Hermiticity by " + std::to_string(dev));
    }

    HermitianOperator(std::vector<int> dims, const std::vector<std::vector<cx>>& rows)
        : HermitianOperator(std::move(dims), to_mat(rows)) {}

    const std::vector<int>& dims() const { return dims_; }
    std::size_t size() const { return m_.n; }
    const detail::CMat& matrix() const { return m_; }

    StateVector apply(const StateVector& s) const {
        if (s.dims() != dims_) throw DimensionMismatch("operator/state dimensions differ");
        return detail::apply_matrix(m_, s);
    }

    const Eigensystem& eigensystem() const {
        std::call_once(cache_->flag, [this] { cache_->sys = detail::eigensystem_of(m_); });
        return *cache_->sys;
    }

private:
    struct Cache {
        std::once_flag flag;
        std::optional<Eigensystem> sys;
    };

    static detail::CMat to_mat(const std::vector<std::vector<cx>>& rows) {
        detail::CMat m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw DimensionMismatch("matrix is not square");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::vector<int> dims_;
    detail::CMat m_;
    std::shared_ptr<Cache> cache_;
};

class UnitaryOperator {
public:
    UnitaryOperator(std::vector<int> dims, detail::CMat matrix)
        : dims_(std::move(dims)), m_(std::move(matrix)) {
        const std::size_t n = total_dimension(dims_);
        if (m_.n != n) throw DimensionMismatch("matrix size does not match dimensions");
        const double dev =
            detail::max_abs_diff(detail::mul(detail::adjoint(m_), m_), detail::CMat::identity(n));
        if (dev > kUnitaryTolerance)
            throw NotUnitary("matrix deviates from unitarity by " + std::to_string(dev));
    }

    static UnitaryOperator identity(std::vector<int> dims) {
        const std::size_t n = total_dimension(dims);
        return UnitaryOperator(std::move(dims), detail::CMat::identity(n));
    }

    const std::vector<int>& dims() const { return dims_; }
    const detail::CMat& matrix() const { return m_; }

    StateVector apply(const StateVector& s) const {
        if (s.dims() != dims_) throw DimensionMismatch("operator/state dimensions differ");
        return detail::apply_matrix(m_, s);
    }

private:
    std::vector<int> dims_;
    detail::CMat m_;
};

inline HermitianOperator tensor(const HermitianOperator& x, const HermitianOperator& y) {
    std::vector<int> dims(x.dims());
    dims.insert(dims.end(), y.dims().begin(), y.dims().end());
    total_dimension(dims);
    return HermitianOperator(std::move(dims), detail::kron(x.matrix(), y.matrix()));
}

inline UnitaryOperator tensor(const UnitaryOperator& x, const UnitaryOperator& y) {
    std::vector<int> dims(x.dims());
    dims.insert(dims.end(), y.dims().begin(), y.dims().end());
    total_dimension(dims);
    return UnitaryOperator(std::move(dims), detail::kron(x.matrix(), y.matrix()));
}

inline HermitianOperator operator+(const HermitianOperator& x, const HermitianOperator& y) {
    if (x.dims() != y.dims()) throw DimensionMismatch("operator dimensions differ");
    detail::CMat m(x.matrix());
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += y.matrix().a[i];
    return HermitianOperator(x.dims(), std::move(m));
}

inline HermitianOperator operator-(const HermitianOperator& x, const HermitianOperator& y) {
    if (x.dims() != y.dims()) throw DimensionMismatch("operator dimensions differ");
    detail::CMat m(x.matrix());
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] -= y.matrix().a[i];
    return HermitianOperator(x.dims(), std::move(m));
}

inline HermitianOperator operator*(double factor, const HermitianOperator& x) {
    detail::CMat m(x.matrix());
    for (cx& v : m.a) v *= factor;
    return HermitianOperator(x.dims(), std::move(m));
}

// Matrix product of two Hermitian operators. Only valid as a Hermitian
// observable when the factors commute (e.g. observables on disjoint
// particles); the constructor rejects anything else.
inline HermitianOperator product(const HermitianOperator& x, const HermitianOperator& y) {
    if (x.dims() != y.dims()) throw DimensionMismatch("operator dimensions differ");
    return HermitianOperator(x.dims(), detail::mul(x.matrix(), y.matrix()));
}

inline HermitianOperator squared(const HermitianOperator& x) { return product(x, x); }

// exp(i H) through the spectral decomposition.
inline UnitaryOperator exp_i(const HermitianOperator& h) {
    const Eigensystem& sys = h.eigensystem();
    detail::CMat m(h.size());
    for (const Eigenspace& sp : sys.spaces) {
        const cx phase = std::exp(cx(0.0, sp.eigenvalue));
        for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += phase * sp.projector.a[i];
    }
    return UnitaryOperator(h.dims(), std::move(m));
}

enum class SpinKind { pauli, spin1 };
enum class Axis { x, y, z };

inline HermitianOperator identity_op(std::vector<int> dims) {
    const std::size_t n = total_dimension(dims);
    return HermitianOperator(std::move(dims), detail::CMat::identity(n));
}

inline HermitianOperator pauli_x() {
    detail::CMat m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return HermitianOperator({2}, std::move(m));
}

inline HermitianOperator pauli_y() {
    detail::CMat m(2);
    m(0, 1) = cx(0.0, -1.0);
    m(1, 0) = cx(0.0, 1.0);
    return HermitianOperator({2}, std::move(m));
}

inline HermitianOperator pauli_z() {
    detail::CMat m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return HermitianOperator({2}, std::move(m));
}

// Spin-1 z component, diag(+1, 0, -1); basis slot 0 is m=+1, slot 2 is m=-1.
inline HermitianOperator spin1_z() {
    detail::CMat m(3);
    m(0, 0) = 1.0;
    m(2, 2) = -1.0;
    return HermitianOperator({3}, std::move(m));
}

inline int spin1_index(int m) {
    if (m < -1 || m > 1) throw DimensionMismatch("spin-1 level must be -1, 0 or +1");
    return 1 - m;
}

inline HermitianOperator spin_operator(SpinKind kind, Axis axis) {
    if (kind == SpinKind::pauli) {
        switch (axis) {
            case Axis::x: return pauli_x();
            case Axis::y: return pauli_y();
            case Axis::z: return pauli_z();
        }
    }
    if (kind == SpinKind::spin1 && axis == Axis::z) return spin1_z();
    throw Error("unknown spin operator kind/axis combination");
}

// I x ... x op x ... x I with `op` sitting at `particle` of a system with the
// given per-particle dimensions.
inline HermitianOperator embed(const HermitianOperator& local, std::size_t particle,
                               const std::vector<int>& dims) {
    if (particle >= dims.size()) throw DimensionMismatch("particle index out of range");
    if (local.dims().size() != 1 || local.dims()[0] != dims[particle])
        throw DimensionMismatch("local operator does not fit the target particle");
    detail::CMat m = detail::CMat::identity(1);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k == particle) {
            m = detail::kron(m, local.matrix());
        } else {
            m = detail::kron(m, detail::CMat::identity(static_cast<std::size_t>(dims[k])));
        }
    }
    return HermitianOperator(dims, std::move(m));
}

inline StateVector qubit_up() { return StateVector::basis_state({2}, {0}); }
inline StateVector qubit_down() { return StateVector::basis_state({2}, {1}); }

}  // namespace tsvflab
