#pragma once

// Two-state-vector quantities: weak values, weak variance, intermediate
// strong-measurement probabilities for pre- and post-selected systems, and
// sequential weak values.

#include <cmath>
#include <map>
#include <utility>

#include "tsvflab/hilbert.hpp"

namespace tsvflab {

inline constexpr double kOverlapTolerance = 1e-14;          // relative to |pre||post|
inline constexpr double kSelectionDenominatorFloor = 1e-28;  // on normalized states

// Pre-selected ket and post-selected bra. The bra is stored as a ket and
// conjugated on use. Overlap is checked at call time, not construction:
// nearly-orthogonal selections are the interesting regime and must pass.
struct TwoStateVector {
    StateVector pre;
    StateVector post;

    TwoStateVector(StateVector pre_, StateVector post_)
        : pre(std::move(pre_)), post(std::move(post_)) {
        if (pre.dims() != post.dims())
            throw DimensionMismatch("pre and post selections live on different systems");
    }
};

namespace detail {

inline cx checked_overlap(const TwoStateVector& tsv) {
    const cx ov = inner(tsv.post, tsv.pre);
    const double scale = tsv.pre.norm() * tsv.post.norm();
    if (scale <= 1e-300) throw NormVanishes("zero pre or post selection state");
    if (std::abs(ov) <= kOverlapTolerance * scale)
        throw OverlapVanishes("pre and post selections are orthogonal", std::abs(ov) / scale);
    return ov;
}

}  // namespace detail

// <Phi|A|Psi> / <Phi|Psi>. Invariant under independent rescaling of pre and
// post by nonzero complex factors.
inline cx weak_value(const TwoStateVector& tsv, const HermitianOperator& a) {
    const cx overlap = detail::checked_overlap(tsv);
    return inner(tsv.post, a.apply(tsv.pre)) / overlap;
}

// (A^2)_w - (A_w)^2, kept as the complex un-rooted quantity.
inline cx weak_variance(const TwoStateVector& tsv, const HermitianOperator& a) {
    const cx overlap = detail::checked_overlap(tsv);
    const StateVector a_pre = a.apply(tsv.pre);
    const cx aw = inner(tsv.post, a_pre) / overlap;
    const cx a2w = inner(tsv.post, a.apply(a_pre)) / overlap;
    return a2w - aw * aw;
}

// [(A^2)_w - (A_w)^2] / (4 Delta^2): the leading correction that decides how
// weak a coupling of width Delta really is.
inline cx weakness_metric(const TwoStateVector& tsv, const HermitianOperator& a, double width) {
    if (width <= 0.0) throw Error("pointer width must be positive");
    return weak_variance(tsv, a) / (4.0 * width * width);
}

// Outcome probabilities of an intermediate ideal measurement of C:
// Prob(c_n) = |<Phi|P_n|Psi>|^2 / sum_j |<Phi|P_j|Psi>|^2 over merged
// eigenspaces. Normalizes pre/post internally.
inline std::map<double, double> abl_probabilities(const TwoStateVector& tsv,
                                                  const HermitianOperator& c) {
    const StateVector pre = tsv.pre.normalized();
    const StateVector post = tsv.post.normalized();
    const Eigensystem& sys = c.eigensystem();

    std::map<double, double> weights;
    double denom = 0.0;
    for (const Eigenspace& sp : sys.spaces) {
        const StateVector projected = detail::apply_matrix(sp.projector, pre);
        const double w = std::norm(inner(post, projected));
        weights[sp.eigenvalue] = w;
        denom += w;
    }
    if (denom <= kSelectionDenominatorFloor)
        throw PostSelectionImpossible(
            "post selection unreachable through every outcome of the measured observable");
    for (auto& [value, w] : weights) w /= denom;
    return weights;
}

// Expectation value read off the measuring device of that intermediate
// measurement: sum of eigenvalue times outcome probability.
inline double pp_expectation(const TwoStateVector& tsv, const HermitianOperator& c) {
    double e = 0.0;
    for (const auto& [value, prob] : abl_probabilities(tsv, c)) e += value * prob;
    return e;
}

// Weak value of a time-ordered product B.V.A with unitary evolution V between
// the couplings: <Phi|B V A|Psi> / <Phi|V|Psi>. With V = I this reduces to
// the plain product weak value (BA)_w.
inline cx sequential_weak_value(const TwoStateVector& tsv, const HermitianOperator& a,
                                const HermitianOperator& b, const UnitaryOperator& v) {
    const cx denom = inner(tsv.post, v.apply(tsv.pre));
    const double scale = tsv.pre.norm() * tsv.post.norm();
    if (scale <= 1e-300) throw NormVanishes("zero pre or post selection state");
    if (std::abs(denom) <= kOverlapTolerance * scale)
        throw OverlapVanishes("evolved pre and post selections are orthogonal",
                              std::abs(denom) / scale);
    return inner(tsv.post, b.apply(v.apply(a.apply(tsv.pre)))) / denom;
}

}  // namespace tsvflab
