#pragma once

// Joint-weak-value estimators built from second-order correlations of two
// local pointers, and the ensemble-size bookkeeping that classifies
// measurement schemes as efficient or inefficient.
//
// Ensemble protocol (the acceptance band is a factor of two; the exact
// recipe is a declared convention):
//   delta_star = smallest width on a logarithmic grid (32 points per decade,
//     [1e-1, 1e8]) where the scheme's readout statistic deviates from its own
//     large-width limit by at most relative_bias of that limit;
//   n = ceil((sigma / (relative_uncertainty * |reference|))^2) with sigma the
//     single-shot standard deviation of that statistic at delta_star and
//     reference the weak value being estimated.
// For the plain schemes the statistic's limit *is* the weak value; for the
// correlator-based product schemes the statistic is the Q_A Q_B sample, whose
// own scale (not the tiny product weak value) governs where the bias
// stabilizes.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsvflab/coupling.hpp"
#include "tsvflab/errors.hpp"
#include "tsvflab/pointer.hpp"
#include "tsvflab/tsvf.hpp"

namespace tsvflab {

struct CorrelatorSet {
    cx qq, pp, qp, pq;      // <Q_A Q_B>, <P_A P_B>, <Q_A P_B>, <P_A Q_B>
    cx qa, qb, pa, pb;      // first moments
    double width = 1.0;     // the Delta of the single-convention pointer
};

inline CorrelatorSet correlators(const GaussianMixture& mix) {
    if (mix.dim() != 2) throw DimensionMismatch("correlators need a 2-coordinate mixture");
    CorrelatorSet c;
    c.width = mix.width(0);
    c.qq = analytic_moment(mix, MomentSpec::Q(0) * MomentSpec::Q(1));
    c.pp = analytic_moment(mix, MomentSpec::P(0) * MomentSpec::P(1));
    c.qp = analytic_moment(mix, MomentSpec::Q(0) * MomentSpec::P(1));
    c.pq = analytic_moment(mix, MomentSpec::P(0) * MomentSpec::Q(1));
    c.qa = analytic_moment(mix, MomentSpec::Q(0));
    c.qb = analytic_moment(mix, MomentSpec::Q(1));
    c.pa = analytic_moment(mix, MomentSpec::P(0));
    c.pb = analytic_moment(mix, MomentSpec::P(1));
    return c;
}

// Re(AB)_w = 2<Q_A Q_B> - Re(A_w* B_w),  Im(AB)_w = 4 D^2 <Q_A P_B> - Im(A_w* B_w).
inline cx resch_steinberg(const CorrelatorSet& c, cx a_w, cx b_w) {
    const cx cross = std::conj(a_w) * b_w;
    const double d2 = c.width * c.width;
    return cx(2.0 * c.qq.real() - cross.real(), 4.0 * d2 * c.qp.real() - cross.imag());
}

// Re(AB)_w = <Q_A Q_B> - 4 D^4 <P_A P_B>,  Im(AB)_w = 2 D^2 (<Q_A P_B> - <P_A Q_B>).
inline cx lundeen(const CorrelatorSet& c) {
    const double d2 = c.width * c.width;
    return cx(c.qq.real() - 4.0 * d2 * d2 * c.pp.real(),
              2.0 * d2 * (c.qp.real() - c.pq.real()));
}

// <(Q_A - 2 D^2 P_A)(Q_B + 2 D^2 P_B)>, the single readable combination;
// converges to Re(AB)_w + Im(AB)_w.
inline double combined_quadrature_readout(const CorrelatorSet& c) {
    const double d2 = c.width * c.width;
    return c.qq.real() + 2.0 * d2 * (c.qp.real() - c.pq.real()) -
           4.0 * d2 * d2 * c.pp.real();
}

// Single-pointer coupling to the composite product observable. No physical
// Hamiltonian implements it; it serves as the efficiency reference only.
inline GaussianMixture hypothetical_direct_product(const TwoStateVector& tsv,
                                                   const HermitianOperator& a,
                                                   const HermitianOperator& b, double width) {
    detail::require_commuting(a, b);
    CouplingSpec spec{Scheme::local_single, product(a, b), std::nullopt, width,
                      WidthConvention::single};
    return weak_couple_and_postselect(tsv, spec);
}

struct PrecisionTarget {
    double relative_bias = 0.01;
    double relative_uncertainty = 0.10;
};

enum class MeasurementScheme {
    local_single,
    entangled_sum,
    local_pair,
    joint_product_resch,
    joint_product_lundeen,
    direct_product,
};

struct EnsembleResult {
    double n = 0.0;
    double delta_star = 0.0;
    std::string statistic;
    double bias_at_star = 0.0;   // relative to the statistic's own limit
    double sigma_at_star = 0.0;  // single-shot standard deviation
    double reference = 0.0;      // Re of the weak value being estimated
};

namespace detail {

struct StatisticPoint {
    double mean = 0.0;
    double variance = 0.0;
};

inline double real_variance(double second_moment, double mean) {
    return std::max(0.0, second_moment - mean * mean);
}

inline StatisticPoint scalar_pointer_statistic(const GaussianMixture& mix) {
    const double mean = analytic_moment(mix, MomentSpec::Q(0)).real();
    const double q2 = analytic_moment(mix, MomentSpec::Q(0, 2)).real();
    return {mean, real_variance(q2, mean)};
}

}  // namespace detail

inline EnsembleResult required_ensemble_size(MeasurementScheme scheme, const TwoStateVector& tsv,
                                             const HermitianOperator& a,
                                             const std::optional<HermitianOperator>& b,
                                             const PrecisionTarget& target = {}) {
    if (!(target.relative_bias > 0.0 && target.relative_bias < 1.0) ||
        !(target.relative_uncertainty > 0.0 && target.relative_uncertainty < 1.0))
        throw Error("precision targets must lie in (0, 1)");

    const bool needs_b = scheme != MeasurementScheme::local_single;
    if (needs_b && !b.has_value()) throw Error("scheme needs two observables");

    // Large-width limit of the statistic, the reference weak value, and the
    // per-width statistic evaluation.
    double limit = 0.0, reference = 0.0;
    std::string statistic;
    switch (scheme) {
        case MeasurementScheme::local_single:
            limit = reference = weak_value(tsv, a).real();
            statistic = "Q";
            break;
        case MeasurementScheme::entangled_sum:
        case MeasurementScheme::local_pair:
            limit = reference = (weak_value(tsv, a) + weak_value(tsv, *b)).real();
            statistic = scheme == MeasurementScheme::entangled_sum ? "Q_plus" : "Q_A + Q_B";
            break;
        case MeasurementScheme::direct_product:
            limit = reference = weak_value(tsv, product(a, *b)).real();
            statistic = "Q (direct product pointer)";
            break;
        case MeasurementScheme::joint_product_resch: {
            const cx cross = std::conj(weak_value(tsv, a)) * weak_value(tsv, *b);
            reference = weak_value(tsv, product(a, *b)).real();
            limit = 0.5 * (reference + cross.real());
            statistic = "Q_A * Q_B";
            break;
        }
        case MeasurementScheme::joint_product_lundeen:
            limit = reference = weak_value(tsv, product(a, *b)).real();
            statistic = "Q_A*Q_B - 4 D^4 P_A*P_B (split sub-ensembles)";
            break;
    }
    if (std::abs(reference) <= 1e-12 || std::abs(limit) <= 1e-12)
        throw Error("reference weak value vanishes; relative precision target is undefined");

    auto evaluate = [&](double width) -> detail::StatisticPoint {
        switch (scheme) {
            case MeasurementScheme::local_single:
                return detail::scalar_pointer_statistic(weak_couple_and_postselect(
                    tsv, CouplingSpec{Scheme::local_single, a, std::nullopt, width}));
            case MeasurementScheme::entangled_sum:
                return detail::scalar_pointer_statistic(weak_couple_and_postselect(
                    tsv, CouplingSpec{Scheme::entangled_sum, a, b, width}));
            case MeasurementScheme::direct_product:
                return detail::scalar_pointer_statistic(
                    hypothetical_direct_product(tsv, a, *b, width));
            case MeasurementScheme::local_pair: {
                const GaussianMixture mix = weak_couple_and_postselect(
                    tsv,
                    CouplingSpec{Scheme::local_pair, a, b, width, WidthConvention::split});
                const double qa = analytic_moment(mix, MomentSpec::Q(0)).real();
                const double qb = analytic_moment(mix, MomentSpec::Q(1)).real();
                const double q2a = analytic_moment(mix, MomentSpec::Q(0, 2)).real();
                const double q2b = analytic_moment(mix, MomentSpec::Q(1, 2)).real();
                const double qab = analytic_moment(mix, MomentSpec::Q(0) * MomentSpec::Q(1)).real();
                const double mean = qa + qb;
                return {mean, detail::real_variance(q2a + 2.0 * qab + q2b, mean)};
            }
            case MeasurementScheme::joint_product_resch:
            case MeasurementScheme::joint_product_lundeen: {
                const GaussianMixture mix = weak_couple_and_postselect(
                    tsv,
                    CouplingSpec{Scheme::local_pair, a, b, width, WidthConvention::single});
                const double qq = analytic_moment(mix, MomentSpec::Q(0) * MomentSpec::Q(1)).real();
                const double q2q2 =
                    analytic_moment(mix, MomentSpec::Q(0, 2) * MomentSpec::Q(1, 2)).real();
                const double var_qq = detail::real_variance(q2q2, qq);
                if (scheme == MeasurementScheme::joint_product_resch) return {qq, var_qq};
                const double pp = analytic_moment(mix, MomentSpec::P(0) * MomentSpec::P(1)).real();
                const double p2p2 =
                    analytic_moment(mix, MomentSpec::P(0, 2) * MomentSpec::P(1, 2)).real();
                const double var_pp = detail::real_variance(p2p2, pp);
                const double d4 = 4.0 * width * width * width * width;
                return {qq - d4 * pp, var_qq + d4 * d4 * var_pp};
            }
        }
        throw Error("unhandled measurement scheme");
    };

    double best_bias = std::numeric_limits<double>::infinity();
    double best_width = 0.0;
    const int points_per_decade = 32;
    const int decades = 9;  // 1e-1 .. 1e8
    for (int k = 0; k <= points_per_decade * decades; ++k) {
        const double width =
            std::pow(10.0, -1.0 + static_cast<double>(k) / points_per_decade);
        const detail::StatisticPoint pt = evaluate(width);
        const double rel_bias = std::abs(pt.mean - limit) / std::abs(limit);
        if (rel_bias < best_bias) {
            best_bias = rel_bias;
            best_width = width;
        }
        if (rel_bias <= target.relative_bias) {
            const double sigma = std::sqrt(pt.variance);
            const double n =
                std::ceil(std::pow(sigma / (target.relative_uncertainty * std::abs(reference)), 2));
            return {std::max(1.0, n), width, statistic, rel_bias, sigma, reference};
        }
    }
    throw BiasUnreachable("no width on the grid meets the bias target", best_bias, best_width);
}

}  // namespace tsvflab
