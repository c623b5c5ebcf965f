#pragma once

// Measurement interactions joining system and pointer(s). Weak couplings are
// evaluated exactly in the joint eigenbasis of the coupled observables: the
// post-selected device is a Gaussian mixture whose term (a, b) carries
// coefficient <Phi|P_a P_b|Psi> and centers shifted by the eigenvalues, never
// a Taylor expansion. Strong projective measurement and the modular-sum
// entangled-qubit scheme live here too.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "tsvflab/errors.hpp"
#include "tsvflab/hilbert.hpp"
#include "tsvflab/pointer.hpp"
#include "tsvflab/tsvf.hpp"

namespace tsvflab {

enum class Scheme { local_single, local_pair, entangled_sum, comb };

struct CouplingSpec {
    Scheme scheme;
    HermitianOperator observable_a;
    std::optional<HermitianOperator> observable_b;  // required for two-pointer schemes
    double width = 1.0;
    WidthConvention convention = WidthConvention::single;
    int comb_k = 0;
    double comb_xi = 0.0;
    double coupling_strength = 1.0;  // integrated g(t); pointer shifts are g * eigenvalue
};

namespace detail {

struct JointTerm {
    cx coefficient;
    double a = 0.0;
    double b = 0.0;
};

inline void require_commuting(const HermitianOperator& x, const HermitianOperator& y) {
    const CMat xy = mul(x.matrix(), y.matrix());
    const CMat yx = mul(y.matrix(), x.matrix());
    const double scale = std::max(1.0, frobenius(x.matrix()) * frobenius(y.matrix()));
    if (max_abs_diff(xy, yx) > 1e-10 * scale)
        throw Error("two-pointer couplings need commuting observables (disjoint particles)");
}

// Post-selected amplitude per joint eigenspace of commuting (A, B).
inline std::vector<JointTerm> joint_amplitudes(const TwoStateVector& tsv,
                                               const HermitianOperator& a,
                                               const HermitianOperator& b) {
    require_commuting(a, b);
    const StateVector pre = tsv.pre.normalized();
    const StateVector post = tsv.post.normalized();
    std::vector<JointTerm> terms;
    for (const Eigenspace& sa : a.eigensystem().spaces) {
        const StateVector pa = apply_matrix(sa.projector, pre);
        for (const Eigenspace& sb : b.eigensystem().spaces) {
            const CMat joint = mul(sa.projector, sb.projector);
            double tr = 0.0;
            for (std::size_t i = 0; i < joint.n; ++i) tr += joint(i, i).real();
            if (tr < 0.5) continue;  // empty joint eigenspace
            const cx coeff = inner(post, apply_matrix(sb.projector, pa));
            terms.push_back({coeff, sa.eigenvalue, sb.eigenvalue});
        }
    }
    return terms;
}

inline GaussianMixture finish_mixture(int dim, std::array<double, 2> width,
                                      std::vector<GaussianTerm> terms) {
    cx n2(0.0, 0.0);
    for (const GaussianTerm& tk : terms)
        for (const GaussianTerm& tl : terms) {
            double ov = 1.0;
            for (int c = 0; c < dim; ++c)
                ov *= gaussian_overlap(tk.center[static_cast<std::size_t>(c)],
                                       tl.center[static_cast<std::size_t>(c)],
                                       width[static_cast<std::size_t>(c)]);
            n2 += std::conj(tk.coeff) * tl.coeff * ov;
        }
    if (n2.real() <= kMixtureNormFloor)
        throw PostSelectionImpossible("all post-selected pointer coefficients vanish");
    const double f = 1.0 / std::sqrt(n2.real());
    for (GaussianTerm& t : terms) t.coeff *= f;
    return GaussianMixture(dim, width, std::move(terms));
}

}  // namespace detail

// Exact post-selected measuring-device wavefunction for the requested scheme.
inline GaussianMixture weak_couple_and_postselect(const TwoStateVector& tsv,
                                                  const CouplingSpec& spec) {
    if (spec.width <= 0.0) throw Error("pointer width must be positive");
    const double g = spec.coupling_strength;

    if (spec.scheme == Scheme::local_single) {
        if (spec.observable_b.has_value())
            throw Error("local_single takes a single observable");
        if (spec.convention != WidthConvention::single)
            throw Error("local_single uses the single width convention");
        const StateVector pre = tsv.pre.normalized();
        const StateVector post = tsv.post.normalized();
        std::vector<GaussianTerm> terms;
        for (const Eigenspace& sp : spec.observable_a.eigensystem().spaces) {
            const cx coeff = inner(post, detail::apply_matrix(sp.projector, pre));
            terms.push_back({coeff, {g * sp.eigenvalue, 0.0}});
        }
        return detail::finish_mixture(1, {spec.width, spec.width}, std::move(terms));
    }

    if (!spec.observable_b.has_value())
        throw Error("two-pointer schemes need both observables");
    const std::vector<detail::JointTerm> joint =
        detail::joint_amplitudes(tsv, spec.observable_a, *spec.observable_b);

    switch (spec.scheme) {
        case Scheme::local_pair: {
            const double w = spec.convention == WidthConvention::split
                                 ? spec.width / std::sqrt(2.0)
                                 : spec.width;
            std::vector<GaussianTerm> terms;
            for (const detail::JointTerm& t : joint)
                terms.push_back({t.coefficient, {g * t.a, g * t.b}});
            return detail::finish_mixture(2, {w, w}, std::move(terms));
        }
        case Scheme::entangled_sum: {
            // Q+ coordinate of the entangled device in the broad Q- limit;
            // its uncertainty is the full Delta.
            std::vector<GaussianTerm> terms;
            for (const detail::JointTerm& t : joint)
                terms.push_back({t.coefficient, {g * (t.a + t.b), 0.0}});
            return detail::finish_mixture(1, {spec.width, spec.width}, std::move(terms));
        }
        case Scheme::comb: {
            if (spec.comb_k < 0 || spec.comb_k > kMaxCombTerms)
                throw Error("comb term count out of range");
            const double w = spec.width / std::sqrt(2.0);
            std::vector<GaussianTerm> terms;
            for (const detail::JointTerm& t : joint)
                for (int l = 0; l <= spec.comb_k; ++l)
                    terms.push_back(
                        {t.coefficient, {g * t.a - l * spec.comb_xi, g * t.b + l * spec.comb_xi}});
            return detail::finish_mixture(2, {w, w}, std::move(terms));
        }
        default:
            throw Error("unhandled coupling scheme");
    }
}

// <Q> + 2 i Delta^2 <P>; converges to the weak value of the coupled
// observable as the width grows.
inline cx weak_readout(const GaussianMixture& mix, double width) {
    if (mix.dim() != 1) throw DimensionMismatch("weak_readout needs a 1-coordinate mixture");
    const cx q = analytic_moment(mix, MomentSpec::Q(0));
    const cx p = analytic_moment(mix, MomentSpec::P(0));
    return cx(q.real(), 2.0 * width * width * p.real());
}

struct StrongOutcome {
    double eigenvalue = 0.0;
    double probability = 0.0;
    StateVector collapsed_state;
};

// Born-rule outcomes over merged eigenspaces; zero-probability outcomes are
// dropped so every collapsed state is normalizable.
inline std::vector<StrongOutcome> strong_measure(const StateVector& state,
                                                 const HermitianOperator& o) {
    const StateVector s = state.normalized();
    std::vector<StrongOutcome> outcomes;
    for (const Eigenspace& sp : o.eigensystem().spaces) {
        StateVector projected = detail::apply_matrix(sp.projector, s);
        const double p = projected.norm() * projected.norm();
        if (p <= 1e-14) continue;
        outcomes.push_back({sp.eigenvalue, p, projected.scaled(1.0 / std::sqrt(p))});
    }
    return outcomes;
}

// Two spin-1 particles; an instantaneous ideal measurement of Sz_A * Sz_B
// would let Bob flip Alice's later projective statistics from certainty to a
// coin toss. Returns Alice's probability for the (|-1> + |0>)/sqrt(2)
// outcome, averaged over the intermediate results.
inline double causality_scenario(bool bob_flips) {
    const StateVector minus1 = StateVector::basis_state({3}, {spin1_index(-1)});
    const StateVector zero = StateVector::basis_state({3}, {spin1_index(0)});
    const StateVector alice = (minus1 + zero).scaled(1.0 / std::sqrt(2.0));
    const StateVector bob = StateVector::basis_state({3}, {spin1_index(bob_flips ? 1 : 0)});
    const StateVector psi = tensor(alice, bob);

    const HermitianOperator observable = tensor(spin1_z(), spin1_z());

    // |alice><alice| (x) I on particle B
    detail::CMat proj3(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) proj3(i, j) = alice[i] * std::conj(alice[j]);
    const detail::CMat proj = detail::kron(proj3, detail::CMat::identity(3));

    double total = 0.0;
    for (const StrongOutcome& out : strong_measure(psi, observable)) {
        const StateVector projected = detail::apply_matrix(proj, out.collapsed_state);
        total += out.probability * projected.norm() * projected.norm();
    }
    return total;
}

// Controlled flips of the entangled two-qubit device: flip C when A is down,
// flip D when B is down. A permutation in the ABCD product basis.
inline UnitaryOperator modular_flip_unitary() {
    const std::vector<int> dims{2, 2, 2, 2};
    detail::CMat m(16);
    for (std::size_t in = 0; in < 16; ++in) {
        std::vector<int> labels = unflatten_index(dims, in);
        if (labels[0] == 1) labels[2] ^= 1;
        if (labels[1] == 1) labels[3] ^= 1;
        m(flat_index(dims, labels), in) = 1.0;
    }
    return UnitaryOperator(dims, std::move(m));
}

struct ModularSumResult {
    StateVector joint;                     // ABCD, devices C and D last
    std::array<int, 4> parity_class{};    // (sum of z-eigenvalues) mod 4 per AB basis label
};

// Measures (sigma_z^A + sigma_z^B) mod 4 without ever distinguishing inside a
// parity class: the CD pair starts in (|uu> + |dd>)/sqrt(2) and each system
// qubit conditionally flips its local device qubit.
inline ModularSumResult modular_sum_measure(const StateVector& state_ab) {
    if (state_ab.dims() != std::vector<int>{2, 2})
        throw DimensionMismatch("modular-sum device measures a two-qubit state");
    const StateVector ancilla =
        (StateVector::basis_state({2, 2}, {0, 0}) + StateVector::basis_state({2, 2}, {1, 1}))
            .scaled(1.0 / std::sqrt(2.0));
    const StateVector joint_in = tensor(state_ab, ancilla);
    ModularSumResult result{modular_flip_unitary().apply(joint_in), {}};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const int sum = (a == 0 ? 1 : -1) + (b == 0 ? 1 : -1);
            result.parity_class[static_cast<std::size_t>(a * 2 + b)] = ((sum % 4) + 4) % 4;
        }
    return result;
}

// Reduced CD density matrix conditioned on the AB parity class, as a 4x4
// matrix with unit trace. The whole point of the device: this depends only on
// the class, not on the amplitudes within it.
inline detail::CMat ancilla_reduced_given_class(const ModularSumResult& result, int parity_class) {
    const std::vector<int> dims{2, 2, 2, 2};
    detail::CMat rho(4);
    double trace = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if (result.parity_class[static_cast<std::size_t>(a * 2 + b)] != parity_class) continue;
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    for (int c2 = 0; c2 < 2; ++c2)
                        for (int d2 = 0; d2 < 2; ++d2) {
                            const cx v = result.joint.amplitude({a, b, c, d}) *
                                         std::conj(result.joint.amplitude({a, b, c2, d2}));
                            rho(static_cast<std::size_t>(c * 2 + d),
                                static_cast<std::size_t>(c2 * 2 + d2)) += v;
                        }
        }
    for (std::size_t i = 0; i < 4; ++i) trace += rho(i, i).real();
    if (trace <= 1e-28)
        throw PostSelectionImpossible("input state has no weight in the requested parity class");
    for (cx& v : rho.a) v /= trace;
    return rho;
}

}  // namespace tsvflab
