#pragma once

// Measuring-device wavefunctions: finite complex-weighted mixtures of
// equal-width Gaussians in one or two pointer coordinates. Moments of
// Q^m P^n observables come out in closed form from pairwise Gaussian
// overlap integrals; an adaptive quadrature oracle and a grid-based
// inverse-CDF sampler provide independent cross-checks.
//
// Conventions: each term is c_k * prod_c G_w(q_c - mu_c) with the unit-norm
// Gaussian G_w(x) = (2 pi w^2)^(-1/4) exp(-x^2 / (4 w^2)), so a coordinate of
// width w has position uncertainty w. Momentum is P = -i d/dQ (hbar = 1).
// Mixed moments put position factors before momentum factors per coordinate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "tsvflab/errors.hpp"
#include "tsvflab/hilbert.hpp"  // for cx

namespace tsvflab {

inline constexpr double kMixtureNormFloor = 1e-28;
inline constexpr int kMaxMomentDegree = 4;
inline constexpr int kMaxCombTerms = 64;
inline constexpr double kQuadratureTolerance = 1e-10;

namespace detail {

using Poly = std::vector<double>;  // p[k] is the coefficient of x^k

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// Physicists' Hermite polynomial H_n(scale * (x - shift)) as a polynomial
// in x.
inline Poly hermite_shifted(int n, double shift, double scale) {
    // H_n(t) coefficients by recursion.
    std::vector<Poly> h(static_cast<std::size_t>(n) + 1);
    h[0] = {1.0};
    if (n >= 1) h[1] = {0.0, 2.0};
    for (int k = 2; k <= n; ++k) {
        Poly next(static_cast<std::size_t>(k) + 1, 0.0);
        for (std::size_t j = 0; j < h[k - 1].size(); ++j) next[j + 1] += 2.0 * h[k - 1][j];
        for (std::size_t j = 0; j < h[k - 2].size(); ++j) next[j] -= 2.0 * (k - 1) * h[k - 2][j];
        h[static_cast<std::size_t>(k)] = std::move(next);
    }
    // Substitute t = scale*x - scale*shift.
    const Poly lin = {-scale * shift, scale};
    Poly result = {0.0};
    Poly lin_pow = {1.0};
    for (std::size_t k = 0; k < h[static_cast<std::size_t>(n)].size(); ++k) {
        const double coeff = h[static_cast<std::size_t>(n)][k];
        if (coeff != 0.0) {
            if (result.size() < lin_pow.size()) result.resize(lin_pow.size(), 0.0);
            for (std::size_t j = 0; j < lin_pow.size(); ++j) result[j] += coeff * lin_pow[j];
        }
        if (k + 1 < h[static_cast<std::size_t>(n)].size()) lin_pow = poly_mul(lin_pow, lin);
    }
    return result;
}

// E[p(X)] for X ~ Normal(mean, var).
inline double normal_expectation(const Poly& p, double mean, double var) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        // E[X^k] = sum_{j even} C(k,j) mean^(k-j) (j-1)!! var^(j/2)
        double moment = 0.0;
        double binom = 1.0;
        for (std::size_t j = 0; j <= k; ++j) {
            if (j % 2 == 0) {
                double dfact = 1.0;
                for (std::size_t m = j; m > 1; m -= 2) dfact *= static_cast<double>(m - 1);
                moment += binom * std::pow(mean, static_cast<double>(k - j)) * dfact *
                          std::pow(var, static_cast<double>(j) / 2.0);
            }
            binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
        total += p[k] * moment;
    }
    return total;
}

inline double gaussian_overlap(double a, double b, double w) {
    const double d = a - b;
    return std::exp(-d * d / (8.0 * w * w));
}

inline cx i_power(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return cx(1.0, 0.0);
        case 1: return cx(0.0, 1.0);
        case 2: return cx(-1.0, 0.0);
        default: return cx(0.0, -1.0);
    }
}

// <G(.-a) | Q^m P^n | G(.-b)> for unit-norm Gaussians of width w.
inline cx pair_element(int m, int n, double a, double b, double w) {
    const double ov = gaussian_overlap(a, b, w);
    Poly poly = {1.0};
    if (m > 0) {
        poly.assign(static_cast<std::size_t>(m) + 1, 0.0);
        poly.back() = 1.0;
    }
    if (n > 0) poly = poly_mul(poly, hermite_shifted(n, b, 1.0 / (2.0 * w)));
    const double expectation = normal_expectation(poly, 0.5 * (a + b), w * w);
    return i_power(n) * std::pow(2.0 * w, -static_cast<double>(n)) * ov * expectation;
}

inline double gaussian_value(double x, double w) {
    return std::pow(2.0 * std::numbers::pi * w * w, -0.25) * std::exp(-x * x / (4.0 * w * w));
}

}  // namespace detail

struct GaussianTerm {
    cx coeff;
    std::array<double, 2> center{0.0, 0.0};
};

// Powers of position and momentum per coordinate; within each coordinate all
// position factors precede all momentum factors.
struct MomentSpec {
    std::array<int, 2> q{0, 0};
    std::array<int, 2> p{0, 0};

    int degree() const { return q[0] + q[1] + p[0] + p[1]; }

    static MomentSpec Q(int coord, int pow = 1) {
        MomentSpec s;
        s.q[static_cast<std::size_t>(coord)] = pow;
        return s;
    }
    static MomentSpec P(int coord, int pow = 1) {
        MomentSpec s;
        s.p[static_cast<std::size_t>(coord)] = pow;
        return s;
    }
};

inline MomentSpec operator*(const MomentSpec& a, const MomentSpec& b) {
    MomentSpec s;
    for (std::size_t c = 0; c < 2; ++c) {
        s.q[c] = a.q[c] + b.q[c];
        s.p[c] = a.p[c] + b.p[c];
    }
    return s;
}

class GaussianMixture {
public:
    GaussianMixture(int dim, std::array<double, 2> width, std::vector<GaussianTerm> terms)
        : dim_(dim), width_(width), terms_(std::move(terms)) {
        if (dim_ != 1 && dim_ != 2) throw Error("pointer dimension must be 1 or 2");
        if (terms_.empty()) throw Error("mixture needs at least one term");
        for (int c = 0; c < dim_; ++c)
            if (!(width_[static_cast<std::size_t>(c)] > 0.0))
                throw Error("pointer width must be positive");
        if (norm_squared() <= kMixtureNormFloor)
            throw NormVanishes("mixture has vanishing norm");
    }

    static GaussianMixture one_dim(double width, std::vector<std::pair<cx, double>> terms) {
        std::vector<GaussianTerm> ts;
        ts.reserve(terms.size());
        for (const auto& [coeff, center] : terms) ts.push_back({coeff, {center, 0.0}});
        return GaussianMixture(1, {width, width}, std::move(ts));
    }

    int dim() const { return dim_; }
    double width(int coord = 0) const { return width_[static_cast<std::size_t>(coord)]; }
    const std::vector<GaussianTerm>& terms() const { return terms_; }

    double norm_squared() const {
        cx s(0.0, 0.0);
        for (const GaussianTerm& tk : terms_)
            for (const GaussianTerm& tl : terms_) {
                double ov = 1.0;
                for (int c = 0; c < dim_; ++c)
                    ov *= detail::gaussian_overlap(tk.center[static_cast<std::size_t>(c)],
                                                   tl.center[static_cast<std::size_t>(c)],
                                                   width_[static_cast<std::size_t>(c)]);
                s += std::conj(tk.coeff) * tl.coeff * ov;
            }
        return s.real();
    }

    GaussianMixture normalized() const {
        const double n2 = norm_squared();
        if (n2 <= kMixtureNormFloor) throw NormVanishes("mixture has vanishing norm");
        std::vector<GaussianTerm> ts(terms_);
        const double f = 1.0 / std::sqrt(n2);
        for (GaussianTerm& t : ts) t.coeff *= f;
        return GaussianMixture(dim_, width_, std::move(ts));
    }

    GaussianMixture translated(std::array<double, 2> shift) const {
        std::vector<GaussianTerm> ts(terms_);
        for (GaussianTerm& t : ts)
            for (int c = 0; c < dim_; ++c)
                t.center[static_cast<std::size_t>(c)] += shift[static_cast<std::size_t>(c)];
        return GaussianMixture(dim_, width_, std::move(ts));
    }

    cx value_at(std::array<double, 2> point) const {
        cx v(0.0, 0.0);
        for (const GaussianTerm& t : terms_) {
            double g = 1.0;
            for (int c = 0; c < dim_; ++c)
                g *= detail::gaussian_value(
                    point[static_cast<std::size_t>(c)] - t.center[static_cast<std::size_t>(c)],
                    width_[static_cast<std::size_t>(c)]);
            v += t.coeff * g;
        }
        return v;
    }

private:
    int dim_;
    std::array<double, 2> width_;
    std::vector<GaussianTerm> terms_;
};

enum class WidthConvention { single, split };

// Zero-centered product Gaussian. `split` narrows each coordinate by sqrt(2)
// so the Q_A + Q_B combination keeps uncertainty Delta; `single` keeps each
// coordinate at Delta.
inline GaussianMixture standard_pointer(int dim, double width, WidthConvention convention) {
    if (width <= 0.0) throw Error("pointer width must be positive");
    if (dim != 1 && dim != 2) throw Error("pointer dimension must be 1 or 2");
    if (convention == WidthConvention::split && dim != 2)
        throw Error("split width convention requires two pointer coordinates");
    const double w = convention == WidthConvention::split ? width / std::sqrt(2.0) : width;
    return GaussianMixture(dim, {w, w}, {GaussianTerm{cx(1.0, 0.0), {0.0, 0.0}}});
}

// Entangled two-coordinate device built from k+1 overlapping Gaussians whose
// centers all satisfy Q_1 + Q_2 = 0: term l sits at (-l xi, +l xi) with
// per-coordinate width Delta / sqrt(2). Normalized on return.
inline GaussianMixture comb_pointer(int k, double xi, double width) {
    if (k < 0) throw Error("comb term count must be nonnegative");
    if (k > kMaxCombTerms)
        throw Error("comb term count exceeds cap of " + std::to_string(kMaxCombTerms));
    if (width <= 0.0) throw Error("pointer width must be positive");
    const double w = width / std::sqrt(2.0);
    std::vector<GaussianTerm> terms;
    terms.reserve(static_cast<std::size_t>(k) + 1);
    for (int l = 0; l <= k; ++l)
        terms.push_back({cx(1.0, 0.0), {-l * xi, l * xi}});
    return GaussianMixture(2, {w, w}, std::move(terms)).normalized();
}

// Exact expectation <psi|op|psi>/<psi|psi> through closed-form pairwise
// Gaussian overlap integrals.
inline cx analytic_moment(const GaussianMixture& mix, const MomentSpec& spec) {
    if (spec.degree() > kMaxMomentDegree)
        throw Error("moment degree exceeds cap of " + std::to_string(kMaxMomentDegree));
    for (int c = mix.dim(); c < 2; ++c)
        if (spec.q[static_cast<std::size_t>(c)] != 0 || spec.p[static_cast<std::size_t>(c)] != 0)
            throw DimensionMismatch("moment spec references a missing pointer coordinate");

    const auto& terms = mix.terms();
    cx num(0.0, 0.0), den(0.0, 0.0);
    for (const GaussianTerm& tk : terms)
        for (const GaussianTerm& tl : terms) {
            cx elem(1.0, 0.0), ov(1.0, 0.0);
            for (int c = 0; c < mix.dim(); ++c) {
                const std::size_t ci = static_cast<std::size_t>(c);
                elem *= detail::pair_element(spec.q[ci], spec.p[ci], tk.center[ci], tl.center[ci],
                                             mix.width(c));
                ov *= detail::gaussian_overlap(tk.center[ci], tl.center[ci], mix.width(c));
            }
            const cx w = std::conj(tk.coeff) * tl.coeff;
            num += w * elem;
            den += w * ov;
        }
    if (den.real() <= kMixtureNormFloor) throw NormVanishes("mixture has vanishing norm");
    return num / den.real();
}

inline double density_at(const GaussianMixture& mix, std::array<double, 2> point) {
    const double n2 = mix.norm_squared();
    if (n2 <= kMixtureNormFloor) throw NormVanishes("mixture has vanishing norm");
    return std::norm(mix.value_at(point)) / n2;
}

inline double density_at(const GaussianMixture& mix, double q) {
    if (mix.dim() != 1) throw DimensionMismatch("scalar density needs a 1-coordinate mixture");
    return density_at(mix, std::array<double, 2>{q, 0.0});
}

// Marginal |psi|^2 density of one coordinate of a two-coordinate mixture.
inline double marginal_density_at(const GaussianMixture& mix, int coord, double q) {
    if (mix.dim() != 2) throw DimensionMismatch("marginal density needs a 2-coordinate mixture");
    const int other = 1 - coord;
    const double n2 = mix.norm_squared();
    if (n2 <= kMixtureNormFloor) throw NormVanishes("mixture has vanishing norm");
    cx s(0.0, 0.0);
    for (const GaussianTerm& tk : mix.terms())
        for (const GaussianTerm& tl : mix.terms()) {
            const double gk = detail::gaussian_value(q - tk.center[static_cast<std::size_t>(coord)],
                                                     mix.width(coord));
            const double gl = detail::gaussian_value(q - tl.center[static_cast<std::size_t>(coord)],
                                                     mix.width(coord));
            const double ov = detail::gaussian_overlap(tk.center[static_cast<std::size_t>(other)],
                                                       tl.center[static_cast<std::size_t>(other)],
                                                       mix.width(other));
            s += std::conj(tk.coeff) * tl.coeff * gk * gl * ov;
        }
    return s.real() / n2;
}

// <psi_a | psi_b> for mixtures sharing dimension and widths.
inline cx mixture_inner(const GaussianMixture& a, const GaussianMixture& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("mixture dimensions differ");
    for (int c = 0; c < a.dim(); ++c)
        if (std::abs(a.width(c) - b.width(c)) > 1e-12 * a.width(c))
            throw DimensionMismatch("mixture widths differ");
    cx s(0.0, 0.0);
    for (const GaussianTerm& tk : a.terms())
        for (const GaussianTerm& tl : b.terms()) {
            double ov = 1.0;
            for (int c = 0; c < a.dim(); ++c)
                ov *= detail::gaussian_overlap(tk.center[static_cast<std::size_t>(c)],
                                               tl.center[static_cast<std::size_t>(c)], a.width(c));
            s += std::conj(tk.coeff) * tl.coeff * ov;
        }
    return s;
}

namespace detail {

inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

struct AxisGrid {
    std::vector<double> points;
    std::vector<double> weights;
};

inline AxisGrid composite_grid(double lo, double hi, int panels) {
    static thread_local std::vector<double> base_nodes, base_weights;
    if (base_nodes.empty()) gauss_legendre(16, base_nodes, base_weights);
    AxisGrid g;
    g.points.reserve(static_cast<std::size_t>(panels) * base_nodes.size());
    g.weights.reserve(g.points.capacity());
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (std::size_t k = 0; k < base_nodes.size(); ++k) {
            g.points.push_back(mid + 0.5 * h * base_nodes[k]);
            g.weights.push_back(0.5 * h * base_weights[k]);
        }
    }
    return g;
}

// x^m (P^n G)(x - mu) for a unit-norm width-w Gaussian.
inline cx op_gaussian_value(double x, double mu, double w, int m, int n) {
    cx v = gaussian_value(x - mu, w);
    if (n > 0) {
        const double t = (x - mu) / (2.0 * w);
        double hk_1 = 1.0, hk = 2.0 * t;  // H_0, H_1
        for (int k = 2; k <= n; ++k) {
            const double next = 2.0 * t * hk - 2.0 * (k - 1) * hk_1;
            hk_1 = hk;
            hk = next;
        }
        v *= i_power(n) * std::pow(2.0 * w, -static_cast<double>(n)) * hk;
    }
    for (int j = 0; j < m; ++j) v *= x;
    return v;
}

struct WindowSpec {
    double lo, hi;
    int base_panels;
};

inline WindowSpec axis_window(const GaussianMixture& mix, int coord) {
    double lo = mix.terms().front().center[static_cast<std::size_t>(coord)];
    double hi = lo;
    for (const GaussianTerm& t : mix.terms()) {
        lo = std::min(lo, t.center[static_cast<std::size_t>(coord)]);
        hi = std::max(hi, t.center[static_cast<std::size_t>(coord)]);
    }
    const double w = mix.width(coord);
    lo -= 10.0 * w;
    hi += 10.0 * w;
    const int panels =
        std::clamp(static_cast<int>(std::ceil((hi - lo) / (2.0 * w))), 8, 3000);
    return {lo, hi, panels};
}

// One evaluation of both integrals (numerator with the operator applied, and
// the plain norm) at a given panel refinement.
inline std::pair<cx, double> quadrature_pass(const GaussianMixture& mix, const MomentSpec& spec,
                                             int refine) {
    const auto& terms = mix.terms();
    if (mix.dim() == 1) {
        const WindowSpec wspec = axis_window(mix, 0);
        const AxisGrid grid = composite_grid(wspec.lo, wspec.hi, wspec.base_panels * refine);
        cx num(0.0, 0.0);
        double den = 0.0;
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            const double x = grid.points[i];
            cx psi(0.0, 0.0), phi(0.0, 0.0);
            for (const GaussianTerm& t : terms) {
                psi += t.coeff * gaussian_value(x - t.center[0], mix.width(0));
                phi += t.coeff * op_gaussian_value(x, t.center[0], mix.width(0), spec.q[0],
                                                   spec.p[0]);
            }
            num += grid.weights[i] * std::conj(psi) * phi;
            den += grid.weights[i] * std::norm(psi);
        }
        return {num, den};
    }

    const WindowSpec wa = axis_window(mix, 0);
    const WindowSpec wb = axis_window(mix, 1);
    const AxisGrid ga = composite_grid(wa.lo, wa.hi, wa.base_panels * refine);
    const AxisGrid gb = composite_grid(wb.lo, wb.hi, wb.base_panels * refine);
    const std::size_t na = ga.points.size(), nb = gb.points.size();

    std::vector<cx> psi(na * nb, cx(0.0, 0.0)), phi(na * nb, cx(0.0, 0.0));
    std::vector<cx> fa(na), fb(nb), ha(na), hb(nb);
    for (const GaussianTerm& t : terms) {
        for (std::size_t i = 0; i < na; ++i) {
            fa[i] = gaussian_value(ga.points[i] - t.center[0], mix.width(0));
            ha[i] = op_gaussian_value(ga.points[i], t.center[0], mix.width(0), spec.q[0],
                                      spec.p[0]);
        }
        for (std::size_t j = 0; j < nb; ++j) {
            fb[j] = gaussian_value(gb.points[j] - t.center[1], mix.width(1));
            hb[j] = op_gaussian_value(gb.points[j], t.center[1], mix.width(1), spec.q[1],
                                      spec.p[1]);
        }
        for (std::size_t i = 0; i < na; ++i) {
            const cx cfa = t.coeff * fa[i];
            const cx cha = t.coeff * ha[i];
            cx* prow = &psi[i * nb];
            cx* qrow = &phi[i * nb];
            for (std::size_t j = 0; j < nb; ++j) {
                prow[j] += cfa * fb[j];
                qrow[j] += cha * hb[j];
            }
        }
    }
    cx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const double w = ga.weights[i] * gb.weights[j];
            num += w * std::conj(psi[i * nb + j]) * phi[i * nb + j];
            den += w * std::norm(psi[i * nb + j]);
        }
    return {num, den};
}

}  // namespace detail

// Numerical oracle for analytic_moment: composite Gauss-Legendre integration
// over a window of +-10 widths beyond the extreme centers, refined until two
// successive resolutions agree to the documented tolerance (absolute 1e-10,
// scaled by magnitude for large moments).
inline cx quadrature_moment(const GaussianMixture& mix, const MomentSpec& spec) {
    if (spec.degree() > kMaxMomentDegree)
        throw Error("moment degree exceeds cap of " + std::to_string(kMaxMomentDegree));
    for (int c = mix.dim(); c < 2; ++c)
        if (spec.q[static_cast<std::size_t>(c)] != 0 || spec.p[static_cast<std::size_t>(c)] != 0)
            throw DimensionMismatch("moment spec references a missing pointer coordinate");

    auto [num_prev, den_prev] = detail::quadrature_pass(mix, spec, 1);
    double achieved = std::numeric_limits<double>::infinity();
    for (int refine = 2; refine <= 16; refine *= 2) {
        auto [num, den] = detail::quadrature_pass(mix, spec, refine);
        const double err_num = std::abs(num - num_prev);
        const double err_den = std::abs(den - den_prev);
        achieved = std::max(err_num / std::max(1.0, std::abs(num)),
                            err_den / std::max(1.0, std::abs(den)));
        num_prev = num;
        den_prev = den;
        if (achieved <= kQuadratureTolerance) {
            if (den <= kMixtureNormFloor) throw NormVanishes("mixture has vanishing norm");
            return num / den;
        }
    }
    throw IntegrationFailure("quadrature did not reach requested tolerance", achieved);
}

namespace detail {

inline double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct CdfGrid {
    std::vector<double> x;
    std::vector<double> cdf;  // normalized, cdf.front() == 0, cdf.back() == 1

    double sample(double u) const {
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
        hi = std::clamp<std::size_t>(hi, 1, cdf.size() - 1);
        const std::size_t lo = hi - 1;
        const double seg = cdf[hi] - cdf[lo];
        const double frac = seg > 0.0 ? (u - cdf[lo]) / seg : 0.5;
        return x[lo] + frac * (x[hi] - x[lo]);
    }
};

template <typename DensityFn>
inline CdfGrid build_cdf(double lo, double hi, double step, DensityFn&& density) {
    const std::size_t n =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / step)), 64,
                                std::size_t{1} << 21);
    CdfGrid g;
    g.x.resize(n + 1);
    g.cdf.resize(n + 1);
    const double h = (hi - lo) / static_cast<double>(n);
    double prev = density(lo);
    g.x[0] = lo;
    g.cdf[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        g.x[i] = lo + h * static_cast<double>(i);
        const double d = density(g.x[i]);
        g.cdf[i] = g.cdf[i - 1] + 0.5 * (prev + d) * h;
        prev = d;
    }
    const double total = g.cdf.back();
    if (total <= 0.0) throw NormVanishes("density integrates to zero on the sampling window");
    for (double& c : g.cdf) c /= total;
    return g;
}

}  // namespace detail

// I.i.d. draws from the mixture density via grid-based inverse-CDF (grid of
// +-10 widths beyond the extreme centers at resolution width/64).
// Deterministic for a fixed seed.
inline std::vector<double> sample_readout(const GaussianMixture& mix, std::size_t n,
                                          std::uint64_t seed) {
    if (mix.dim() != 1) throw DimensionMismatch("sample_readout needs a 1-coordinate mixture");
    if (n < 1) throw Error("sample count must be at least 1");
    const detail::WindowSpec w = detail::axis_window(mix, 0);
    const double n2 = mix.norm_squared();
    const detail::CdfGrid grid = detail::build_cdf(w.lo, w.hi, mix.width(0) / 64.0, [&](double q) {
        return std::norm(mix.value_at({q, 0.0})) / n2;
    });
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = grid.sample(detail::next_uniform(rng));
    return out;
}

// Two-coordinate variant: first coordinate from its marginal, second from the
// conditional slice.
inline std::vector<std::array<double, 2>> sample_readout_2d(const GaussianMixture& mix,
                                                            std::size_t n, std::uint64_t seed) {
    if (mix.dim() != 2) throw DimensionMismatch("sample_readout_2d needs a 2-coordinate mixture");
    if (n < 1) throw Error("sample count must be at least 1");
    const detail::WindowSpec wa = detail::axis_window(mix, 0);
    const detail::WindowSpec wb = detail::axis_window(mix, 1);
    const detail::CdfGrid marginal =
        detail::build_cdf(wa.lo, wa.hi, mix.width(0) / 64.0,
                          [&](double q) { return marginal_density_at(mix, 0, q); });
    std::mt19937_64 rng(seed);
    std::vector<std::array<double, 2>> out(n);
    for (std::array<double, 2>& v : out) {
        const double qa = marginal.sample(detail::next_uniform(rng));
        const detail::CdfGrid conditional =
            detail::build_cdf(wb.lo, wb.hi, mix.width(1) / 64.0, [&](double qb) {
                return std::norm(mix.value_at({qa, qb}));
            });
        v = {qa, conditional.sample(detail::next_uniform(rng))};
    }
    return out;
}

}  // namespace tsvflab
