#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "tsvflab/tsvf.hpp"

using namespace tsvflab;

namespace {

const std::vector<int> kTwoQubits{2, 2};

// Pre (1+e)|ud> + (-1+e)|du> + d|uu>, post (|ud>+|du>+|uu>+|dd>)/2; the
// running sum/product example. Amplitude order: uu, ud, du, dd.
TwoStateVector sum_example(double delta, double eps) {
    const StateVector pre =
        StateVector(kTwoQubits, {delta, 1.0 + eps, -1.0 + eps, 0.0})
            .scaled(1.0 / std::sqrt(2.0 * eps * eps + delta * delta + 2.0));
    const StateVector post = StateVector(kTwoQubits, {0.5, 0.5, 0.5, 0.5});
    return {pre, post};
}

// Singlet-plus-epsilon pair used for the strong (ABL) comparisons:
// pre (|ud> + |du> + e|uu>)/sqrt(2+e^2), post (|ud> - |du> + e|uu>)/sqrt(2+e^2).
TwoStateVector abl_example(double eps) {
    const double n = 1.0 / std::sqrt(2.0 + eps * eps);
    const StateVector pre = StateVector(kTwoQubits, {eps * n, n, n, 0.0});
    const StateVector post = StateVector(kTwoQubits, {eps * n, n, -n, 0.0});
    return {pre, post};
}

StateVector random_state(std::mt19937_64& rng, const std::vector<int>& dims = kTwoQubits) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cx> amps(total_dimension(dims));
    for (cx& a : amps) a = cx(dist(rng), dist(rng));
    return StateVector(dims, std::move(amps));
}

HermitianOperator random_hermitian(std::mt19937_64& rng,
                                   const std::vector<int>& dims = kTwoQubits) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const std::size_t n = total_dimension(dims);
    detail::CMat m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = dist(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = cx(dist(rng), dist(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return HermitianOperator(dims, std::move(m));
}

// Eigenvalues come out of the solver with float dust on them.
double prob_at(const std::map<double, double>& probs, double value) {
    for (const auto& [v, p] : probs)
        if (std::abs(v - value) < 1e-9) return p;
    FAIL("no eigenvalue near " << value);
    return 0.0;
}

}  // namespace

TEST_CASE("weak values of the sum/product example") {
    const TwoStateVector tsv = sum_example(0.11, -0.05);
    const HermitianOperator za = embed(pauli_z(), 0, kTwoQubits);
    const HermitianOperator zb = embed(pauli_z(), 1, kTwoQubits);

    CHECK(std::abs(weak_value(tsv, za + zb) - cx(22.0, 0.0)) < 22.0 * 1e-12);
    CHECK(std::abs(weak_value(tsv, za) - cx(211.0, 0.0)) < 211.0 * 1e-12);
    CHECK(std::abs(weak_value(tsv, zb) - cx(-189.0, 0.0)) < 189.0 * 1e-12);
    CHECK(std::abs(weak_value(tsv, product(za, zb)) - cx(21.0, 0.0)) < 21.0 * 1e-12);
}

TEST_CASE("eigenstate weak value and variance") {
    const TwoStateVector tsv{qubit_up(), qubit_up()};
    CHECK(std::abs(weak_value(tsv, pauli_z()) - cx(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(weak_variance(tsv, pauli_z())) < 1e-14);
    CHECK(std::abs(weakness_metric(tsv, pauli_z(), 3.0)) < 1e-14);
}

TEST_CASE("spin-100 style weak value of 10") {
    const double eps = std::atan(0.1);
    const StateVector post =
        StateVector({2}, {std::sin(eps), std::cos(eps)});
    const TwoStateVector tsv{qubit_up(), post};
    CHECK(std::abs(weak_value(tsv, pauli_x()) - cx(10.0, 0.0)) < 1e-11);
}

TEST_CASE("weak variance of the sum example") {
    const TwoStateVector tsv = sum_example(0.11, -0.05);
    const HermitianOperator za = embed(pauli_z(), 0, kTwoQubits);
    const HermitianOperator zb = embed(pauli_z(), 1, kTwoQubits);
    // ((A+B)^2)_w = 4 delta / (2 eps + delta) = 44, so variance is 44 - 22^2.
    CHECK(std::abs(weak_variance(tsv, za + zb) - cx(-440.0, 0.0)) < 440.0 * 1e-11);
    // (A^2) = I, variance 1 - 211^2.
    CHECK(std::abs(weak_variance(tsv, za) - cx(-44520.0, 0.0)) < 44520.0 * 1e-11);
}

TEST_CASE("weakness metric") {
    const TwoStateVector tsv = sum_example(0.11, -0.05);
    const HermitianOperator sum =
        embed(pauli_z(), 0, kTwoQubits) + embed(pauli_z(), 1, kTwoQubits);
    CHECK(std::abs(weakness_metric(tsv, sum, 10.0) - cx(-1.1, 0.0)) < 1e-10);

    std::mt19937_64 rng(5);
    const TwoStateVector r{random_state(rng), random_state(rng)};
    const HermitianOperator h = random_hermitian(rng);
    const cx m1 = weakness_metric(r, h, 0.7);
    const cx m2 = weakness_metric(r, h, 1.4);
    CHECK(std::abs(m1 / m2 - cx(4.0, 0.0)) < 1e-12);
}

TEST_CASE("gauge invariance under rescaling pre and post") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const StateVector pre = random_state(rng);
        const StateVector post = random_state(rng);
        const HermitianOperator h = random_hermitian(rng);
        const TwoStateVector tsv{pre, post};
        const TwoStateVector scaled{pre.scaled(cx(0.3, -1.2)), post.scaled(cx(-2.0, 0.7))};

        CHECK(std::abs(weak_value(tsv, h) - weak_value(scaled, h)) <
              1e-12 * (1.0 + std::abs(weak_value(tsv, h))));
        CHECK(std::abs(weak_variance(tsv, h) - weak_variance(scaled, h)) <
              1e-12 * (1.0 + std::abs(weak_variance(tsv, h))));
        const auto p1 = abl_probabilities(tsv, h);
        const auto p2 = abl_probabilities(scaled, h);
        REQUIRE(p1.size() == p2.size());
        for (auto it1 = p1.begin(), it2 = p2.begin(); it1 != p1.end(); ++it1, ++it2)
            CHECK(it1->second == Catch::Approx(it2->second).margin(1e-12));
    }
}

TEST_CASE("weak value linearity") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const TwoStateVector tsv{random_state(rng), random_state(rng)};
        const HermitianOperator a = random_hermitian(rng);
        const HermitianOperator b = random_hermitian(rng);
        const cx sum = weak_value(tsv, a + b);
        const cx parts = weak_value(tsv, a) + weak_value(tsv, b);
        CHECK(std::abs(sum - parts) < 1e-12 * (1.0 + std::abs(sum)));
    }
}

TEST_CASE("ABL probabilities for the singlet-plus-epsilon example") {
    const HermitianOperator za = embed(pauli_z(), 0, kTwoQubits);
    const HermitianOperator zb = embed(pauli_z(), 1, kTwoQubits);
    const HermitianOperator sum = za + zb;

    for (double eps : {0.1, 0.2, 0.5, 1.0}) {
        const TwoStateVector tsv = abl_example(eps);
        const auto probs = abl_probabilities(tsv, sum);
        CHECK(prob_at(probs, 2.0) == Catch::Approx(1.0).margin(1e-12));
        CHECK(prob_at(probs, 0.0) == Catch::Approx(0.0).margin(1e-12));
        CHECK(prob_at(probs, -2.0) == Catch::Approx(0.0).margin(1e-12));
        CHECK(pp_expectation(tsv, sum) == Catch::Approx(2.0).margin(1e-12));
    }

    // eps = 0: the sum outcome never reaches the post selection.
    CHECK_THROWS_AS(abl_probabilities(abl_example(0.0), sum), PostSelectionImpossible);
    // ...but the local measurement is a fair coin.
    const auto local = abl_probabilities(abl_example(0.0), za);
    CHECK(prob_at(local, 1.0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(prob_at(local, -1.0) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("local ABL closed forms") {
    const double eps = 0.3;
    const TwoStateVector tsv = abl_example(eps);
    const HermitianOperator za = embed(pauli_z(), 0, kTwoQubits);
    const HermitianOperator zb = embed(pauli_z(), 1, kTwoQubits);
    const double e2 = eps * eps, e4 = e2 * e2;

    const auto pa = abl_probabilities(tsv, za);
    CHECK(prob_at(pa, 1.0) ==
          Catch::Approx((1.0 + e2) * (1.0 + e2) / (2.0 + e4 + 2.0 * e2)).margin(1e-12));
    CHECK(prob_at(pa, -1.0) == Catch::Approx(1.0 / (2.0 + e4 + 2.0 * e2)).margin(1e-12));

    const auto pb = abl_probabilities(tsv, zb);
    CHECK(prob_at(pb, 1.0) ==
          Catch::Approx((e2 - 1.0) * (e2 - 1.0) / (2.0 + e4 - 2.0 * e2)).margin(1e-12));
    CHECK(prob_at(pb, -1.0) == Catch::Approx(1.0 / (2.0 + e4 - 2.0 * e2)).margin(1e-12));

    CHECK(pp_expectation(tsv, za) ==
          Catch::Approx((e4 + 2.0 * e2) / (2.0 + e4 + 2.0 * e2)).margin(1e-12));
    CHECK(pp_expectation(tsv, zb) ==
          Catch::Approx((e4 - 2.0 * e2) / (2.0 + e4 - 2.0 * e2)).margin(1e-12));
}

TEST_CASE("joint four-outcome probabilities match brute-force enumeration") {
    const double eps = 0.3;
    const TwoStateVector tsv = abl_example(eps);
    // Non-degenerate observable separating all four product states.
    const HermitianOperator joint =
        2.0 * embed(pauli_z(), 0, kTwoQubits) + embed(pauli_z(), 1, kTwoQubits);
    const auto probs = abl_probabilities(tsv, joint);

    // Oracle: enumerate |<post| P_i |pre>|^2 over the four basis projectors.
    const StateVector pre = tsv.pre.normalized();
    const StateVector post = tsv.post.normalized();
    std::vector<double> w(4);
    double denom = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        w[i] = std::norm(std::conj(post[i]) * pre[i]);
        denom += w[i];
    }
    // Basis order uu, ud, du, dd maps to eigenvalues 3, 1, -1, -3.
    CHECK(prob_at(probs, 3.0) == Catch::Approx(w[0] / denom).margin(1e-12));
    CHECK(prob_at(probs, 1.0) == Catch::Approx(w[1] / denom).margin(1e-12));
    CHECK(prob_at(probs, -1.0) == Catch::Approx(w[2] / denom).margin(1e-12));
    CHECK(prob_at(probs, -3.0) == Catch::Approx(w[3] / denom).margin(1e-12));

    // Closed forms from the direct expansion.
    const double e4 = eps * eps * eps * eps;
    CHECK(prob_at(probs, 3.0) == Catch::Approx(e4 / (2.0 + e4)).margin(1e-12));
    CHECK(prob_at(probs, 1.0) == Catch::Approx(1.0 / (2.0 + e4)).margin(1e-12));
    CHECK(prob_at(probs, -1.0) == Catch::Approx(1.0 / (2.0 + e4)).margin(1e-12));
}

TEST_CASE("ABL output is a probability distribution concentrated on eigenstates") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const TwoStateVector tsv{random_state(rng), random_state(rng)};
        const HermitianOperator h = random_hermitian(rng);
        const auto probs = abl_probabilities(tsv, h);
        double total = 0.0;
        for (const auto& [value, p] : probs) {
            CHECK(p >= -1e-15);
            total += p;
        }
        CHECK(total == Catch::Approx(1.0).margin(1e-12));

        double expectation = 0.0;
        for (const auto& [value, p] : probs) expectation += value * p;
        CHECK(pp_expectation(tsv, h) == Catch::Approx(expectation).margin(1e-12));
    }

    // pre = post = eigenstate concentrates all mass on that eigenvalue.
    const TwoStateVector eig{qubit_down(), qubit_down()};
    const auto probs = abl_probabilities(eig, pauli_z());
    CHECK(prob_at(probs, -1.0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(pp_expectation(eig, pauli_z()) == Catch::Approx(-1.0).margin(1e-14));
}

TEST_CASE("sequential weak value") {
    const TwoStateVector tsv = sum_example(0.11, -0.05);
    const HermitianOperator za = embed(pauli_z(), 0, kTwoQubits);
    const HermitianOperator zb = embed(pauli_z(), 1, kTwoQubits);
    const UnitaryOperator id = UnitaryOperator::identity(kTwoQubits);

    // With V = I this is the product weak value.
    CHECK(std::abs(sequential_weak_value(tsv, za, zb, id) - cx(21.0, 0.0)) < 21.0 * 1e-12);

    // A = B = I gives 1 for any evolution.
    const UnitaryOperator v = tensor(exp_i(0.7 * pauli_x()), exp_i(-0.3 * pauli_z()));
    CHECK(std::abs(sequential_weak_value(tsv, identity_op(kTwoQubits), identity_op(kTwoQubits),
                                         v) -
                   cx(1.0, 0.0)) < 1e-12);

    // Random qubit case against a direct matrix chain.
    std::mt19937_64 rng(31);
    const StateVector pre = random_state(rng, {2});
    const StateVector post = random_state(rng, {2});
    const UnitaryOperator vx = UnitaryOperator({2}, pauli_x().matrix());
    const cx got = sequential_weak_value({pre, post}, pauli_z(), pauli_z(), vx);
    const cx num = inner(post, pauli_z().apply(vx.apply(pauli_z().apply(pre))));
    const cx den = inner(post, vx.apply(pre));
    CHECK(std::abs(got - num / den) < 1e-13);
}

TEST_CASE("orthogonal selections are rejected with the overlap attached") {
    const TwoStateVector tsv{qubit_up(), qubit_down()};
    try {
        weak_value(tsv, pauli_z());
        FAIL("expected OverlapVanishes");
    } catch (const OverlapVanishes& e) {
        CHECK(e.overlap_magnitude < 1e-14);
    }
}
