#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "tsvflab/hilbert.hpp"

using namespace tsvflab;

namespace {

HermitianOperator random_hermitian(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    detail::CMat m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = dist(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cx v(dist(rng), dist(rng));
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return HermitianOperator({static_cast<int>(n)}, std::move(m));
}

StateVector random_state(const std::vector<int>& dims, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cx> amps(total_dimension(dims));
    for (cx& a : amps) a = cx(dist(rng), dist(rng));
    return StateVector(dims, std::move(amps));
}

}  // namespace

TEST_CASE("basis states and tensor composition") {
    const StateVector up = qubit_up();
    const StateVector down = qubit_down();
    const StateVector ud = tensor(up, down);
    REQUIRE(ud.dims() == std::vector<int>{2, 2});
    CHECK(ud.amplitude({0, 1}) == cx(1.0, 0.0));
    CHECK(ud.amplitude({0, 0}) == cx(0.0, 0.0));
    CHECK(ud.amplitude({1, 0}) == cx(0.0, 0.0));
    CHECK(ud.amplitude({1, 1}) == cx(0.0, 0.0));
}

TEST_CASE("sigma_z x I eigenaction on |du>") {
    const StateVector du = tensor(qubit_down(), qubit_up());
    const HermitianOperator zi = tensor(pauli_z(), identity_op({2}));
    const StateVector out = zi.apply(du);
    for (std::size_t i = 0; i < du.size(); ++i)
        CHECK(std::abs(out[i] - (-du[i])) < 1e-15);
}

TEST_CASE("spin-1 product operator against direct 9x9 matrix oracle") {
    // (|-1> + |0>) |0> / sqrt(2) is annihilated by Sz (x) Sz.
    const StateVector a =
        (StateVector::basis_state({3}, {spin1_index(-1)}) +
         StateVector::basis_state({3}, {spin1_index(0)}))
            .scaled(1.0 / std::sqrt(2.0));
    const StateVector s = tensor(a, StateVector::basis_state({3}, {spin1_index(0)}));
    const HermitianOperator zz = tensor(spin1_z(), spin1_z());

    // Independent oracle: build the 9x9 product entrywise from diag(1,0,-1).
    const double sz[3] = {1.0, 0.0, -1.0};
    detail::CMat direct(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            direct(static_cast<std::size_t>(3 * i + j), static_cast<std::size_t>(3 * i + j)) =
                sz[i] * sz[j];
    CHECK(detail::max_abs_diff(zz.matrix(), direct) < 1e-15);

    const StateVector out = zz.apply(s);
    CHECK(out.norm() < 1e-15);
}

TEST_CASE("inner product basics") {
    CHECK(std::abs(inner(qubit_up(), qubit_up()) - cx(1.0, 0.0)) < 1e-15);

    std::mt19937_64 rng(41);
    const StateVector x = random_state({2, 2}, rng);
    const StateVector y = random_state({2, 2}, rng);
    CHECK(std::abs(inner(x, y) - std::conj(inner(y, x))) < 1e-14);
    CHECK(std::abs(inner(x, y)) <= x.norm() * y.norm() + 1e-14);
}

TEST_CASE("sum-example overlap expands to (2 eps + delta) with normalizers") {
    const double delta = 0.11, eps = -0.05;
    std::vector<cx> pre_amps{delta, 1.0 + eps, -1.0 + eps, 0.0};  // uu, ud, du, dd
    const StateVector pre =
        StateVector({2, 2}, pre_amps).scaled(1.0 / std::sqrt(2.0 * eps * eps + delta * delta + 2.0));
    const StateVector post = StateVector({2, 2}, {0.5, 0.5, 0.5, 0.5});
    const double expected =
        (2.0 * eps + delta) * 0.5 / std::sqrt(2.0 * eps * eps + delta * delta + 2.0);
    CHECK(std::abs(inner(post, pre) - cx(expected, 0.0)) < 1e-15);
}

TEST_CASE("eigendecomposition of known two-qubit spectra") {
    const std::vector<int> dims{2, 2};
    const HermitianOperator sum = embed(pauli_z(), 0, dims) + embed(pauli_z(), 1, dims);
    const Eigensystem& ssum = sum.eigensystem();
    REQUIRE(ssum.spaces.size() == 3);
    CHECK(ssum.spaces[0].eigenvalue == Catch::Approx(-2.0).margin(1e-12));
    CHECK(ssum.spaces[1].eigenvalue == Catch::Approx(0.0).margin(1e-12));
    CHECK(ssum.spaces[2].eigenvalue == Catch::Approx(2.0).margin(1e-12));
    CHECK(ssum.spaces[0].multiplicity == 1);
    CHECK(ssum.spaces[1].multiplicity == 2);
    CHECK(ssum.spaces[2].multiplicity == 1);

    const HermitianOperator prod = product(embed(pauli_z(), 0, dims), embed(pauli_z(), 1, dims));
    const Eigensystem& sprod = prod.eigensystem();
    REQUIRE(sprod.spaces.size() == 2);
    CHECK(sprod.spaces[0].eigenvalue == Catch::Approx(-1.0).margin(1e-12));
    CHECK(sprod.spaces[1].eigenvalue == Catch::Approx(1.0).margin(1e-12));
    CHECK(sprod.spaces[0].multiplicity == 2);
    CHECK(sprod.spaces[1].multiplicity == 2);
}

TEST_CASE("random Hermitian matrices reconstruct from eigenspaces") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const HermitianOperator h = random_hermitian(4, rng);
        const Eigensystem& sys = h.eigensystem();

        detail::CMat rebuilt(4);
        detail::CMat projector_sum(4);
        for (const Eigenspace& sp : sys.spaces) {
            for (std::size_t i = 0; i < rebuilt.a.size(); ++i) {
                rebuilt.a[i] += sp.eigenvalue * sp.projector.a[i];
                projector_sum.a[i] += sp.projector.a[i];
            }
        }
        CHECK(detail::max_abs_diff(rebuilt, h.matrix()) < 1e-9);
        CHECK(detail::max_abs_diff(projector_sum, detail::CMat::identity(4)) < 1e-10);

        // Idempotent and mutually orthogonal projectors.
        for (std::size_t i = 0; i < sys.spaces.size(); ++i)
            for (std::size_t j = 0; j < sys.spaces.size(); ++j) {
                const detail::CMat pij =
                    detail::mul(sys.spaces[i].projector, sys.spaces[j].projector);
                const detail::CMat expected =
                    i == j ? sys.spaces[i].projector : detail::CMat(4);
                CHECK(detail::max_abs_diff(pij, expected) < 1e-10);
            }

        // Applying the matrix equals applying sum of c_n P_n.
        const StateVector s = random_state({4}, rng);
        const StateVector via_matrix = h.apply(s);
        StateVector via_spectral = s.scaled(0.0);
        for (const Eigenspace& sp : sys.spaces)
            via_spectral =
                via_spectral + detail::apply_matrix(sp.projector, s).scaled(sp.eigenvalue);
        CHECK((via_matrix - via_spectral).norm() < 1e-9);
    }
}

TEST_CASE("tensor associativity") {
    std::mt19937_64 rng(11);
    const StateVector a = random_state({2}, rng);
    const StateVector b = random_state({3}, rng);
    const StateVector c = random_state({2}, rng);
    const StateVector left = tensor(tensor(a, b), c);
    const StateVector right = tensor(a, tensor(b, c));
    REQUIRE(left.dims() == right.dims());
    CHECK((left - right).norm() < 1e-12);

    const HermitianOperator ha = random_hermitian(2, rng);
    const HermitianOperator hb = random_hermitian(3, rng);
    const HermitianOperator hc = random_hermitian(2, rng);
    CHECK(detail::max_abs_diff(tensor(tensor(ha, hb), hc).matrix(),
                               tensor(ha, tensor(hb, hc)).matrix()) < 1e-12);
}

TEST_CASE("spin constructors") {
    CHECK(pauli_z().matrix()(0, 0) == cx(1.0, 0.0));
    CHECK(pauli_z().matrix()(1, 1) == cx(-1.0, 0.0));
    CHECK((pauli_x().apply(qubit_up()) - qubit_down()).norm() < 1e-15);
    const HermitianOperator s1 = spin_operator(SpinKind::spin1, Axis::z);
    CHECK(s1.matrix()(0, 0) == cx(1.0, 0.0));
    CHECK(s1.matrix()(1, 1) == cx(0.0, 0.0));
    CHECK(s1.matrix()(2, 2) == cx(-1.0, 0.0));
    CHECK_THROWS_AS(spin_operator(SpinKind::spin1, Axis::x), Error);
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(inner(qubit_up(), tensor(qubit_up(), qubit_up())), DimensionMismatch);

    detail::CMat bad(2);
    bad(0, 1) = cx(1.0, 0.0);
    bad(1, 0) = cx(0.5, 0.0);
    CHECK_THROWS_AS(HermitianOperator({2}, std::move(bad)), NotHermitian);

    detail::CMat notu(2);
    notu(0, 0) = 2.0;
    notu(1, 1) = 1.0;
    CHECK_THROWS_AS(UnitaryOperator({2}, std::move(notu)), NotUnitary);

    // 2^13 = 8192 > 4096 cap
    CHECK_THROWS_AS(total_dimension(std::vector<int>(13, 2)), DimensionOverflow);
}

TEST_CASE("unitary application and exp_i") {
    // exp(-i pi/2 sigma_y) = -i sigma_y maps |u> to |d>.
    const UnitaryOperator u = exp_i((-std::numbers::pi / 2.0) * pauli_y());
    const StateVector out = u.apply(qubit_up());
    CHECK(std::abs(out[0]) < 1e-12);
    CHECK(std::abs(out[1] - cx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("particle permutation reorders tensor factors") {
    std::mt19937_64 rng(3);
    const StateVector a = random_state({2}, rng);
    const StateVector b = random_state({3}, rng);
    const StateVector ab = tensor(a, b);
    const StateVector ba = permute_particles(ab, {1, 0});
    CHECK((ba - tensor(b, a)).norm() < 1e-14);
}
