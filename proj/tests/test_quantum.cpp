#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqm/quantum.hpp"
#include "support.hpp"

using namespace lqm;
using lqm::test::matmul_ref;

namespace {

Eigen::MatrixXcd identity(Index n) { return Eigen::MatrixXcd::Identity(n, n); }

Operator cnot() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(2, 3) = 1;
    m(3, 2) = 1;
    return Operator(m, {2, 2});
}

void check_observable_invariants(const SpectralObservable& obs, const Operator& source) {
    const Index n = obs.dim();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < obs.outcomes(); ++j) {
        const Eigen::MatrixXcd& e = obs.projections[j].mat;
        CHECK(max_abs(Eigen::MatrixXcd(e - e.adjoint())) <= 1e-10);
        CHECK(max_abs(Eigen::MatrixXcd(e * e - e)) <= 1e-10);
        for (int k = 0; k < obs.outcomes(); ++k) {
            if (j == k) continue;
            CHECK(max_abs(Eigen::MatrixXcd(e * obs.projections[k].mat)) <= 1e-10);
        }
        sum += e;
    }
    CHECK(max_abs(Eigen::MatrixXcd(sum - identity(n))) <= 1e-10);
    CHECK(max_abs(Eigen::MatrixXcd(obs.reconstruct().mat - source.mat)) <= 1e-9);
    for (int j = 1; j < obs.outcomes(); ++j)
        CHECK(obs.eigenvalues[j] > obs.eigenvalues[j - 1]);
}

} // namespace

TEST_CASE("spectral_decompose: sigma_z, degenerate identity, random reassembly") {
    const SpectralObservable z = spectral_decompose(pauli_z());
    REQUIRE(z.outcomes() == 2);
    CHECK(z.eigenvalues[0] == doctest::Approx(-1).epsilon(1e-14));
    CHECK(z.eigenvalues[1] == doctest::Approx(+1).epsilon(1e-14));
    Eigen::MatrixXcd p1 = Eigen::MatrixXcd::Zero(2, 2);
    p1(1, 1) = 1; // |1><1| pairs with eigenvalue -1
    CHECK(max_abs(Eigen::MatrixXcd(z.projections[0].mat - p1)) <= 1e-12);
    Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(2, 2);
    p0(0, 0) = 1;
    CHECK(max_abs(Eigen::MatrixXcd(z.projections[1].mat - p0)) <= 1e-12);

    const SpectralObservable one = spectral_decompose(identity_op(std::vector<Index>{2, 2}));
    REQUIRE(one.outcomes() == 1);
    CHECK(one.eigenvalues[0] == doctest::Approx(1).epsilon(1e-14));
    CHECK(max_abs(Eigen::MatrixXcd(one.projections[0].mat - identity(4))) <= 1e-12);

    Rng rng(3);
    const Operator h = test::random_hermitian(rng, {8});
    check_observable_invariants(spectral_decompose(h), h);

    Eigen::MatrixXcd bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(spectral_decompose(Operator(bad, {2})), ArgumentError);
}

TEST_CASE("spectral observable invariants hold over many random inputs") {
    Rng rng(5);
    const std::vector<Index> sizes{2, 3, 4, 8};
    for (int rep = 0; rep < 500; ++rep) {
        const Index n = sizes[static_cast<size_t>(rep) % sizes.size()];
        const Operator h = test::random_hermitian(rng, {n});
        check_observable_invariants(spectral_decompose(h), h);
    }
}

TEST_CASE("spectral_decompose groups a degenerate cluster") {
    // diag(0, 1, 1 + 1e-12, 5): with tol 1e-9 the middle pair clusters.
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d(1, 1) = 1.0;
    d(2, 2) = 1.0 + 1e-12;
    d(3, 3) = 5.0;
    const SpectralObservable obs = spectral_decompose(Operator(d, {4}), 1e-9);
    REQUIRE(obs.outcomes() == 3);
    CHECK(obs.projections[1].mat.trace().real() == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("embed: placement, disjoint-support commutation, permuted targets") {
    const Operator zi = embed(pauli_z(), {0}, {2, 2});
    CHECK(max_abs(Eigen::MatrixXcd(zi.mat - kron(pauli_z(), identity_op(2)).mat)) == 0.0);

    const Operator x0 = embed(pauli_x(), {0}, {2, 2});
    const Operator y1 = embed(pauli_y(), {1}, {2, 2});
    CHECK(max_abs(Eigen::MatrixXcd(x0.mat * y1.mat - y1.mat * x0.mat)) == 0.0);

    // CNOT on factors {0,2} of a 3-qubit space: |101> -> |100>.
    const Operator wide = embed(cnot(), {0, 2}, {2, 2, 2});
    const Eigen::VectorXcd moved = wide.mat * basis_state(5, {2, 2, 2}).amp;
    CHECK(max_abs(Eigen::VectorXcd(moved - basis_state(4, {2, 2, 2}).amp)) == 0.0);
    // Oracle: exhaustive basis permutation over all 8 inputs.
    for (Index in = 0; in < 8; ++in) {
        const Index c = (in >> 2) & 1, m = (in >> 1) & 1, t = in & 1;
        const Index want = (c << 2) | (m << 1) | (t ^ c);
        const Eigen::VectorXcd got = wide.mat * basis_state(in, {2, 2, 2}).amp;
        CHECK(max_abs(Eigen::VectorXcd(got - basis_state(want, {2, 2, 2}).amp)) == 0.0);
    }

    // Reversed target order: the first tensor slot of the operator lands on
    // the later factor. |101>: op sees (f2,f0) = (1,1) -> |10>, so f2 = 1,
    // f0 = 0, giving |001>.
    const Operator flipped = embed(cnot(), {2, 0}, {2, 2, 2});
    const Eigen::VectorXcd swapped = flipped.mat * basis_state(5, {2, 2, 2}).amp;
    CHECK(max_abs(Eigen::VectorXcd(swapped - basis_state(1, {2, 2, 2}).amp)) == 0.0);

    CHECK_THROWS_AS(embed(cnot(), {0}, {2, 2}), ArgumentError);
    CHECK_THROWS_AS(embed(pauli_x(), {0, 1}, {2, 2}), ArgumentError);
    CHECK_THROWS_AS(embed(pauli_x(), {3}, {2, 2}), ArgumentError);
}

TEST_CASE("embed is a homomorphism (exact, reference product)") {
    Rng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const Operator a = test::random_dyadic(rng, {2});
        const Operator b = test::random_dyadic(rng, {2});
        const Operator ab(matmul_ref(a.mat, b.mat), {2});
        const Operator lhs = embed(ab, {1}, {2, 2, 2});
        const Eigen::MatrixXcd rhs =
            matmul_ref(embed(a, {1}, {2, 2, 2}).mat, embed(b, {1}, {2, 2, 2}).mat);
        CHECK(max_abs(Eigen::MatrixXcd(lhs.mat - rhs)) == 0.0);
    }
}

TEST_CASE("embed_state fills the remaining factors with the lowest basis vector") {
    Eigen::VectorXcd plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const State s = embed_state(State(plus, {2}), {1}, {2, 2, 2});
    CHECK(std::abs(s.amp[2] - cxd(1 / std::sqrt(2.0), 0)) <= 1e-15); // |010>
    CHECK(std::abs(s.amp[0] - cxd(1 / std::sqrt(2.0), 0)) <= 1e-15); // |000>
    CHECK(s.norm() == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("validate_isometry: unitaries, slot injections, families") {
    Isometry id;
    id.matrix = identity_op(std::vector<Index>{2, 2});
    CHECK(validate_isometry(id) == 0.0);

    Isometry cn;
    cn.matrix = cnot();
    CHECK(validate_isometry(cn) == 0.0);

    // Square embeddings of |0>- and |1>-injections on the second factor.
    std::vector<Isometry> family;
    for (Index target : {0, 1}) {
        Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(4, 4);
        for (Index s = 0; s < 2; ++s) w(s * 2 + target, s * 2) = 1.0;
        Eigen::MatrixXcd dom = Eigen::MatrixXcd::Zero(4, 4);
        for (Index s = 0; s < 2; ++s) dom(s * 2, s * 2) = 1.0;
        Isometry iso;
        iso.matrix = Operator(w, {2, 2});
        iso.domain = Operator(dom, {2, 2});
        family.push_back(iso);
        CHECK(validate_isometry(family.back()) == 0.0);
    }
    CHECK(validate_isometry_family(std::span<const Isometry>(family)) == 0.0);
}

TEST_CASE("hermitian_basis: Pauli set at d=2, traceless Hermitian above") {
    const auto p = hermitian_basis(2);
    REQUIRE(p.size() == 3);
    CHECK(max_abs(Eigen::MatrixXcd(p[0].mat - pauli_x().mat)) == 0.0);
    CHECK(max_abs(Eigen::MatrixXcd(p[1].mat - pauli_y().mat)) == 0.0);
    CHECK(max_abs(Eigen::MatrixXcd(p[2].mat - pauli_z().mat)) == 0.0);

    const auto g3 = hermitian_basis(3);
    CHECK(g3.size() == 8);
    for (const auto& g : g3) {
        CHECK(g.is_hermitian(1e-14));
        CHECK(std::abs(g.mat.trace()) <= 1e-14);
    }
}

TEST_CASE("entropy and Schmidt coefficients of a Bell pair") {
    Eigen::VectorXcd bell(4);
    bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
    const State psi(bell, {2, 2});
    const Operator reduced = partial_trace(outer(psi, psi), {0});
    CHECK(von_neumann_entropy(reduced) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const Eigen::VectorXd sc = schmidt_coefficients(psi, {0});
    REQUIRE(sc.size() == 2);
    CHECK(sc[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(sc[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
}
