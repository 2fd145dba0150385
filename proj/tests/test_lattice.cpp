#include "doctest.h"

#include "oracles.hpp"

#include "ssblab/errors.hpp"
#include "ssblab/lattice.hpp"
#include "ssblab/operators.hpp"
#include "ssblab/state.hpp"

#include <random>

using namespace ssblab;
using lattice::Lattice;

TEST_CASE("row-major coordinates round-trip") {
    const Lattice lat(2, 3);
    CHECK(lat.volume() == 9);
    CHECK(lat.coord(5) == lattice::Coord{1, 2});
    for (int s = 0; s < lat.volume(); ++s) CHECK(lat.index(lat.coord(s)) == s);
    const int wrapped[] = {-1, 4};
    CHECK(lat.index(wrapped) == lat.index(std::vector<int>{2, 1}));
}

TEST_CASE("neighbors and separations wrap periodically") {
    const Lattice ring(1, 5);
    CHECK(ring.neighbor(4, 0) == 0);
    CHECK(ring.neighbor(0, 0, -1) == 4);
    CHECK(ring.separation(1, 3) == 3);  // 1 - 3 = -2 = 3 mod 5
    CHECK(ring.min_image_distance(3) == doctest::Approx(2.0));
    const Lattice sq(2, 4);
    // displacement (2, 3) -> minimum image (2, -1)
    CHECK(sq.min_image_distance(sq.index(std::vector<int>{2, 3})) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("momentum grid shares the site indexing") {
    const Lattice lat(2, 4);
    const auto k = lat.momentum(lat.index(std::vector<int>{1, 3}));
    CHECK(k[0] == doctest::Approx(oracle::kPi / 2));
    CHECK(k[1] == doctest::Approx(3 * oracle::kPi / 2));
    CHECK(lat.momentum_index(k) == lat.index(std::vector<int>{1, 3}));
    const double off[] = {0.3, 0.0};
    CHECK_THROWS_AS(lat.momentum_index(off), DomainError);
    CHECK(lat.negate_momentum(lat.index(std::vector<int>{1, 3})) == lat.index(std::vector<int>{3, 1}));
}

TEST_CASE("phase is exp(i k.x)") {
    const Lattice lat(1, 6);
    for (int k = 0; k < 6; ++k)
        for (int x = 0; x < 6; ++x) {
            const auto ref = std::polar(1.0, 2 * oracle::kPi * k * x / 6);
            CHECK(std::abs(lat.phase(k, x) - ref) < 1e-13);
        }
}

TEST_CASE("lattice rejects degenerate shapes") {
    CHECK_THROWS(Lattice(0, 4));
    CHECK_THROWS(Lattice(1, 0));
}

TEST_CASE("tensor space digits, factor 0 most significant") {
    const TensorSpace sp({2, 3, 2});
    CHECK(sp.dim() == 12);
    CHECK(sp.stride(0) == 6);
    CHECK(sp.digits(7) == std::vector<int>{1, 0, 1});
    CHECK(sp.compose({1, 2, 1}) == 11);
    CHECK(sp.digit(11, 1) == 2);
}

TEST_CASE("spin matrices obey the Pauli algebra") {
    const Mat x = ops::s1(), y = ops::s2(), z = ops::s3();
    const Mat I = Mat::Identity(2, 2);
    CHECK((x * x - I).norm() < 1e-15);
    CHECK((x * y - kI * z).norm() < 1e-15);
    CHECK(z(0, 0).real() == 1.0);  // local state 0 is up
}

TEST_CASE("ladder operators satisfy [c, c^dag] = 1 below the cutoff") {
    const Mat c = ops::annihilation(5), cd = ops::creation(5);
    const Mat comm = c * cd - cd * c;
    for (int n = 0; n < 5; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
    CHECK(std::abs(comm(5, 5) + 5.0) < 1e-13);  // truncation artefact on the top level
}

TEST_CASE("Gell-Mann basis is orthonormal and traceless") {
    for (int q : {2, 3, 4}) {
        const auto b = ops::gell_mann_basis(q);
        REQUIRE(static_cast<int>(b.size()) == q * q - 1);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(std::abs(b[i].trace()) < 1e-14);
            for (std::size_t j = 0; j < b.size(); ++j) {
                CHECK(std::abs((b[i].adjoint() * b[j]).trace() - (i == j ? 1.0 : 0.0)) < 1e-13);
            }
        }
    }
}

TEST_CASE("embed_local matches Kronecker products") {
    const TensorSpace sp = TensorSpace::uniform(3, 2);
    for (int x = 0; x < 3; ++x) {
        const Mat ref = oracle::embed(ops::s1(), x, 3, 2);
        CHECK((Mat(embed_local(ops::s1(), x, sp)) - ref).norm() < 1e-15);
    }
}

TEST_CASE("embed_local names the site on dimension mismatch") {
    const TensorSpace sp({2, 3});
    try {
        embed_local(ops::s1(), 1, sp);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("site 1") != std::string::npos);
    }
    CHECK_THROWS_AS(embed_local(ops::s1(), 5, sp), DimensionError);
}

TEST_CASE("momentum transform and intensive average") {
    const Lattice lat(1, 4);
    const TensorSpace sp = TensorSpace::uniform(4, 2);
    const LocalOperatorField z(ops::s3(), "s3");
    Mat ref = Mat::Zero(16, 16);
    for (int x = 0; x < 4; ++x) ref += std::polar(1.0, 2 * oracle::kPi * x / 4) * oracle::embed(ops::s3(), x, 4, 2);
    ref /= 4.0;
    CHECK((Mat(momentum_transform(z, 1, lat, sp)) - ref).norm() < 1e-14);
    Mat avg = Mat::Zero(16, 16);
    for (int x = 0; x < 4; ++x) avg += oracle::embed(ops::s3(), x, 4, 2) / 4.0;
    CHECK((Mat(build_intensive(z, lat, sp)) - avg).norm() < 1e-14);
    // Real momentum on the grid equals the indexed transform.
    const auto k = lat.momentum(1);
    CHECK((Mat(momentum_transform(embed_field(z, lat, sp), k, lat)) - ref).norm() < 1e-14);
}

TEST_CASE("single-site lattice: intensive operator is the site operator") {
    const Lattice lat(1, 1);
    const TensorSpace sp = TensorSpace::uniform(1, 2);
    const LocalOperatorField z(ops::s3());
    CHECK((Mat(build_intensive(z, lat, sp)) - ops::s3()).norm() < 1e-15);
}

TEST_CASE("intensive operators need a field covering the lattice") {
    const Lattice lat(1, 4);
    const TensorSpace sp = TensorSpace::uniform(4, 2);
    const LocalOperatorField partial(ops::s3(), "s3", {0, 1});
    CHECK_FALSE(partial.covers_all(lat));
    CHECK_THROWS(build_intensive(partial, lat, sp));
}

TEST_CASE("translation operator is a unitary permutation of the group") {
    const Lattice lat(1, 5);
    const TensorSpace sp = TensorSpace::uniform(5, 2);
    const int one[] = {1};
    const SpMat T = translation_operator(lat, sp, one);
    Mat P = Mat::Identity(32, 32);
    for (int i = 0; i < 5; ++i) P = Mat(T) * P;
    CHECK((P - Mat::Identity(32, 32)).norm() < 1e-14);
    // T s3(x) T^dag = s3(x + 1)
    const Mat lhs = Mat(T) * Mat(embed_local(ops::s3(), 2, sp)) * Mat(T).adjoint();
    CHECK((lhs - Mat(embed_local(ops::s3(), 3, sp))).norm() < 1e-14);
}

TEST_CASE("translate_state agrees with the translation operator") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const Lattice lat(2, 2);
    const TensorSpace sp = TensorSpace::uniform(4, 2);
    Vec v(16);
    for (auto& a : v) a = cplx(g(rng), g(rng));
    const auto phi = ManyBodyState::normalized(v, lat, sp);
    const int shift[] = {1, 0};
    const auto moved = translate_state(phi, shift);
    CHECK((moved.amplitudes() - translation_operator(lat, sp, shift) * phi.amplitudes()).norm() < 1e-14);
}

TEST_CASE("states must be normalised") {
    const Lattice lat(1, 2);
    const TensorSpace sp = TensorSpace::uniform(2, 2);
    CHECK_THROWS_AS(ManyBodyState(Vec::Ones(4), lat, sp), DomainError);
    CHECK_THROWS_AS(ManyBodyState::normalized(Vec::Zero(4), lat, sp), DomainError);
    const auto s = ManyBodyState::normalized(Vec::Ones(4), lat, sp);
    CHECK(s.amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("fluctuations: normal and symmetrized") {
    const Lattice lat(1, 1);
    const TensorSpace sp = TensorSpace::uniform(1, 2);
    Vec up(2);
    up << 1, 0;
    const ManyBodyState s(up, lat, sp);
    CHECK(fluctuation(s, SpMat(ops::s3().sparseView())) == doctest::Approx(0.0));
    CHECK(fluctuation(s, SpMat(ops::s1().sparseView())) == doctest::Approx(1.0));
    // sigma^- = (s1 - i s2)/2 on |up>: <dA^dag dA> = 1, <dA dA^dag> = 0.
    const Mat lower = (ops::s1() - kI * ops::s2()) / 2.0;
    CHECK(fluctuation(s, SpMat(lower.sparseView())) == doctest::Approx(1.0));
    CHECK(symmetrized_fluctuation(s, SpMat(lower.sparseView())) == doctest::Approx(0.5));
}

TEST_CASE("operator utilities") {
    const SpMat z = ops::s3().sparseView();
    const SpMat x = ops::s1().sparseView();
    CHECK(is_diagonal(z));
    CHECK_FALSE(is_diagonal(x));
    CHECK(is_hermitian(x));
    CHECK_FALSE(is_hermitian(SpMat((ops::s1() + kI * Mat::Identity(2, 2)).sparseView())));
    CHECK(commutator_norm(z, z) == doctest::Approx(0.0));
    CHECK(commutator_norm(x, z) == doctest::Approx(std::sqrt(8.0)));
    CHECK(operator_norm_bound(x) == doctest::Approx(1.0));
}
