#include <doctest.h>

#include <random>
#include <sstream>

#include "loopmod/complex.hpp"
#include "loopmod/errors.hpp"
#include "loopmod/exact_linalg.hpp"
#include "loopmod/homology.hpp"
#include "oracles.hpp"

using namespace loopmod;

namespace {

SparseIntMatrix dense_to_sparse(const std::vector<std::vector<long>>& a) {
    std::vector<MatrixEntry> e;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (a[i][j]) e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), a[i][j]});
    return SparseIntMatrix::from_triplets(a.size(), a.empty() ? 0 : a[0].size(), std::move(e));
}

oracle::Dense to_dense(const SparseIntMatrix& m) {
    oracle::Dense d(m.rows(), std::vector<mpq_class>(m.cols(), 0));
    for (const auto& e : m.entries()) d[e.row][e.col] = e.value;
    return d;
}

// Sparse random matrix; every third one is a product of two thin factors so
// that rank deficiency is common.
SparseIntMatrix random_matrix(std::mt19937& rng, int index) {
    std::uniform_int_distribution<int> dim(1, 50);
    const int rows = dim(rng), cols = dim(rng);
    std::uniform_int_distribution<int> val(-3, 3);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double density = 0.05 + 0.3 * coin(rng);
    auto fill = [&](int r, int c) {
        std::vector<std::vector<long>> a(r, std::vector<long>(c, 0));
        for (auto& row : a)
            for (auto& x : row)
                if (coin(rng) < density) x = val(rng);
        return dense_to_sparse(a);
    };
    if (index % 3 == 0) {
        std::uniform_int_distribution<int> inner(1, 12);
        const int k = inner(rng);
        return fill(rows, k) * fill(k, cols);
    }
    return fill(rows, cols);
}

}  // namespace

TEST_CASE("triplets are summed, zero-free and range-checked") {
    const auto m = SparseIntMatrix::from_triplets(2, 2, {{0, 1, 3}, {0, 1, -3}, {1, 0, 2}, {1, 0, 5}, {1, 1, 0}});
    CHECK(m.nnz() == 1);
    CHECK(m.at(1, 0) == 7);
    CHECK(m.at(0, 1) == 0);
    CHECK_THROWS_AS(SparseIntMatrix::from_triplets(2, 2, {{2, 0, 1}}), IndexError);
    const auto t = SparseIntMatrix::from_triplets(2, 3, {{0, 2, 4}, {1, 0, -1}}).transpose();
    CHECK(t.rows() == 3);
    CHECK(t.at(2, 0) == 4);
}

TEST_CASE("coordinate text round trip") {
    const auto m = SparseIntMatrix::from_triplets(3, 4, {{2, 0, -1}, {0, 3, mpz_class("123456789012345678901234567890")}, {1, 1, 5}});
    std::stringstream io;
    write_coordinate(io, m);
    CHECK(io.str().rfind("3 4 3\n", 0) == 0);
    CHECK(read_coordinate(io) == m);
    std::stringstream bad("2 2 1\n5 0 1\n");
    CHECK_THROWS(read_coordinate(bad));
    std::stringstream truncated("2 2 2\n0 0 1\n");
    CHECK_THROWS(read_coordinate(truncated));
}

TEST_CASE("primes") {
    CHECK(default_primes() == std::vector<std::uint32_t>{2147483647u, 2147483629u, 2147483587u});
    CHECK(extended_primes().size() == 7);
    for (auto p : extended_primes()) CHECK(is_prime(p));
    CHECK_FALSE(is_prime(2147483649ull));
    CHECK_THROWS(rank_mod_p(SparseIntMatrix::identity(2), 15));
    CHECK_THROWS(rank_mod_p(SparseIntMatrix::identity(2), 2));
}

TEST_CASE("ranks of small matrices") {
    for (auto p : default_primes()) CHECK(rank_mod_p(SparseIntMatrix::identity(3), p) == 3);
    CHECK(rank_mod_p(SparseIntMatrix(4, 5), 2147483647u) == 0);
    CHECK(rank_exact(SparseIntMatrix(4, 5)) == 0);
    CHECK(rank_exact(dense_to_sparse({{2, 0}, {0, 3}})) == 2);
    CHECK(rank_rational(circulant_block(6)) == 5);

    const auto holo3 = build_complex(FamilySpec::make(Family::holocolored, 3));
    CHECK(rank_mod_p(holo3.boundaries[1], 2147483647u) == 2);
    CHECK(rank_exact(holo3.boundaries[2]) == 5);
}

TEST_CASE("a multiple of every default prime is caught in exact mode") {
    mpz_class big = 1;
    for (auto p : default_primes()) big *= p;
    const auto m = SparseIntMatrix::from_triplets(1, 1, {{0, 0, big}});
    for (auto p : default_primes()) CHECK(rank_mod_p(m, p) == 0);
    RankOptions exact;
    exact.exact = true;
    const auto r = rank_rational_report(m, exact);
    CHECK(r.rank == 1);
    CHECK(r.exact);
}

TEST_CASE("disagreeing primes widen to the extended set") {
    const auto m = SparseIntMatrix::from_triplets(1, 1, {{0, 0, mpz_class(2147483647u)}});
    const auto r = rank_rational_report(m);
    CHECK(r.rank == 1);
    CHECK(r.primes.size() == 7);
}

TEST_CASE("rank engine agrees with dense elimination on 200 random matrices") {
    std::mt19937 rng(20240611);
    RankOptions threaded;
    threaded.threads = 3;
    for (int i = 0; i < 200; ++i) {
        const auto m = random_matrix(rng, i);
        const auto expected = oracle::dense_rank(to_dense(m));
        CAPTURE(i);
        CHECK(rank_exact(m) == expected);
        CHECK(rank_rational(m) == expected);
        CHECK(rank_rational(m, threaded) == expected);
        CHECK(rank_mod_p(m, 2147483629u) == expected);
        CHECK(smith_normal_form(m).rank == expected);
    }
}

TEST_CASE("Smith normal form") {
    const auto id = smith_normal_form(SparseIntMatrix::identity(4));
    CHECK(id.diagonal == std::vector<BigInt>(4, 1));
    CHECK(id.torsion().empty());

    const auto s = smith_normal_form(dense_to_sparse({{2, 4}, {6, 8}}));
    CHECK(s.diagonal == std::vector<BigInt>{2, 4});
    CHECK(s.torsion() == std::vector<BigInt>{2, 4});

    const auto z = smith_normal_form(SparseIntMatrix(3, 3));
    CHECK(z.diagonal.empty());
    CHECK(z.rank == 0);

    CHECK_THROWS_AS(smith_normal_form(SparseIntMatrix::identity(10), {5, 100}), CapacityError);
}

TEST_CASE("Smith normal form against determinants and gcds") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> val(-6, 6);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 5;
        std::vector<std::vector<long>> a(n, std::vector<long>(n));
        std::vector<std::vector<mpz_class>> az(n, std::vector<mpz_class>(n));
        mpz_class g = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a[i][j] = val(rng);
                az[i][j] = a[i][j];
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), az[i][j].get_mpz_t());
            }
        const auto snf = smith_normal_form(dense_to_sparse(a));
        const mpz_class det = abs(oracle::dense_det(az));
        CAPTURE(trial);
        if (det != 0) {
            REQUIRE(snf.rank == static_cast<std::size_t>(n));
            mpz_class prod = 1;
            for (const auto& d : snf.diagonal) prod *= d;
            CHECK(prod == det);
        }
        if (g != 0) CHECK(snf.diagonal.front() == g);
        for (std::size_t i = 1; i < snf.diagonal.size(); ++i)
            CHECK(snf.diagonal[i] % snf.diagonal[i - 1] == 0);
    }
}

TEST_CASE("kernels mod p") {
    const std::uint32_t p = 2147483647u;
    CHECK(kernel_basis_mod_p(SparseIntMatrix::identity(3), p).empty());
    const auto k = kernel_basis_mod_p(dense_to_sparse({{1, -1}}), p);
    REQUIRE(k.size() == 1);
    CHECK(k[0] == std::vector<std::uint32_t>{1, 1});

    const auto holo4 = build_complex(FamilySpec::make(Family::holocolored, 4));
    const auto& top = holo4.boundaries[3];
    const auto basis = kernel_basis_mod_p(top, p);
    CHECK(basis.size() == 3);
    for (const auto& v : basis) {
        std::vector<std::uint64_t> image(top.rows(), 0);
        for (const auto& e : top.entries()) {
            mpz_class r = e.value % p;
            if (r < 0) r += p;
            image[e.row] = (image[e.row] + r.get_ui() * v[e.col]) % p;
        }
        for (auto x : image) CHECK(x == 0);
    }
}
