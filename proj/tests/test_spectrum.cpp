#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lyap/spectrum.hpp"

using namespace lyap;

namespace {

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

Matrix random_invertible(int m, Rng& rng) {
    while (true) {
        Matrix M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) M(i, j) = rng.uniform(-2.0, 2.0);
        if (std::abs(M.determinant()) > 0.05) return M;
    }
}

Matrix diag2(double a, double d) {
    Matrix M(2, 2);
    M << a, 0, 0, d;
    return M;
}

MatrixCocycle diagonal_example() {
    return MatrixCocycle(2, {diag2(2.0, 0.5), Matrix::Identity(2, 2)});
}

} // namespace

TEST_CASE("diagonal spectrum at the fixed point") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    const auto sp = periodic_spectrum(diagonal_example(), {0}, full);
    REQUIRE(sp.blocks.size() == 2);
    CHECK(sp.blocks[0].chi == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(sp.blocks[0].multiplicity == 1);
    CHECK(sp.blocks[1].chi == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(sp.max_exponent() == doctest::Approx(std::log(2.0)));
    REQUIRE(sp.second_exponent());
    CHECK(*sp.second_exponent() == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("rotation-coupled word has one zero block") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Matrix R(2, 2);
    R << 0, -1, 1, 0;
    const MatrixCocycle A(2, {diag2(2.0, 0.5), R});
    const auto sp = periodic_spectrum(A, {0, 1}, full);
    REQUIRE(sp.blocks.size() == 1);
    CHECK(sp.blocks[0].chi == doctest::Approx(0.0));
    CHECK(sp.blocks[0].multiplicity == 2);
    CHECK_FALSE(sp.second_exponent());
}

TEST_CASE("identity cocycle spectrum") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    const MatrixCocycle I3(3, {Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
    const auto sp = periodic_spectrum(I3, {0, 1, 1}, full);
    REQUIRE(sp.blocks.size() == 1);
    CHECK(sp.blocks[0].chi == doctest::Approx(0.0));
    CHECK(sp.blocks[0].multiplicity == 3);
}

TEST_CASE("illegal word refused") {
    const ShiftSpace gm(2, {{1, 1}, {1, 0}});
    CHECK_THROWS_AS(periodic_spectrum(diagonal_example(), {1, 1}, gm), IllegalWord);
    // internally fine but the wrap-around 1 -> 1 is forbidden
    CHECK_THROWS_AS(periodic_spectrum(diagonal_example(), {1}, gm), IllegalWord);
    CHECK(periodic_spectrum(diagonal_example(), {0, 0, 1}, gm).total_dimension() == 2);
}

TEST_CASE("determinant identity over random cocycles") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Rng rng(101);
    for (int t = 0; t < 100; ++t) {
        const int m = 2 + rng.below(3); // m <= 4
        const MatrixCocycle A(m, {random_invertible(m, rng), random_invertible(m, rng)});
        const int p = 1 + rng.below(6);
        Word w;
        for (int i = 0; i < p; ++i) w.push_back(rng.below(2));
        LyapunovSpectrum sp;
        try {
            sp = periodic_spectrum(A, w, full);
        } catch (const ClusteredSpectrum&) {
            continue; // honest refusal on near-ties is allowed
        }
        CHECK(sp.total_dimension() == m);
        Matrix P = Matrix::Identity(m, m);
        const ShiftPoint x = periodic_point(w, full);
        for (int i = 0; i < p; ++i) P = A.generator(x.at(i)) * P;
        const double det_rate = std::log(std::abs(P.determinant())) / p;
        CHECK(sp.sum_all() == doctest::Approx(det_rate).epsilon(1e-10));
    }
}

TEST_CASE("exterior power law over random cocycles") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Rng rng(211);
    for (int t = 0; t < 40; ++t) {
        const int m = 2 + rng.below(3);
        const MatrixCocycle A(m, {random_invertible(m, rng), random_invertible(m, rng)});
        Word w;
        const int p = 1 + rng.below(4);
        for (int i = 0; i < p; ++i) w.push_back(rng.below(2));
        try {
            const auto sp = periodic_spectrum(A, w, full);
            for (int i = 1; i <= m; ++i) {
                const auto spi = periodic_spectrum(exterior_power(A, i), w, full);
                CHECK(spi.max_exponent() == doctest::Approx(sp.top_sum(i)).epsilon(1e-9));
            }
        } catch (const ClusteredSpectrum&) {
            continue;
        }
    }
}

TEST_CASE("top exponent of the second compound for diag(3,2,1/6)") {
    const ShiftSpace full = ShiftSpace::full_shift(1);
    Matrix D = Matrix::Zero(3, 3);
    D(0, 0) = 3;
    D(1, 1) = 2;
    D(2, 2) = 1.0 / 6.0;
    const MatrixCocycle A(3, {D});
    const auto sp2 = periodic_spectrum(exterior_power(A, 2), {0}, full);
    CHECK(sp2.max_exponent() == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("spectrum invariant under cyclic word rotation") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Rng rng(307);
    Matrix R(2, 2);
    R << 0.3, -1.1, 0.9, 0.4;
    const MatrixCocycle A(2, {diag2(2.0, 0.5), R});
    const Word w{0, 1, 1, 0, 1};
    const auto base = periodic_spectrum(A, w, full);
    for (std::size_t r = 1; r < w.size(); ++r) {
        Word rot(w.begin() + static_cast<long>(r), w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(r));
        CHECK(periodic_spectrum(A, rot, full).same_as(base, 1e-10));
    }
}

TEST_CASE("clustered spectrum is refused, exact ties are merged") {
    const ShiftSpace full = ShiftSpace::full_shift(1);
    // moduli 1 and 1 + 3e-9: inside the ambiguity band (1e-9, 1e-8)
    const double mu = std::exp(3e-9);
    CHECK_THROWS_AS(periodic_spectrum(MatrixCocycle(2, {diag2(1.0, mu)}), {0}, full),
                    ClusteredSpectrum);
    // exact tie merges into multiplicity 2
    const auto sp = periodic_spectrum(MatrixCocycle(2, {diag2(2.0, -2.0)}), {0}, full);
    REQUIRE(sp.blocks.size() == 1);
    CHECK(sp.blocks[0].multiplicity == 2);
    CHECK(sp.blocks[0].chi == doctest::Approx(std::log(2.0)));
}

TEST_CASE("QR re-orthonormalized long run agrees with periodic spectrum") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Matrix G0(2, 2), G1(2, 2);
    G0 << 1.5, 0.4, 0.2, 0.9;
    G1 << 0.8, -0.3, 0.5, 1.2;
    const MatrixCocycle A(2, {G0, G1});
    const Word w{0, 1, 1};
    const auto sp = periodic_spectrum(A, w, full);
    const auto chis = sp.expanded_decreasing();

    // Benettin-style QR sweep over k = 1e4 periods
    const ShiftPoint x = periodic_point(w, full);
    const int m = 2;
    Matrix Q = Matrix::Identity(m, m);
    Vector sums = Vector::Zero(m);
    const long long k = 10000;
    const long long total = k * static_cast<long long>(w.size());
    for (long long i = 0; i < total; ++i) {
        Matrix W = A.generator(x.at(i)) * Q;
        Eigen::HouseholderQR<Matrix> qr(W);
        Q = qr.householderQ() * Matrix::Identity(m, m);
        Matrix Rm = Q.transpose() * W;
        for (int j = 0; j < m; ++j) sums(j) += std::log(std::abs(Rm(j, j)));
    }
    for (int j = 0; j < m; ++j)
        CHECK(sums(j) / static_cast<double>(total) ==
              doctest::Approx(chis[static_cast<std::size_t>(j)]).epsilon(1e-3));
}

TEST_CASE("Oseledec splitting of the diagonal example") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    const auto split = oseledec_splitting_periodic(diagonal_example(), {0}, full);
    REQUIRE(split.block_count() == 2);
    // block 0 = chi = -log2 -> e2, block 1 = chi = log2 -> e1
    CHECK(std::abs(split.bases[0][0](1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(split.bases[0][1](0, 0)) == doctest::Approx(1.0));
    CHECK(split.stacked(0).cols() == 2);
}

TEST_CASE("Oseledec splitting of the triangular example") {
    const ShiftSpace full = ShiftSpace::full_shift(1);
    Matrix T(2, 2);
    T << 2, 1, 0, 0.5;
    const auto split = oseledec_splitting_periodic(MatrixCocycle(2, {T}), {0}, full);
    REQUIRE(split.block_count() == 2);
    // eigenvector for 1/2 solves (T - I/2)v = 0: direction (-2/3, 1) normalized
    Vector slow = split.bases[0][0].col(0);
    if (slow(1) < 0) slow = -slow;
    CHECK(slow(0) / slow(1) == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
    // fast space is the eigenvector for 2: e1
    CHECK(std::abs(split.bases[0][1](0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("splitting equivariance along random periodic orbits") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Rng rng(409);
    int tested = 0;
    while (tested < 15) {
        const int m = 2 + rng.below(2);
        const MatrixCocycle A(m, {random_invertible(m, rng), random_invertible(m, rng)});
        Word w;
        const int p = 1 + rng.below(4);
        for (int i = 0; i < p; ++i) w.push_back(rng.below(2));
        OseledecSplitting split;
        try {
            split = oseledec_splitting_periodic(A, w, full);
        } catch (const ClusteredSpectrum&) {
            continue;
        }
        ++tested;
        const ShiftPoint x = periodic_point(w, full);
        for (int j = 0; j < p; ++j) {
            for (int b = 0; b < split.block_count(); ++b) {
                const Matrix img = A.generator(x.at(j)) * split.bases[j][b];
                Eigen::HouseholderQR<Matrix> qr(img);
                const Matrix Q =
                    qr.householderQ() * Matrix::Identity(m, static_cast<int>(img.cols()));
                const int jn = (j + 1) % p;
                CHECK(principal_angle(Q, split.bases[jn][b]) < 1e-8);
            }
            // direct sum: stacked basis invertible
            CHECK(std::abs(split.stacked(j).determinant()) > 1e-10);
        }
    }
}

TEST_CASE("splitting growth rates") {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Matrix T(2, 2);
    T << 2, 1, 0, 0.5;
    const MatrixCocycle A(2, {T, Matrix::Identity(2, 2)});
    const Word w{0, 1};
    const auto split = oseledec_splitting_periodic(A, w, full);
    const ShiftPoint x = periodic_point(w, full);
    const long long n = 2 * 2000;
    for (int b = 0; b < split.block_count(); ++b) {
        const Vector v = split.bases[0][b].col(0);
        const double rate = finite_time_vector_exponent(A, x, v, n);
        CHECK(rate == doctest::Approx(split.spectrum.blocks[b].chi).epsilon(5e-3));
    }
}

TEST_CASE("principal angle basics") {
    Matrix U(3, 1), V(3, 1), W(3, 1);
    U << 1, 0, 0;
    V << 0, 1, 0;
    W << 1, 0, 0;
    CHECK(principal_angle(U, V) == doctest::Approx(M_PI / 2));
    CHECK(principal_angle(U, W) == doctest::Approx(0.0));
}
