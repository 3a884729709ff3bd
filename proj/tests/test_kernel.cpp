#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "fairsel/errors.hpp"
#include "fairsel/kernel.hpp"
#include "fairsel/rng.hpp"

using namespace fairsel;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
    return m;
}

GramMatrix random_psd(Eigen::Index n, std::uint64_t seed) {
    const Eigen::MatrixXd b = random_matrix(n + 2, n, seed);
    Eigen::MatrixXd k = b.transpose() * b;
    k = 0.5 * (k + k.transpose());
    return {k, std::nullopt};
}

// Brute-force median of pairwise distances, independent of the library path.
double median_distance_oracle(const Eigen::MatrixXd& data) {
    std::vector<double> dists;
    for (Eigen::Index i = 0; i < data.cols(); ++i)
        for (Eigen::Index j = i + 1; j < data.cols(); ++j)
            dists.push_back((data.col(i) - data.col(j)).norm());
    std::sort(dists.begin(), dists.end());
    const std::size_t h = dists.size() / 2;
    return dists.size() % 2 ? dists[h] : 0.5 * (dists[h - 1] + dists[h]);
}

}  // namespace

TEST_CASE("resolve_bandwidth") {
    SUBCASE("single pair at distance 2") {
        Eigen::MatrixXd data(1, 2);
        data << 0.0, 2.0;
        CHECK(resolve_bandwidth(data) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("coincident points fall back to 1") {
        Eigen::MatrixXd data = Eigen::MatrixXd::Constant(3, 4, 0.7);
        CHECK(resolve_bandwidth(data) == 1.0);
    }
    SUBCASE("matches exhaustive median over all pairs") {
        const Eigen::MatrixXd data = random_matrix(3, 5, 1);
        CHECK(resolve_bandwidth(data) == doctest::Approx(median_distance_oracle(data)).epsilon(1e-14));
    }
    SUBCASE("rejects a single instance") {
        CHECK_THROWS_AS(resolve_bandwidth(Eigen::MatrixXd::Zero(3, 1)), DataError);
    }
}

TEST_CASE("gram") {
    const Eigen::MatrixXd data = random_matrix(4, 8, 2);

    SUBCASE("rbf diagonal is exactly one") {
        const GramMatrix k = gram(data, KernelSpec::rbf_median());
        CHECK(k.values.diagonal().isOnes(0.0));
        CHECK(k.bandwidth_used.has_value());
    }
    SUBCASE("flat-kernel limit at huge bandwidth") {
        const GramMatrix k = gram(data, KernelSpec::rbf_fixed(1e6));
        CHECK((k.values.array() - 1.0).abs().maxCoeff() < 1e-6);
    }
    SUBCASE("linear kernel on orthogonal columns") {
        Eigen::MatrixXd ortho = Eigen::MatrixXd::Identity(3, 3) * 2.0;
        const GramMatrix k = gram(ortho, KernelSpec::linear());
        CHECK(k.values(0, 1) == 0.0);
        CHECK(k.values(1, 2) == 0.0);
        CHECK(k.values(0, 0) == doctest::Approx(4.0));
    }
    SUBCASE("exact symmetry") {
        const GramMatrix k = gram(data, KernelSpec::rbf_median());
        CHECK((k.values - k.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("positive semidefinite within tolerance") {
        for (std::uint64_t seed : {3, 4, 5}) {
            const Eigen::MatrixXd x = random_matrix(5, 10, seed);
            for (const auto& spec : {KernelSpec::rbf_median(), KernelSpec::linear()}) {
                const GramMatrix k = gram(x, spec);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.values);
                CHECK(es.eigenvalues().minCoeff() >= -1e-8 * static_cast<double>(k.n()));
            }
        }
    }
    SUBCASE("rejects non-finite input") {
        Eigen::MatrixXd bad = data;
        bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(gram(bad, KernelSpec::rbf_median()), NumericError);
    }
}

TEST_CASE("center") {
    SUBCASE("annihilates the all-ones kernel") {
        const GramMatrix ones{Eigen::MatrixXd::Ones(5, 5), std::nullopt};
        CHECK(center(ones).values.cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("identity at n=2") {
        const GramMatrix eye{Eigen::MatrixXd::Identity(2, 2), std::nullopt};
        const Eigen::MatrixXd c = center(eye).values;
        CHECK(c(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(c(1, 0) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(c(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("idempotent") {
        const GramMatrix k = random_psd(7, 6);
        const GramMatrix once = center(k);
        const GramMatrix twice = center(once);
        CHECK((twice.values - once.values).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("row and column sums vanish") {
        const GramMatrix k = random_psd(9, 7);
        const Eigen::MatrixXd c = center(k).values;
        CHECK(c.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10 * 9);
        CHECK(c.colwise().sum().cwiseAbs().maxCoeff() < 1e-10 * 9);
    }
    SUBCASE("linear operator") {
        const GramMatrix k1 = random_psd(6, 8);
        const GramMatrix k2 = random_psd(6, 9);
        const double a = 1.7, b = -0.4;
        const GramMatrix combo{a * k1.values + b * k2.values, std::nullopt};
        const Eigen::MatrixXd lhs = center(combo).values;
        const Eigen::MatrixXd rhs = a * center(k1).values + b * center(k2).values;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("centered_alignment") {
    SUBCASE("identity kernels give n-1") {
        for (Eigen::Index n = 2; n <= 10; ++n) {
            const GramMatrix eye{Eigen::MatrixXd::Identity(n, n), std::nullopt};
            CHECK(centered_alignment(eye, eye) ==
                  doctest::Approx(static_cast<double>(n - 1)).epsilon(1e-12));
        }
    }
    SUBCASE("constant kernel aligns with nothing") {
        const GramMatrix k = random_psd(6, 10);
        const GramMatrix ones{Eigen::MatrixXd::Ones(6, 6), std::nullopt};
        CHECK(std::abs(centered_alignment(k, ones)) < 1e-10);
    }
    SUBCASE("matches explicit H K1 H K2 trace") {
        const GramMatrix k1 = random_psd(6, 3);
        const GramMatrix k2 = random_psd(6, 4);
        const Eigen::MatrixXd h =
            Eigen::MatrixXd::Identity(6, 6) - Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0);
        const double expected = (h * k1.values * h * k2.values).trace();
        CHECK(centered_alignment(k1, k2) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("symmetric in its arguments") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const GramMatrix k1 = random_psd(8, 100 + seed);
            const GramMatrix k2 = random_psd(8, 200 + seed);
            CHECK(centered_alignment(k1, k2) ==
                  doctest::Approx(centered_alignment(k2, k1)).epsilon(1e-10));
        }
    }
    SUBCASE("invariant to constant shifts") {
        const GramMatrix k1 = random_psd(7, 11);
        const GramMatrix k2 = random_psd(7, 12);
        const double base = centered_alignment(k1, k2);
        const GramMatrix shifted{k1.values + Eigen::MatrixXd::Constant(7, 7, 3.25), std::nullopt};
        CHECK(centered_alignment(shifted, k2) == doctest::Approx(base).epsilon(1e-8));
        const GramMatrix shifted2{k2.values + Eigen::MatrixXd::Constant(7, 7, -1.5), std::nullopt};
        CHECK(centered_alignment(k1, shifted2) == doctest::Approx(base).epsilon(1e-8));
    }
    SUBCASE("self-alignment is non-negative") {
        const GramMatrix k = random_psd(6, 13);
        CHECK(centered_alignment(k, k) >= -1e-10);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(centered_alignment(random_psd(4, 1), random_psd(5, 2)), DataError);
    }
}
