#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qpsr/rng.hpp"
#include "qpsr/simulator.hpp"

using namespace qpsr;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector ket0() { return StateVector{}; }
StateVector ket1() { return StateVector{{0.0, 0.0}, {1.0, 0.0}}; }

}  // namespace

TEST_CASE("rotation gates act on |0> as expected") {
    SUBCASE("RY(0) is the identity") {
        const auto s = apply_rotation(ket0(), {Axis::Y, 0.0});
        CHECK(s.amp0 == std::complex<double>{1.0, 0.0});
        CHECK(s.amp1 == std::complex<double>{0.0, 0.0});
    }
    SUBCASE("RY(pi) maps |0> to |1> up to sign") {
        const auto s = apply_rotation(ket0(), {Axis::Y, kPi});
        CHECK(std::abs(s.amp0) < 1e-12);
        CHECK(std::abs(s.amp1 - std::complex<double>{1.0, 0.0}) < 1e-12);
    }
    SUBCASE("RZ acts as a phase on |0>, <Z> stays +1") {
        const double phi = 1.234;
        const auto s = apply_rotation(ket0(), {Axis::Z, phi});
        CHECK(std::abs(s.amp0 - std::exp(std::complex<double>{0.0, -phi / 2})) < 1e-15);
        CHECK(std::abs(s.amp1) == 0.0);
        CHECK(std::abs(exact_expectation_z(s) - 1.0) < 1e-12);
    }
    SUBCASE("RX(pi) maps |0> to -i|1>") {
        const auto s = apply_rotation(ket0(), {Axis::X, kPi});
        CHECK(std::abs(s.amp0) < 1e-12);
        CHECK(std::abs(s.amp1 - std::complex<double>{0.0, -1.0}) < 1e-12);
    }
}

TEST_CASE("gate matrices are unitary") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
    for (const Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
        for (int i = 0; i < 50; ++i) {
            const auto m = gate_matrix({axis, angle(rng)});
            // rows of M^dagger M
            const auto c00 = std::conj(m[0]) * m[0] + std::conj(m[2]) * m[2];
            const auto c01 = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
            const auto c11 = std::conj(m[1]) * m[1] + std::conj(m[3]) * m[3];
            CHECK(std::abs(c00 - 1.0) < 1e-12);
            CHECK(std::abs(c01) < 1e-12);
            CHECK(std::abs(c11 - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("exact_expectation_z on basis and superposition states") {
    CHECK(exact_expectation_z(ket0()) == 1.0);
    CHECK(exact_expectation_z(ket1()) == -1.0);
    const auto plus = apply_rotation(ket0(), {Axis::Y, kPi / 2});
    CHECK(std::abs(exact_expectation_z(plus)) < 1e-12);
}

TEST_CASE("RY expectation law: <Z> = cos(theta)") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
    for (int i = 0; i < 100; ++i) {
        const double theta = angle(rng);
        const auto s = apply_rotation(ket0(), {Axis::Y, theta});
        CHECK(std::abs(exact_expectation_z(s) - std::cos(theta)) < 1e-12);
    }
}

TEST_CASE("norm is conserved over long random gate sequences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
    std::uniform_int_distribution<int> axis(0, 2);
    for (int trial = 0; trial < 5; ++trial) {
        StateVector s = ket0();
        for (int i = 0; i < 1000; ++i) {
            s = apply_rotation(s, {static_cast<Axis>(axis(rng)), angle(rng)});
        }
        CHECK(std::abs(s.norm_sq() - 1.0) <= 1e-10);
    }
}

TEST_CASE("sample_counts handles deterministic and binomial regimes") {
    std::mt19937_64 rng(41);
    SUBCASE("probability-1 outcomes") {
        auto r = sample_counts(ket0(), 1024, rng);
        CHECK(r.n0 == 1024);
        CHECK(r.n1 == 0);
        r = sample_counts(ket1(), 100, rng);
        CHECK(r.n0 == 0);
        CHECK(r.n1 == 100);
    }
    SUBCASE("n_shots = 0 is rejected") {
        CHECK_THROWS_AS(sample_counts(ket0(), 0, rng), std::invalid_argument);
    }
    SUBCASE("balanced state concentrates near 1/2 at large n_shots") {
        const auto plus = apply_rotation(ket0(), {Axis::Y, kPi / 2});
        const auto r = sample_counts(plus, 1000000, rng);
        const double frac = static_cast<double>(r.n0) / static_cast<double>(r.n_shots);
        CHECK(frac >= 0.498);
        CHECK(frac <= 0.502);
        CHECK(r.n0 + r.n1 == r.n_shots);
    }
}

TEST_CASE("estimate_b arithmetic") {
    CHECK(estimate_b({768, 256, 1024}) == 0.5);
    CHECK(estimate_b({1024, 0, 1024}) == 1.0);
    CHECK(estimate_b({512, 512, 1024}) == 0.0);
}

TEST_CASE("shot estimator is unbiased with binomial spread") {
    const double theta = 0.8;
    const auto s = apply_rotation(ket0(), {Axis::Y, theta});
    const double exact = exact_expectation_z(s);
    const int n_shots = 1024;
    const int reps = 1000;

    double sum = 0.0;
    std::vector<double> values;
    values.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        auto rng = make_engine(derive_stream_seed(777, EvalTag{static_cast<std::uint64_t>(i), 0, 0, 0}));
        const double b = estimate_b(sample_counts(s, n_shots, rng));
        values.push_back(b);
        sum += b;
    }
    const double mean = sum / reps;
    const double sigma = std::sqrt((1.0 - exact * exact) / n_shots);
    CHECK(std::abs(mean - exact) <= 5.0 * sigma / std::sqrt(static_cast<double>(reps)));

    double ss = 0.0;
    for (const double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (reps - 1));
    CHECK(std::abs(sd - sigma) <= 0.20 * sigma);
}

TEST_CASE("identical seeds reproduce identical counts") {
    const auto s = apply_rotation(ket0(), {Axis::Y, 1.1});
    auto rng_a = make_engine(derive_stream_seed(5, EvalTag{1, 2, 3, 4}));
    auto rng_b = make_engine(derive_stream_seed(5, EvalTag{1, 2, 3, 4}));
    const auto a = sample_counts(s, 4096, rng_a);
    const auto b = sample_counts(s, 4096, rng_b);
    CHECK(a.n0 == b.n0);
    CHECK(a.n1 == b.n1);

    auto rng_c = make_engine(derive_stream_seed(5, EvalTag{1, 2, 3, 5}));
    const auto c = sample_counts(s, 4096, rng_c);
    CHECK(c.n0 != a.n0);  // different shift tag, different stream
}
