#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>

namespace qpsr {

enum class Axis { X, Y, Z };

/// Rotation about a Pauli axis. The generator is sigma_axis / 2 (half-angle
/// convention), so the matrix is exp(-i * angle * sigma_axis / 2) and the
/// generator eigenvalues are +-1/2. The shift-rule constants r = 1/2 and
/// s = pi/2 depend on exactly this convention.
struct RotationGate {
    Axis axis = Axis::Y;
    double angle = 0.0;  // radians
};

/// Single-qubit state: amplitudes of |0> and |1>.
struct StateVector {
    std::complex<double> amp0{1.0, 0.0};
    std::complex<double> amp1{0.0, 0.0};

    double norm_sq() const { return std::norm(amp0) + std::norm(amp1); }
    double prob0() const { return std::norm(amp0); }
    double prob1() const { return std::norm(amp1); }
};

/// Z-basis measurement counts from one batch of shots.
struct MeasurementResult {
    std::int64_t n0 = 0;
    std::int64_t n1 = 0;
    std::int64_t n_shots = 0;
};

/// Column-major-free 2x2 matrix {m00, m01, m10, m11}.
std::array<std::complex<double>, 4> gate_matrix(const RotationGate& gate);

StateVector apply_rotation(const StateVector& state, const RotationGate& gate);

/// <Z> = |amp0|^2 - |amp1|^2, i.e. Prob(|0>) - Prob(|1>) in the exact limit.
double exact_expectation_z(const StateVector& state);

/// Draws n0 ~ Binomial(n_shots, |amp0|^2) from the given stream. One batched
/// draw is distributionally identical to n_shots Bernoulli measurements.
/// Throws std::invalid_argument when n_shots < 1.
MeasurementResult sample_counts(const StateVector& state, std::int64_t n_shots, std::mt19937_64& rng);

/// Shot estimator of <Z>: (n0 - n1) / n_shots.
double estimate_b(const MeasurementResult& result);

}  // namespace qpsr
