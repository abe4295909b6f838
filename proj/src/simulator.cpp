#include "qpsr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpsr {

std::array<std::complex<double>, 4> gate_matrix(const RotationGate& gate) {
    const double half = 0.5 * gate.angle;
    const double c = std::cos(half);
    const double s = std::sin(half);
    using cd = std::complex<double>;
    switch (gate.axis) {
    case Axis::X:
        return {cd(c, 0.0), cd(0.0, -s), cd(0.0, -s), cd(c, 0.0)};
    case Axis::Y:
        return {cd(c, 0.0), cd(-s, 0.0), cd(s, 0.0), cd(c, 0.0)};
    case Axis::Z:
        return {cd(c, -s), cd(0.0, 0.0), cd(0.0, 0.0), cd(c, s)};
    }
    throw std::logic_error("unknown rotation axis");
}

StateVector apply_rotation(const StateVector& state, const RotationGate& gate) {
    const auto m = gate_matrix(gate);
    return StateVector{
        m[0] * state.amp0 + m[1] * state.amp1,
        m[2] * state.amp0 + m[3] * state.amp1,
    };
}

double exact_expectation_z(const StateVector& state) {
    return std::norm(state.amp0) - std::norm(state.amp1);
}

MeasurementResult sample_counts(const StateVector& state, std::int64_t n_shots, std::mt19937_64& rng) {
    if (n_shots < 1) {
        throw std::invalid_argument("sample_counts: n_shots must be >= 1");
    }
    const double p0 = std::clamp(state.prob0(), 0.0, 1.0);
    std::binomial_distribution<std::int64_t> binom(n_shots, p0);
    const std::int64_t n0 = binom(rng);
    return MeasurementResult{n0, n_shots - n0, n_shots};
}

double estimate_b(const MeasurementResult& result) {
    return static_cast<double>(result.n0 - result.n1) / static_cast<double>(result.n_shots);
}

}  // namespace qpsr
