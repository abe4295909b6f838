#pragma once

#include <cstdint>
#include <random>

namespace qpsr {

/// Identity of one circuit estimation. Every shot-sampled evaluation derives
/// its random stream from (master_seed, tag), so results are bit-reproducible
/// no matter in which order (or on how many threads) evaluations run.
///
/// Field conventions: training uses (epoch, data_index, param_index, shift);
/// the prediction protocol reuses (epoch <- repetition, data_index <- grid
/// point); CMA-ES reuses param_index for the offspring index.
struct EvalTag {
    std::uint64_t epoch = 0;
    std::uint64_t data_index = 0;
    std::uint64_t param_index = 0;
    std::uint64_t shift = 0;
};

/// Values for EvalTag::shift. Distinct tags keep the base, +s, -s and
/// loss-logging estimations on independent streams.
enum class ShiftTag : std::uint64_t {
    GradBase = 0,
    Plus = 1,
    Minus = 2,
    Loss = 3,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed, const EvalTag& tag) noexcept {
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ tag.epoch);
    s = splitmix64(s ^ tag.data_index);
    s = splitmix64(s ^ tag.param_index);
    s = splitmix64(s ^ tag.shift);
    return s;
}

/// Named sub-streams of one master seed, so unrelated consumers (parameter
/// init, training, prediction, ...) never share randomness.
enum class StreamPurpose : std::uint64_t {
    ParamInit = 1,
    TrainAdam = 2,
    TrainCmaes = 3,
    Predict = 4,
    Figure1 = 5,
    Gradcheck = 6,
};

constexpr std::uint64_t derive_substream(std::uint64_t master_seed, StreamPurpose purpose) noexcept {
    return splitmix64(splitmix64(master_seed) ^ static_cast<std::uint64_t>(purpose));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace qpsr
