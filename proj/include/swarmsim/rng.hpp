#pragma once

#include <cstdint>
#include <random>

namespace swarmsim {

// Single per-run randomness source. Every consumer draws through this wrapper
// so the consumption order is fixed by the simulation pipeline.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }    // N(0, 1)
    double uniform() { return uniform_(gen_); }  // [0, 1)

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace swarmsim
