#pragma once

#include <cstdint>
#include <random>

namespace flowlab
{
    // std::mt19937_64 output is fixed by the standard; the distributions are
    // not, so the mapping to [0,1) is done here.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    private:
        std::mt19937_64 engine_;
    };
} // namespace flowlab
