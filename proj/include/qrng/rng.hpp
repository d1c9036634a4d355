#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qrng {

/// Keying for reproducible simulation. Identical (seed, stream_id) always
/// reproduces identical batches bit for bit, independent of thread count.
struct SimSeed {
    uint64_t seed = 0;
    uint64_t stream_id = 0;
};

/// Philox-style 4x64 counter block function, 10 rounds. Stateless: the
/// output is a pure function of (counter, key), which is what makes
/// per-frame streams independent and order-free.
inline std::array<uint64_t, 4> philox4x64(std::array<uint64_t, 4> ctr,
                                          std::array<uint64_t, 2> key) {
    constexpr uint64_t MUL0 = 0xD2E7470EE14C6C93ull;
    constexpr uint64_t MUL1 = 0xCA5A826395121157ull;
    constexpr uint64_t WEYL0 = 0x9E3779B97F4A7C15ull;
    constexpr uint64_t WEYL1 = 0xBB67AE8584CAA73Bull;
    for (int round = 0; round < 10; ++round) {
        unsigned __int128 p0 = (unsigned __int128)MUL0 * ctr[0];
        unsigned __int128 p1 = (unsigned __int128)MUL1 * ctr[2];
        uint64_t hi0 = (uint64_t)(p0 >> 64), lo0 = (uint64_t)p0;
        uint64_t hi1 = (uint64_t)(p1 >> 64), lo1 = (uint64_t)p1;
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += WEYL0;
        key[1] += WEYL1;
    }
    return ctr;
}

/// Draw stream for one frame: counter = (frame index, block index), key =
/// (seed, stream id).
class FrameRng {
public:
    FrameRng(SimSeed s, uint64_t frame_index)
        : key_{s.seed, s.stream_id}, frame_(frame_index) {}

    uint64_t next_u64() {
        if (have_ == 0) {
            buf_ = philox4x64({frame_, block_++, 0, 0}, key_);
            have_ = 4;
        }
        return buf_[4 - have_--];
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform in [0, modulus) by multiply-shift.
    uint32_t uniform_index(uint32_t modulus) {
        return (uint32_t)(((unsigned __int128)next_u64() * modulus) >> 64);
    }

    /// Poisson draw by inversion counting, split into chunks with mean <= 30
    /// so exp(-chunk) never underflows. The chunk sum is again Poisson.
    uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        unsigned chunks = (unsigned)(mean / 30.0) + 1;
        double part = mean / chunks;
        double limit = std::exp(-part);
        uint64_t total = 0;
        for (unsigned c = 0; c < chunks; ++c) {
            double prod = 1.0;
            uint64_t k = 0;
            do {
                ++k;
                prod *= uniform();
            } while (prod > limit);
            total += k - 1;
        }
        return total;
    }

private:
    std::array<uint64_t, 2> key_;
    uint64_t frame_;
    uint64_t block_ = 0;
    std::array<uint64_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace qrng
