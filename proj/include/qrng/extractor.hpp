#pragma once

#include <cstdint>
#include <vector>

#include "qrng/simulator.hpp"

namespace qrng {

/// Leftover-hash output sizing: m = max(0, floor(H - 2 log2(1/eps))).
uint64_t output_length(double total_min_entropy_bits, double eps_sec);

/// Shape of one extraction run. The Toeplitz construction needs
/// input_bits + output_bits - 1 seed bits.
struct ExtractorParams {
    uint64_t input_bits = 0;
    uint64_t output_bits = 0;
    double eps_sec = 0.0;

    uint64_t seed_bits() const {
        return output_bits == 0 ? 0 : input_bits + output_bits - 1;
    }
};

/// Streaming GF(2) Toeplitz matrix-vector product. With m output rows and
/// input bit j feeding column j, the matrix entry is
///   T[i][j] = seed[m - 1 + j - i],
/// so the first column runs through seed bits m-1..0 and the first row
/// through seed bits m-1 and up. Seed bytes are consumed most significant
/// bit first. Input bits arrive online (frame by frame); each set input
/// bit XORs one seed window into the output accumulator, which makes the
/// result independent of how the input is blocked.
class ToeplitzExtractor {
public:
    ToeplitzExtractor(uint64_t input_bits, uint64_t output_bits,
                      const std::vector<uint8_t>& seed_bytes);

    void absorb_bit(bool bit);
    /// Absorbs frame bits in pixel order.
    void absorb(const BitString& frame);

    uint64_t input_bits() const { return n_; }
    uint64_t output_bits() const { return m_; }
    uint64_t consumed_bits() const { return consumed_; }

    /// Packed output, most significant bit first, final byte zero padded.
    /// All input bits must have been absorbed.
    std::vector<uint8_t> finish() const;

private:
    uint64_t n_, m_;
    uint64_t consumed_ = 0;
    std::vector<uint64_t> rev_seed_;  // seed reversed, LSB-first words
    std::vector<uint64_t> acc_;
};

struct ExtractResult {
    std::vector<uint8_t> bytes;
    uint64_t bit_count = 0;
    ExtractorParams params;
};

/// Concatenates the batch frames, sizes the output from the certified
/// per-frame min-entropy, and applies the Toeplitz hash.
ExtractResult toeplitz_extract(const FrameBatch& batch, double min_entropy_per_frame,
                               double eps_sec, const std::vector<uint8_t>& seed_bytes);

}  // namespace qrng
