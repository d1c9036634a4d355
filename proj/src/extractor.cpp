#include "qrng/extractor.hpp"

#include <cmath>

#include "qrng/errors.hpp"

namespace qrng {

uint64_t output_length(double total_min_entropy_bits, double eps_sec) {
    if (!(total_min_entropy_bits >= 0.0)) throw param_error("min-entropy must be >= 0");
    if (!(eps_sec > 0.0 && eps_sec < 1.0)) throw param_error("eps_sec must lie in (0, 1)");
    double m = std::floor(total_min_entropy_bits - 2.0 * std::log2(1.0 / eps_sec));
    return m <= 0.0 ? 0 : (uint64_t)m;
}

namespace {

inline bool seed_bit(const std::vector<uint8_t>& bytes, uint64_t t) {
    return (bytes[t >> 3] >> (7 - (t & 7u))) & 1u;
}

}  // namespace

ToeplitzExtractor::ToeplitzExtractor(uint64_t input_bits, uint64_t output_bits,
                                     const std::vector<uint8_t>& seed_bytes)
    : n_(input_bits), m_(output_bits) {
    if (m_ == 0) return;
    uint64_t need = n_ + m_ - 1;
    if (seed_bytes.size() * 8 < need)
        throw param_error("seed too short: need " + std::to_string(need) + " bits");
    // rev_seed_ bit u = seed bit (need - 1 - u); column j of the matrix is
    // then the contiguous window rev_seed_[n-1-j .. n-1-j+m).
    rev_seed_.assign((need + 63) / 64 + 1, 0);
    for (uint64_t u = 0; u < need; ++u)
        if (seed_bit(seed_bytes, need - 1 - u)) rev_seed_[u >> 6] |= 1ull << (u & 63u);
    acc_.assign((m_ + 63) / 64, 0);
}

void ToeplitzExtractor::absorb_bit(bool bit) {
    if (consumed_ >= n_) throw param_error("extractor: more input than declared");
    uint64_t j = consumed_++;
    if (m_ == 0 || !bit) return;
    uint64_t off = n_ - 1 - j;
    uint64_t q = off >> 6;
    unsigned sh = (unsigned)(off & 63u);
    size_t words = acc_.size();
    if (sh == 0) {
        for (size_t w = 0; w < words; ++w) acc_[w] ^= rev_seed_[q + w];
    } else {
        for (size_t w = 0; w < words; ++w)
            acc_[w] ^= (rev_seed_[q + w] >> sh) | (rev_seed_[q + w + 1] << (64 - sh));
    }
}

void ToeplitzExtractor::absorb(const BitString& frame) {
    for (uint32_t i = 0; i < frame.size(); ++i) absorb_bit(frame.get(i));
}

std::vector<uint8_t> ToeplitzExtractor::finish() const {
    if (consumed_ != n_)
        throw param_error("extractor: input incomplete (" + std::to_string(consumed_) +
                          " of " + std::to_string(n_) + " bits)");
    std::vector<uint8_t> out((m_ + 7) / 8, 0);
    for (uint64_t i = 0; i < m_; ++i)
        if ((acc_[i >> 6] >> (i & 63u)) & 1ull) out[i >> 3] |= (uint8_t)(1u << (7 - (i & 7u)));
    return out;
}

ExtractResult toeplitz_extract(const FrameBatch& batch, double min_entropy_per_frame,
                               double eps_sec, const std::vector<uint8_t>& seed_bytes) {
    if (!(min_entropy_per_frame >= 0.0 && min_entropy_per_frame <= (double)batch.pixel_count))
        throw param_error("min-entropy per frame must lie in [0, M]");
    uint64_t input_bits = (uint64_t)batch.frames.size() * batch.pixel_count;
    double total = min_entropy_per_frame * (double)batch.frames.size();
    uint64_t m = output_length(total, eps_sec);
    ToeplitzExtractor ext(input_bits, m, seed_bytes);
    for (const BitString& frame : batch.frames) ext.absorb(frame);
    ExtractResult res;
    res.bytes = ext.finish();
    res.bit_count = m;
    res.params = ExtractorParams{input_bits, m, eps_sec};
    return res;
}

}  // namespace qrng
