#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "qrng/errors.hpp"

namespace qrng {

/// Fixed-length bit vector. Bit i lives at byte i/8, bit position i%8 with
/// bit 0 least significant, identical to the on-disk frame layout, so a
/// frame round-trips by copying bytes. Padding bits stay zero.
class BitString {
public:
    BitString() = default;
    explicit BitString(uint32_t bit_count)
        : size_(bit_count), bytes_((bit_count + 7) / 8, 0) {}

    static BitString from_bits(std::initializer_list<int> bits) {
        BitString b((uint32_t)bits.size());
        uint32_t i = 0;
        for (int v : bits) b.set(i++, v != 0);
        return b;
    }

    /// Lexicographic index with pixel 0 as the most significant bit.
    static BitString from_index(uint64_t index, uint32_t bit_count) {
        if (bit_count > 63) throw param_error("BitString::from_index: width > 63");
        BitString b(bit_count);
        for (uint32_t i = 0; i < bit_count; ++i)
            b.set(i, (index >> (bit_count - 1 - i)) & 1u);
        return b;
    }

    uint64_t to_index() const {
        if (size_ > 63) throw param_error("BitString::to_index: width > 63");
        uint64_t v = 0;
        for (uint32_t i = 0; i < size_; ++i)
            if (get(i)) v |= 1ull << (size_ - 1 - i);
        return v;
    }

    uint32_t size() const { return size_; }

    bool get(uint32_t i) const { return (bytes_[i >> 3] >> (i & 7u)) & 1u; }

    void set(uint32_t i, bool v) {
        uint8_t mask = (uint8_t)(1u << (i & 7u));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= (uint8_t)~mask;
    }

    uint32_t popcount() const {
        uint32_t c = 0;
        for (uint8_t b : bytes_) c += (uint32_t)std::popcount(b);
        return c;
    }

    const std::vector<uint8_t>& bytes() const { return bytes_; }
    std::vector<uint8_t>& bytes() { return bytes_; }

    bool operator==(const BitString&) const = default;

private:
    uint32_t size_ = 0;
    std::vector<uint8_t> bytes_;
};

}  // namespace qrng
