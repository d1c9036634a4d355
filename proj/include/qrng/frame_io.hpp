#pragma once

#include <optional>
#include <string>

#include "qrng/simulator.hpp"

namespace qrng {

/// On-disk layout (all integers little-endian):
///   frames file:  magic "QRNGFRM1" | u32 M | u64 frame count |
///                 frames in order, ceil(M/8) bytes each, pixel i at byte
///                 i/8 bit i%8 (bit 0 least significant), padding bits zero.
///   side file:    magic "QRNGSIDE" | u32 M | u64 frame count |
///                 per frame u32 photon count followed by the status bitmap
///                 in the same packing.
void write_frames(const FrameBatch& batch, const std::string& frames_path,
                  const std::optional<std::string>& side_path = {});

FrameBatch read_frames(const std::string& frames_path,
                       const std::optional<std::string>& side_path = {});

}  // namespace qrng
