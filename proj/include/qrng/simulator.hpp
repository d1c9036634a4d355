#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrng/bitstring.hpp"
#include "qrng/detector_model.hpp"
#include "qrng/rng.hpp"

namespace qrng {

/// Side information recorded with a frame: the emitted photon number and
/// the activation pattern the adversary chose.
struct SideRecord {
    uint32_t photon_count = 0;
    BitString status;
};

struct FrameBatch {
    uint32_t pixel_count = 0;
    std::vector<BitString> frames;
    std::optional<std::vector<SideRecord>> side_info;
};

/// Full adversarial model, one frame per index: draw the activation pattern
/// by independent Bernoulli(eta_i), draw the photon number from the source
/// law, route each photon uniformly to one of the M pixels, and set
/// x_i = 1 iff pixel i is active and received at least one photon.
FrameBatch simulate_frames(const DetectorArrayModel& model, const SourceModel& source,
                           uint64_t count, SimSeed seed, bool record_side_info);

struct PixelStat {
    double p1;
    double std_error;
    uint64_t hits;
};

/// Per-pixel detection frequency with the binomial standard error.
std::vector<PixelStat> empirical_bit_prob(const FrameBatch& batch);

struct GuessRate {
    double frequency;
    double std_error;
    uint64_t hits;
    uint64_t trials;
};

/// Plays the optimal guessing strategy: per trial the adversary sees (n, s),
/// bets on the lexicographically first outcome with the maximizing detection
/// count on the active pixels, and is scored on an exact string match. The
/// success frequency estimates the guessing probability. Guard: M <= 12.
GuessRate empirical_guess_rate(const DetectorArrayModel& model, const SourceModel& source,
                               uint64_t trials, SimSeed seed);

}  // namespace qrng
