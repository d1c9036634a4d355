#include "qrng/simulator.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "qrng/conditional.hpp"
#include "qrng/errors.hpp"

namespace qrng {

namespace {

// One frame worth of randomness, in a fixed draw order: status bits first,
// then the photon number, then one routing draw per photon.
void draw_frame(FrameRng& g, const DetectorArrayModel& model, const SourceModel& source,
                BitString& status, uint64_t& photons, std::vector<uint8_t>& hit_bytes) {
    uint32_t M = model.pixel_count();
    for (uint32_t i = 0; i < M; ++i) status.set(i, g.bernoulli(model.eta_at(i)));
    photons = source.kind == SourceModel::Kind::fixed ? source.n_fixed
                                                      : g.poisson(source.mu_total);
    std::fill(hit_bytes.begin(), hit_bytes.end(), 0);
    for (uint64_t p = 0; p < photons; ++p) {
        uint32_t i = g.uniform_index(M);
        hit_bytes[i >> 3] |= (uint8_t)(1u << (i & 7u));
    }
}

}  // namespace

FrameBatch simulate_frames(const DetectorArrayModel& model, const SourceModel& source,
                           uint64_t count, SimSeed seed, bool record_side_info) {
    if (count < 1) throw param_error("simulate_frames: count must be >= 1");
    uint32_t M = model.pixel_count();
    FrameBatch batch;
    batch.pixel_count = M;
    batch.frames.assign(count, BitString(M));
    if (record_side_info)
        batch.side_info.emplace(count, SideRecord{0, BitString(M)});

    size_t nbytes = (M + 7) / 8;
#pragma omp parallel
    {
        BitString status(M);
        std::vector<uint8_t> hits(nbytes);
        uint64_t photons = 0;
#pragma omp for schedule(static)
        for (int64_t f = 0; f < (int64_t)count; ++f) {
            FrameRng g(seed, (uint64_t)f);
            draw_frame(g, model, source, status, photons, hits);
            BitString& x = batch.frames[(size_t)f];
            for (size_t b = 0; b < nbytes; ++b)
                x.bytes()[b] = (uint8_t)(status.bytes()[b] & hits[b]);
            if (record_side_info) {
                auto& rec = (*batch.side_info)[(size_t)f];
                rec.photon_count = (uint32_t)photons;
                rec.status = status;
            }
        }
    }
    return batch;
}

std::vector<PixelStat> empirical_bit_prob(const FrameBatch& batch) {
    if (batch.frames.empty()) throw param_error("empirical_bit_prob: empty batch");
    uint32_t M = batch.pixel_count;
    std::vector<uint64_t> hits(M, 0);
    for (const BitString& x : batch.frames)
        for (uint32_t i = 0; i < M; ++i)
            if (x.get(i)) ++hits[i];
    double n = (double)batch.frames.size();
    std::vector<PixelStat> out(M);
    for (uint32_t i = 0; i < M; ++i) {
        double p = (double)hits[i] / n;
        out[i] = PixelStat{p, std::sqrt(p * (1.0 - p) / n), hits[i]};
    }
    return out;
}

GuessRate empirical_guess_rate(const DetectorArrayModel& model, const SourceModel& source,
                               uint64_t trials, SimSeed seed) {
    if (trials < 1) throw param_error("empirical_guess_rate: trials must be >= 1");
    uint32_t M = model.pixel_count();
    if (M > 12) throw resource_error("empirical_guess_rate: guard is M <= 12");

    StirlingMemo memo;
    std::map<std::pair<uint64_t, uint32_t>, unsigned> kstar_cache;
    std::mutex cache_mu;
    auto kstar_for = [&](uint64_t n, uint32_t l) {
        std::pair<uint64_t, uint32_t> key{n, l};
        {
            std::lock_guard<std::mutex> lock(cache_mu);
            auto it = kstar_cache.find(key);
            if (it != kstar_cache.end()) return it->second;
        }
        unsigned k = max_outcome_prob((unsigned)n, l, M, &memo).k_star;
        std::lock_guard<std::mutex> lock(cache_mu);
        kstar_cache.emplace(key, k);
        return k;
    };

    size_t nbytes = (M + 7) / 8;
    uint64_t hits_total = 0;
#pragma omp parallel reduction(+ : hits_total)
    {
        BitString status(M), guess(M), x(M);
        std::vector<uint8_t> hits(nbytes);
        uint64_t photons = 0;
#pragma omp for schedule(static)
        for (int64_t t = 0; t < (int64_t)trials; ++t) {
            FrameRng g(seed, (uint64_t)t);
            draw_frame(g, model, source, status, photons, hits);
            uint32_t l = status.popcount();
            unsigned k_star = kstar_for(photons, l);
            // Lexicographically first among the weight-k* strings supported
            // on the active pixels: ones on the trailing active positions.
            std::fill(guess.bytes().begin(), guess.bytes().end(), 0);
            unsigned placed = 0;
            for (uint32_t i = M; i-- > 0 && placed < k_star;) {
                if (status.get(i)) {
                    guess.set(i, true);
                    ++placed;
                }
            }
            for (size_t b = 0; b < nbytes; ++b)
                x.bytes()[b] = (uint8_t)(status.bytes()[b] & hits[b]);
            if (x == guess) ++hits_total;
        }
    }
    double f = (double)hits_total / (double)trials;
    double se = std::sqrt(f * (1.0 - f) / (double)trials);
    return GuessRate{f, se, hits_total, trials};
}

}  // namespace qrng
