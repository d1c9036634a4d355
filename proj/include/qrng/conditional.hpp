#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <vector>

#include "qrng/bigcount.hpp"
#include "qrng/bitstring.hpp"
#include "qrng/combinatorics.hpp"

namespace qrng {

enum class NumericMode { exact, log };

/// Pixel indices split by their (outcome bit, status bit) pair. A detection
/// on an inactive pixel (the i10 class) makes the pair incompatible: no
/// photon arrangement can produce it.
struct CompatibilityClasses {
    std::vector<uint32_t> i00;  // x=0, s=0: no requirement
    std::vector<uint32_t> i01;  // x=0, s=1: pixel must receive no photon
    std::vector<uint32_t> i10;  // x=1, s=0: impossible
    std::vector<uint32_t> i11;  // x=1, s=1: pixel must receive >= 1 photon

    bool compatible() const { return i10.empty(); }
    uint32_t detections() const { return (uint32_t)(i10.size() + i11.size()); }
    uint32_t active() const { return (uint32_t)(i01.size() + i11.size()); }
};

CompatibilityClasses compatibility(const BitString& outcome, const BitString& status);

/// P(x | n, s) in exact rational form: arrangement count over M^n.
mpq_class cond_prob_exact(const BitString& outcome, unsigned photons,
                          const BitString& status, StirlingMemo* memo = nullptr);

/// P(x | n, s) in the overflow-safe log carrier; derived from the same
/// exact integers, so it tracks the rational value to ~1 ulp.
LogReal cond_prob_log(const BitString& outcome, unsigned photons,
                      const BitString& status, StirlingMemo* memo = nullptr);

/// Brute-force reference: sums the multinomial weight of every photon
/// arrangement compatible with (x, s). Guards: M <= 6 and n <= 8.
mpq_class cond_prob_oracle(const BitString& outcome, unsigned photons,
                           const BitString& status);

/// P(k | n, l) for any representative outcome/status pair with those
/// Hamming weights: arrangement_count(n, k, M-l) / M^n, zero when
/// k > min(n, l).
mpq_class reduced_prob_exact(unsigned k, unsigned n, unsigned l, unsigned M,
                             StirlingMemo* memo = nullptr);
LogReal reduced_prob_log(unsigned k, unsigned n, unsigned l, unsigned M,
                         StirlingMemo* memo = nullptr);
double reduced_prob(unsigned k, unsigned n, unsigned l, unsigned M);

struct MaxOutcome {
    unsigned k_star;
    LogReal p_star;
};

/// Scans k in [0, min(n, l)] and returns the detection count with the
/// largest P(k | n, l); ties break toward smaller k. Comparison happens on
/// the exact integer numerators, so the tie rule is exact.
MaxOutcome max_outcome_prob(unsigned n, unsigned l, unsigned M,
                            StirlingMemo* memo = nullptr);

/// The (k, l) matrix of inequivalent conditional probabilities for one
/// photon number.
class ReducedProbabilityTable {
public:
    ReducedProbabilityTable(unsigned photons, unsigned pixel_count, NumericMode mode,
                            StirlingMemo* memo = nullptr);

    unsigned photons() const { return n_; }
    unsigned pixel_count() const { return m_; }
    NumericMode mode() const { return mode_; }

    const mpq_class& exact_at(unsigned k, unsigned l) const;
    LogReal log_at(unsigned k, unsigned l) const;
    double at(unsigned k, unsigned l) const;

private:
    unsigned n_, m_;
    NumericMode mode_;
    std::vector<mpq_class> exact_;
    std::vector<LogReal> log_;
};

/// Dense 2^M x 2^M matrix of P(x | n, s), row-major; row = status index,
/// column = outcome index, both lexicographic with pixel 0 as the most
/// significant bit. Guard: M <= 10.
std::vector<double> sierpinski_matrix(unsigned M, unsigned photons);

/// CSV body for the matrix: header "s_index,x_0,...", one row per status
/// index, probabilities with 17 significant digits.
void write_sierpinski_csv(std::ostream& out, unsigned M,
                          const std::vector<double>& matrix);

}  // namespace qrng
