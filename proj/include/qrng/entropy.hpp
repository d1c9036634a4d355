#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrng/detector_model.hpp"

namespace qrng {

/// Where to cut the infinite photon-number sum and the activation sum.
/// Each discarded term is bounded by its own probability weight, so the
/// discarded mass is an upper bound on the evaluation error and is carried
/// into the report.
struct TruncationPolicy {
    double eps_n = 1e-15;
    double eps_s = 1e-15;
    std::optional<unsigned> hard_n_max;

    void validate() const;
};

enum class EntropyMode { classical, with_photon_info, no_photon_info };

struct IndexRange {
    unsigned lo = 0;
    unsigned hi = 0;  // inclusive
};

struct EntropyReport {
    double h_classical = 0.0;
    double h_conditional = 0.0;
    double p_guess = 1.0;
    EntropyMode mode = EntropyMode::with_photon_info;
    double truncation_bound = 0.0;
    IndexRange n_range;
    IndexRange r_range;
    double secure_rate_bps = 0.0;
    double wall_seconds = 0.0;
    uint64_t terms = 0;
};

/// Adversarial guessing probability for a uniform-efficiency array:
///   sum_n P_N(n) sum_r C(M,r) eta^(M-r) (1-eta)^r max_k P(k | n, M-r)
/// with both sums truncated to the smallest central windows holding
/// 1 - eps of their mass. Accumulation is fixed-order (n ascending, r
/// ascending) so the result is bit-identical for any thread count.
double guessing_probability(const DetectorArrayModel& model, const SourceModel& source,
                            const TruncationPolicy& policy);

/// Same quantity with the full report (truncation diagnostics, classical
/// reference entropy, secure rate).
EntropyReport uniform_entropy_report(const DetectorArrayModel& model,
                                     const SourceModel& source,
                                     const TruncationPolicy& policy);

/// Verification helper: identical summation with both truncation windows
/// widened by their own width on each side. The difference from the normal
/// evaluation must stay below the reported truncation bound.
double guessing_probability_widened(const DetectorArrayModel& model,
                                    const SourceModel& source,
                                    const TruncationPolicy& policy);

/// Direct evaluation with per-pixel efficiencies: enumerates all 2^M
/// activation patterns and maximizes per pattern through the reduced
/// representation. Guard: M <= 16.
EntropyReport conditional_min_entropy_general(const DetectorArrayModel& model,
                                              const SourceModel& source,
                                              const TruncationPolicy& policy);

/// Adversary without photon-number information: the maximization runs over
/// the photon-number-averaged reduced probabilities. Guard: M <= 16.
EntropyReport no_source_info_entropy(const DetectorArrayModel& model,
                                     const SourceModel& source,
                                     const TruncationPolicy& policy);

struct SweepRow {
    double mu_px = 0.0;
    double eta = 0.0;
    EntropyReport report;
};

/// One conditional-entropy report per grid point; eta per row comes from
/// the calibration curve when one is supplied, otherwise from the model.
std::vector<SweepRow> sweep_mu(const std::vector<double>& mu_px_grid,
                               const DetectorArrayModel& model,
                               const TruncationPolicy& policy,
                               const CalibrationCurve* calibration = nullptr);

struct OptimizeResult {
    double mu_star = 0.0;
    double rate_star = 0.0;
};

/// Grid scan of the secure rate over [mu_lo, mu_hi] with `resolution`
/// points, followed by one refinement pass at 10x resolution around the
/// best cell. Deterministic; ties keep the smaller mu.
OptimizeResult optimize_mu(const DetectorArrayModel& model, const TruncationPolicy& policy,
                           double mu_lo, double mu_hi, unsigned resolution,
                           const CalibrationCurve* calibration = nullptr);

}  // namespace qrng
