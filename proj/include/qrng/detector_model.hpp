#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrng/bitstring.hpp"
#include "qrng/errors.hpp"

namespace qrng {

/// Frame timing: integration window and acquisition rate.
struct AcquisitionParams {
    double integration_time_s = 200e-9;
    double frame_rate_hz = 49e3;

    void validate() const;
};

/// Photon-number law of the light source per frame, over the whole
/// illuminated region. `mu_total` is the Poisson parameter; with uniform
/// illumination of M pixels, mu_total = M * mu_px.
struct SourceModel {
    enum class Kind { poisson, fixed };

    Kind kind = Kind::poisson;
    double mu_total = 0.0;
    uint32_t n_fixed = 0;

    static SourceModel poisson(double mu_total);
    static SourceModel fixed(uint32_t n);

    double mean() const { return kind == Kind::poisson ? mu_total : (double)n_fixed; }
};

/// Pixel array with its equivalent efficiencies (uniform scalar or one per
/// pixel) and acquisition timing. The physical quantum efficiency and dead
/// time are absorbed into the equivalent efficiency and never modeled
/// separately.
class DetectorArrayModel {
public:
    DetectorArrayModel(uint32_t pixel_count, double eta_uniform,
                       AcquisitionParams acq = {});
    DetectorArrayModel(uint32_t pixel_count, std::vector<double> eta_per_pixel,
                       AcquisitionParams acq = {});

    uint32_t pixel_count() const { return pixel_count_; }
    bool uniform() const { return eta_.size() == 1; }
    double eta_uniform() const;
    double eta_at(uint32_t pixel) const { return uniform() ? eta_[0] : eta_[pixel]; }
    const AcquisitionParams& acquisition() const { return acq_; }

    DetectorArrayModel with_eta(double eta_uniform) const;

private:
    uint32_t pixel_count_;
    std::vector<double> eta_;
    AcquisitionParams acq_;
};

/// Probability that no photon arrives at one pixel within a frame, for a
/// Poisson source thinned uniformly over the array: exp(-mu_px).
double no_photon_prob(double mu_px);

struct BitProbs {
    double p0;
    double p1;
};

/// Measured single-pixel bit probabilities under the gated-detector model:
/// P1 = eta * (1 - exp(-mu_px)).
BitProbs bit_probabilities(double mu_px, double eta);

/// Inverts bit_probabilities for eta. Throws infeasible_error when the
/// measurement exceeds what any efficiency <= 1 can reproduce.
double equivalent_efficiency(double p1_measured, double mu_px);

/// The mu_px at which P1 = 1/2, i.e. -ln(1 - 1/(2 eta)). Only reachable for
/// eta > 1/2; otherwise throws infeasible_error.
double unbiased_mu(double eta);

/// Product-Bernoulli probability of an activation pattern.
double status_config_prob(const BitString& status, const DetectorArrayModel& model);

/// -M log2 max(P0, P1), the per-frame min-entropy with no adversary.
double classical_min_entropy(double p0, double p1, uint32_t pixel_count);

/// Bits per second from bits per frame.
double generation_rate(double entropy_bits_per_frame, const AcquisitionParams& acq);

/// Tabulated (mu_px, eta) calibration points with linear interpolation.
/// File format: optional leading '#' comment lines, a mandatory header line
/// "mu,eta", then one "mu,eta" pair per line with strictly increasing mu.
class CalibrationCurve {
public:
    static CalibrationCurve load(const std::string& path);
    static CalibrationCurve from_points(std::vector<double> mu, std::vector<double> eta);

    /// Linear interpolation; throws infeasible_error outside the tabulated
    /// range.
    double eta_at(double mu_px) const;

    double mu_min() const { return mu_.front(); }
    double mu_max() const { return mu_.back(); }
    size_t size() const { return mu_.size(); }

private:
    CalibrationCurve() = default;
    std::vector<double> mu_;
    std::vector<double> eta_;
};

}  // namespace qrng
