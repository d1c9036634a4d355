#include "qrng/detector_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qrng {

void AcquisitionParams::validate() const {
    if (!(integration_time_s > 0.0)) throw param_error("integration time must be > 0");
    if (!(frame_rate_hz > 0.0)) throw param_error("frame rate must be > 0");
    if (1.0 / frame_rate_hz < integration_time_s)
        throw param_error("frame period 1/R_acq shorter than integration time");
}

SourceModel SourceModel::poisson(double mu_total) {
    if (!(mu_total >= 0.0)) throw param_error("poisson source: mu_total must be >= 0");
    SourceModel s;
    s.kind = Kind::poisson;
    s.mu_total = mu_total;
    return s;
}

SourceModel SourceModel::fixed(uint32_t n) {
    SourceModel s;
    s.kind = Kind::fixed;
    s.n_fixed = n;
    return s;
}

namespace {
void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw param_error("efficiency must lie in [0, 1]");
}
}  // namespace

DetectorArrayModel::DetectorArrayModel(uint32_t pixel_count, double eta_uniform,
                                       AcquisitionParams acq)
    : pixel_count_(pixel_count), eta_{eta_uniform}, acq_(acq) {
    if (pixel_count_ < 1) throw param_error("pixel count must be >= 1");
    check_eta(eta_uniform);
    acq_.validate();
}

DetectorArrayModel::DetectorArrayModel(uint32_t pixel_count,
                                       std::vector<double> eta_per_pixel,
                                       AcquisitionParams acq)
    : pixel_count_(pixel_count), eta_(std::move(eta_per_pixel)), acq_(acq) {
    if (pixel_count_ < 1) throw param_error("pixel count must be >= 1");
    if (eta_.size() != pixel_count_)
        throw param_error("efficiency vector length must equal the pixel count");
    for (double e : eta_) check_eta(e);
    acq_.validate();
}

double DetectorArrayModel::eta_uniform() const {
    if (!uniform()) throw param_error("model has per-pixel efficiencies");
    return eta_[0];
}

DetectorArrayModel DetectorArrayModel::with_eta(double eta) const {
    return DetectorArrayModel(pixel_count_, eta, acq_);
}

double no_photon_prob(double mu_px) {
    if (!(mu_px >= 0.0)) throw param_error("mu_px must be >= 0");
    return std::exp(-mu_px);
}

BitProbs bit_probabilities(double mu_px, double eta) {
    check_eta(eta);
    double p1 = eta * (1.0 - no_photon_prob(mu_px));
    return BitProbs{1.0 - p1, p1};
}

double equivalent_efficiency(double p1_measured, double mu_px) {
    if (!(mu_px > 0.0)) throw param_error("mu_px must be > 0");
    if (!(p1_measured >= 0.0 && p1_measured <= 1.0))
        throw param_error("P1 must lie in [0, 1]");
    double limit = 1.0 - std::exp(-mu_px);
    if (p1_measured > limit)
        throw infeasible_error("measured P1 exceeds 1 - exp(-mu_px); no efficiency <= 1 fits");
    return p1_measured / limit;
}

double unbiased_mu(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw param_error("eta must lie in (0, 1]");
    if (eta <= 0.5)
        throw infeasible_error("P1 = 1/2 is unreachable for eta <= 1/2; no unbiased point exists");
    return -std::log(1.0 - 1.0 / (2.0 * eta));
}

double status_config_prob(const BitString& status, const DetectorArrayModel& model) {
    if (status.size() != model.pixel_count())
        throw param_error("status length does not match the pixel count");
    double p = 1.0;
    for (uint32_t i = 0; i < status.size(); ++i) {
        double eta = model.eta_at(i);
        p *= status.get(i) ? eta : 1.0 - eta;
    }
    return p;
}

double classical_min_entropy(double p0, double p1, uint32_t pixel_count) {
    if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0))
        throw param_error("bit probabilities must lie in [0, 1]");
    if (std::abs(p0 + p1 - 1.0) > 1e-9) throw param_error("P0 + P1 must equal 1");
    return -(double)pixel_count * std::log2(std::max(p0, p1));
}

double generation_rate(double entropy_bits_per_frame, const AcquisitionParams& acq) {
    if (!(entropy_bits_per_frame >= 0.0)) throw param_error("entropy must be >= 0");
    acq.validate();
    return entropy_bits_per_frame * acq.frame_rate_hz;
}

CalibrationCurve CalibrationCurve::from_points(std::vector<double> mu,
                                               std::vector<double> eta) {
    if (mu.size() != eta.size() || mu.empty())
        throw param_error("calibration: need equal-length, non-empty mu and eta");
    for (size_t i = 0; i < mu.size(); ++i) {
        check_eta(eta[i]);
        if (i > 0 && !(mu[i] > mu[i - 1]))
            throw parse_error("calibration: mu values must be strictly increasing");
    }
    CalibrationCurve c;
    c.mu_ = std::move(mu);
    c.eta_ = std::move(eta);
    return c;
}

CalibrationCurve CalibrationCurve::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open calibration file: " + path);
    std::string line;
    bool header_seen = false;
    std::vector<double> mu, eta;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        if (!header_seen) {
            std::string h = line.substr(first);
            h.erase(h.find_last_not_of(" \t") + 1);
            if (h != "mu,eta")
                throw parse_error("calibration: missing 'mu,eta' header in " + path);
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        double m, e;
        char comma;
        if (!(row >> m >> comma >> e) || comma != ',')
            throw parse_error("calibration: malformed row '" + line + "'");
        mu.push_back(m);
        eta.push_back(e);
    }
    if (!header_seen) throw parse_error("calibration: missing 'mu,eta' header in " + path);
    if (mu.empty()) throw parse_error("calibration: no data rows in " + path);
    return from_points(std::move(mu), std::move(eta));
}

double CalibrationCurve::eta_at(double mu_px) const {
    if (mu_px < mu_.front() || mu_px > mu_.back())
        throw infeasible_error("calibration curve does not cover mu_px");
    auto hi = std::lower_bound(mu_.begin(), mu_.end(), mu_px);
    size_t i = (size_t)(hi - mu_.begin());
    if (i == 0) return eta_.front();
    if (mu_[i] == mu_px) return eta_[i];
    double f = (mu_px - mu_[i - 1]) / (mu_[i] - mu_[i - 1]);
    return eta_[i - 1] + f * (eta_[i] - eta_[i - 1]);
}

}  // namespace qrng
