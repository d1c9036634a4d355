#include "qrng/conditional.hpp"

#include <algorithm>
#include <cstdio>

#include "qrng/errors.hpp"

namespace qrng {

CompatibilityClasses compatibility(const BitString& outcome, const BitString& status) {
    if (outcome.size() != status.size())
        throw param_error("compatibility: outcome and status lengths differ");
    CompatibilityClasses c;
    for (uint32_t i = 0; i < outcome.size(); ++i) {
        bool x = outcome.get(i), s = status.get(i);
        (x ? (s ? c.i11 : c.i10) : (s ? c.i01 : c.i00)).push_back(i);
    }
    return c;
}

namespace {

mpz_class pow_m_n(unsigned M, unsigned n) {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), M, n);
    return d;
}

mpq_class ratio(const mpz_class& num, unsigned M, unsigned n) {
    mpq_class q(num, pow_m_n(M, n));
    q.canonicalize();
    return q;
}

LogReal log_ratio(const mpz_class& num, unsigned M, unsigned n) {
    if (sgn(num) == 0) return LogReal::zero();
    return LogReal::from_log2(log2_mpz(num) - log2_mpz(pow_m_n(M, n)));
}

const mpz_class& arrangements_via(StirlingMemo* memo, unsigned n, unsigned k, unsigned r,
                                  mpz_class& scratch) {
    if (memo) return memo->arrangements(n, k, r);
    scratch = arrangement_count(n, k, r);
    return scratch;
}

}  // namespace

mpq_class cond_prob_exact(const BitString& outcome, unsigned photons,
                          const BitString& status, StirlingMemo* memo) {
    auto c = compatibility(outcome, status);
    unsigned M = outcome.size();
    unsigned k = c.detections(), l = c.active();
    if (!c.compatible() || k > photons || k > l) return mpq_class(0);
    mpz_class scratch;
    const mpz_class& t = arrangements_via(memo, photons, k, M - l, scratch);
    return ratio(t, M, photons);
}

LogReal cond_prob_log(const BitString& outcome, unsigned photons,
                      const BitString& status, StirlingMemo* memo) {
    auto c = compatibility(outcome, status);
    unsigned M = outcome.size();
    unsigned k = c.detections(), l = c.active();
    if (!c.compatible() || k > photons || k > l) return LogReal::zero();
    mpz_class scratch;
    const mpz_class& t = arrangements_via(memo, photons, k, M - l, scratch);
    return log_ratio(t, M, photons);
}

namespace {

// Walks every arrangement (n_1, ..., n_M) with sum n, accumulating the
// multinomial count n!/prod(n_i!) of the compatible ones. Pixels in i01
// are forced to zero; pixels in i11 need at least one.
struct ArrangementWalk {
    unsigned M = 0;
    const BitString* x = nullptr;
    const BitString* s = nullptr;
    mpz_class total{0};
    std::vector<mpz_class> fact;

    void walk(uint32_t pixel, unsigned left, mpz_class weight) {
        if (pixel == M) {
            if (left == 0) total += weight;
            return;
        }
        bool xb = x->get(pixel), sb = s->get(pixel);
        if (xb && !sb) return;
        unsigned lo = 0, hi = left;
        if (!xb && sb) hi = 0;   // active pixel, no detection: nothing arrived
        if (xb && sb) lo = 1;    // detection: at least one photon
        for (unsigned c = lo; c <= hi; ++c) {
            mpz_class w;
            mpz_divexact(w.get_mpz_t(), weight.get_mpz_t(), fact[c].get_mpz_t());
            walk(pixel + 1, left - c, std::move(w));
        }
    }
};

}  // namespace

mpq_class cond_prob_oracle(const BitString& outcome, unsigned photons,
                           const BitString& status) {
    if (outcome.size() != status.size())
        throw param_error("cond_prob_oracle: outcome and status lengths differ");
    if (outcome.size() > 6 || photons > 8)
        throw resource_error("cond_prob_oracle: guard is M <= 6 and n <= 8");
    ArrangementWalk w;
    w.M = outcome.size();
    w.x = &outcome;
    w.s = &status;
    w.fact.resize(photons + 1);
    for (unsigned i = 0; i <= photons; ++i) w.fact[i] = factorial(i).value();
    w.walk(0, photons, w.fact[photons]);
    return ratio(w.total, w.M, photons);
}

mpq_class reduced_prob_exact(unsigned k, unsigned n, unsigned l, unsigned M,
                             StirlingMemo* memo) {
    if (M < 1 || l > M || k > M) throw param_error("reduced_prob: need k, l <= M");
    if (k > n || k > l) return mpq_class(0);
    mpz_class scratch;
    const mpz_class& t = arrangements_via(memo, n, k, M - l, scratch);
    return ratio(t, M, n);
}

LogReal reduced_prob_log(unsigned k, unsigned n, unsigned l, unsigned M,
                         StirlingMemo* memo) {
    if (M < 1 || l > M || k > M) throw param_error("reduced_prob: need k, l <= M");
    if (k > n || k > l) return LogReal::zero();
    mpz_class scratch;
    const mpz_class& t = arrangements_via(memo, n, k, M - l, scratch);
    return log_ratio(t, M, n);
}

double reduced_prob(unsigned k, unsigned n, unsigned l, unsigned M) {
    return reduced_prob_log(k, n, l, M).value();
}

MaxOutcome max_outcome_prob(unsigned n, unsigned l, unsigned M, StirlingMemo* memo) {
    if (M < 1 || l > M) throw param_error("max_outcome_prob: need l <= M");
    unsigned kmax = std::min(n, l);
    unsigned k_star = 0;
    mpz_class best, scratch;
    best = arrangements_via(memo, n, 0, M - l, scratch);
    for (unsigned k = 1; k <= kmax; ++k) {
        const mpz_class& t = arrangements_via(memo, n, k, M - l, scratch);
        if (t > best) {  // strict: ties keep the smaller k
            best = t;
            k_star = k;
        }
    }
    return MaxOutcome{k_star, log_ratio(best, M, n)};
}

ReducedProbabilityTable::ReducedProbabilityTable(unsigned photons, unsigned pixel_count,
                                                 NumericMode mode, StirlingMemo* memo)
    : n_(photons), m_(pixel_count), mode_(mode) {
    if (m_ < 1) throw param_error("ReducedProbabilityTable: pixel count must be >= 1");
    size_t cells = (size_t)(m_ + 1) * (m_ + 1);
    if (mode_ == NumericMode::exact)
        exact_.resize(cells);
    else
        log_.resize(cells, LogReal::zero());
    for (unsigned l = 0; l <= m_; ++l) {
        for (unsigned k = 0; k <= m_; ++k) {
            size_t idx = (size_t)k * (m_ + 1) + l;
            if (mode_ == NumericMode::exact)
                exact_[idx] = reduced_prob_exact(k, n_, l, m_, memo);
            else
                log_[idx] = reduced_prob_log(k, n_, l, m_, memo);
        }
    }
}

const mpq_class& ReducedProbabilityTable::exact_at(unsigned k, unsigned l) const {
    if (mode_ != NumericMode::exact) throw param_error("table built in log mode");
    if (k > m_ || l > m_) throw param_error("table index out of range");
    return exact_[(size_t)k * (m_ + 1) + l];
}

LogReal ReducedProbabilityTable::log_at(unsigned k, unsigned l) const {
    if (mode_ != NumericMode::log) throw param_error("table built in exact mode");
    if (k > m_ || l > m_) throw param_error("table index out of range");
    return log_[(size_t)k * (m_ + 1) + l];
}

double ReducedProbabilityTable::at(unsigned k, unsigned l) const {
    if (k > m_ || l > m_) throw param_error("table index out of range");
    size_t idx = (size_t)k * (m_ + 1) + l;
    return mode_ == NumericMode::exact ? exact_[idx].get_d() : log_[idx].value();
}

std::vector<double> sierpinski_matrix(unsigned M, unsigned photons) {
    if (M < 1) throw param_error("sierpinski_matrix: pixel count must be >= 1");
    if (M > 10) throw resource_error("sierpinski_matrix: guard is M <= 10");
    ReducedProbabilityTable table(photons, M, NumericMode::exact);
    size_t dim = (size_t)1 << M;
    std::vector<double> out(dim * dim, 0.0);
    // Index bit M-1-i carries pixel i, so x & ~s != 0 flags a detection on
    // an inactive pixel under either numbering.
    for (size_t s = 0; s < dim; ++s) {
        unsigned l = (unsigned)std::popcount(s);
        for (size_t x = 0; x < dim; ++x) {
            if (x & ~s) continue;
            unsigned k = (unsigned)std::popcount(x);
            out[s * dim + x] = table.at(k, l);
        }
    }
    return out;
}

void write_sierpinski_csv(std::ostream& out, unsigned M,
                          const std::vector<double>& matrix) {
    size_t dim = (size_t)1 << M;
    if (matrix.size() != dim * dim)
        throw param_error("write_sierpinski_csv: matrix size does not match M");
    out << "s_index";
    for (size_t x = 0; x < dim; ++x) out << ",x_" << x;
    out << "\n";
    char buf[40];
    for (size_t s = 0; s < dim; ++s) {
        out << s;
        for (size_t x = 0; x < dim; ++x) {
            std::snprintf(buf, sizeof buf, "%.17g", matrix[s * dim + x]);
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace qrng
