#include "qrng/entropy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qrng/combinatorics.hpp"
#include "qrng/conditional.hpp"
#include "qrng/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#else
static int omp_get_num_threads() { return 1; }
static int omp_get_thread_num() { return 0; }
#endif

namespace qrng {

void TruncationPolicy::validate() const {
    if (!(eps_n > 0.0 && eps_n < 1.0)) throw param_error("eps_n must lie in (0, 1)");
    if (!(eps_s > 0.0 && eps_s < 1.0)) throw param_error("eps_s must lie in (0, 1)");
}

namespace {

struct KahanLD {
    long double sum = 0.0L, carry = 0.0L;
    void add(long double x) {
        long double y = x - carry;
        long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Truncated probability weights over a contiguous integer range.
struct WeightWindow {
    unsigned lo = 0, hi = 0;  // inclusive
    std::vector<double> w;
    double mass = 0.0;

    double neglected() const { return std::max(0.0, 1.0 - mass); }
    double weight(unsigned i) const { return w[i - lo]; }
    unsigned count() const { return hi - lo + 1; }
};

// Greedy outward expansion from the mode: each step annexes the side with
// the larger next weight, which yields the smallest window holding the
// requested mass for a unimodal law.
template <typename Pmf, typename Ratio>
WeightWindow expand_window(unsigned mode, double target_mass, unsigned max_index,
                           bool has_max, Pmf pmf_at, Ratio step) {
    // step(i, up): weight(i +/- 1) / weight(i)
    std::vector<double> above, below;
    double center = pmf_at(mode);
    double mass = center;
    unsigned lo = mode, hi = mode;
    double next_lo = lo > 0 ? center * step(lo, false) : 0.0;
    double next_hi = (!has_max || hi < max_index) ? center * step(hi, true) : 0.0;
    while (mass < target_mass) {
        bool can_lo = lo > 0 && next_lo > 0.0;
        bool can_hi = (!has_max || hi < max_index) && next_hi > 0.0;
        if (!can_lo && !can_hi)
            throw infeasible_error("truncation policy unsatisfiable: tail mass unreachable");
        if (can_hi && (!can_lo || next_hi >= next_lo)) {
            ++hi;
            above.push_back(next_hi);
            mass += next_hi;
            next_hi = (!has_max || hi < max_index) ? above.back() * step(hi, true) : 0.0;
        } else {
            --lo;
            below.push_back(next_lo);
            mass += next_lo;
            next_lo = lo > 0 ? below.back() * step(lo, false) : 0.0;
        }
    }
    WeightWindow win;
    win.lo = lo;
    win.hi = hi;
    win.mass = mass;
    win.w.reserve(hi - lo + 1);
    for (auto it = below.rbegin(); it != below.rend(); ++it) win.w.push_back(*it);
    win.w.push_back(center);
    win.w.insert(win.w.end(), above.begin(), above.end());
    return win;
}

// Weights over an explicit range, anchored at the in-range point closest to
// the mode.
template <typename Pmf, typename Ratio>
WeightWindow fill_range(unsigned mode, unsigned lo, unsigned hi, Pmf pmf_at, Ratio step) {
    unsigned anchor = std::clamp(mode, lo, hi);
    WeightWindow win;
    win.lo = lo;
    win.hi = hi;
    win.w.assign(hi - lo + 1, 0.0);
    win.w[anchor - lo] = pmf_at(anchor);
    for (unsigned i = anchor; i > lo; --i)
        win.w[i - 1 - lo] = win.w[i - lo] * step(i, false);
    for (unsigned i = anchor; i < hi; ++i)
        win.w[i + 1 - lo] = win.w[i - lo] * step(i, true);
    for (double x : win.w) win.mass += x;
    return win;
}

double poisson_pmf(double mean, unsigned n) {
    return std::exp((double)n * std::log(mean) - mean - std::lgamma((double)n + 1.0));
}

// step ratios: P(n+1)/P(n) = mean/(n+1), P(n-1)/P(n) = n/mean
auto poisson_step(double mean) {
    return [mean](unsigned i, bool up) {
        return up ? mean / (double)(i + 1) : (double)i / mean;
    };
}

WeightWindow poisson_window(double mean, double eps, std::optional<unsigned> hard_max) {
    if (mean == 0.0) return WeightWindow{0, 0, {1.0}, 1.0};
    unsigned mode = (unsigned)mean;
    if (hard_max && mode > *hard_max) mode = *hard_max;
    auto pmf = [mean](unsigned n) { return poisson_pmf(mean, n); };
    return expand_window(mode, 1.0 - eps, hard_max.value_or(0), hard_max.has_value(),
                         pmf, poisson_step(mean));
}

WeightWindow poisson_window_range(double mean, unsigned lo, unsigned hi) {
    if (mean == 0.0) {
        WeightWindow win;
        win.lo = lo;
        win.hi = hi;
        win.w.assign(hi - lo + 1, 0.0);
        if (lo == 0) win.w[0] = 1.0;
        win.mass = win.w[0];
        return win;
    }
    auto pmf = [mean](unsigned n) { return poisson_pmf(mean, n); };
    return fill_range((unsigned)mean, lo, hi, pmf, poisson_step(mean));
}

double binomial_pmf(unsigned M, double q, unsigned r) {
    return std::exp(std::lgamma((double)M + 1.0) - std::lgamma((double)r + 1.0) -
                    std::lgamma((double)(M - r) + 1.0) + (double)r * std::log(q) +
                    (double)(M - r) * std::log1p(-q));
}

auto binomial_step(unsigned M, double q) {
    return [M, q](unsigned i, bool up) {
        return up ? (double)(M - i) / (double)(i + 1) * (q / (1.0 - q))
                  : (double)i / (double)(M - i + 1) * ((1.0 - q) / q);
    };
}

WeightWindow degenerate_window(unsigned at, unsigned lo, unsigned hi) {
    WeightWindow win;
    win.lo = lo;
    win.hi = hi;
    win.w.assign(hi - lo + 1, 0.0);
    if (at >= lo && at <= hi) {
        win.w[at - lo] = 1.0;
        win.mass = 1.0;
    }
    return win;
}

// Law of the inactive-pixel count r ~ Binomial(M, 1 - eta).
WeightWindow binomial_window(unsigned M, double q, double eps) {
    if (q <= 0.0) return degenerate_window(0, 0, 0);
    if (q >= 1.0) return degenerate_window(M, M, M);
    unsigned mode = std::min(M, (unsigned)((double)(M + 1) * q));
    auto pmf = [M, q](unsigned r) { return binomial_pmf(M, q, r); };
    return expand_window(mode, 1.0 - eps, M, true, pmf, binomial_step(M, q));
}

WeightWindow binomial_window_range(unsigned M, double q, unsigned lo, unsigned hi) {
    if (q <= 0.0) return degenerate_window(0, lo, hi);
    if (q >= 1.0) return degenerate_window(M, lo, hi);
    unsigned mode = std::min(M, (unsigned)((double)(M + 1) * q));
    auto pmf = [M, q](unsigned r) { return binomial_pmf(M, q, r); };
    return fill_range(mode, lo, hi, pmf, binomial_step(M, q));
}

WeightWindow source_window(const SourceModel& source, const TruncationPolicy& policy) {
    if (source.kind == SourceModel::Kind::fixed) {
        if (policy.hard_n_max && source.n_fixed > *policy.hard_n_max)
            throw infeasible_error("hard_n_max below the fixed photon number");
        return WeightWindow{source.n_fixed, source.n_fixed, {1.0}, 1.0};
    }
    return poisson_window(source.mu_total, policy.eps_n, policy.hard_n_max);
}

// Exact scan of t_k = arrangement_count(n, k, r) across k for one photon
// number, with the powers (r+j)^n and M^n advanced incrementally across
// consecutive n. Everything before the final long double ratio is an exact
// integer, so results do not depend on evaluation order.
class ReducedMaxScanner {
public:
    ReducedMaxScanner(unsigned M, unsigned base_lo, unsigned base_hi)
        : M_(M), blo_(base_lo), pows_(base_hi - base_lo + 1) {}

    void seed(unsigned n) {
        n_ = n;
        for (unsigned i = 0; i < pows_.size(); ++i)
            mpz_ui_pow_ui(pows_[i].get_mpz_t(), blo_ + i, n);
        mpz_ui_pow_ui(mn_.get_mpz_t(), M_, n);
    }

    void advance() {
        ++n_;
        for (unsigned i = 0; i < pows_.size(); ++i) pows_[i] *= (unsigned long)(blo_ + i);
        mn_ *= (unsigned long)M_;
    }

    unsigned photons() const { return n_; }

    // max_k t_k / M^n over k in [0, kmax]; ties keep the smaller k.
    std::pair<unsigned, long double> max_for_r(unsigned r, unsigned kmax, uint64_t& terms) {
        unsigned k_star = 0;
        scan(r, kmax, terms, [&](unsigned k) {
            if (acc_ > best_) {
                best_ = acc_;
                k_star = k;
            }
        });
        return {k_star, mpz_ratio_ld(best_, mn_)};
    }

    // t_k / M^n for every k in [0, kmax].
    void values_for_r(unsigned r, unsigned kmax, long double* out, uint64_t& terms) {
        scan(r, kmax, terms, [&](unsigned k) { out[k] = mpz_ratio_ld(acc_, mn_); });
    }

private:
    template <typename Visit>
    void scan(unsigned r, unsigned kmax, uint64_t& terms, Visit visit) {
        kmax = std::min(kmax, n_);
        if (row_.size() < (size_t)kmax + 1) row_.resize(kmax + 1);
        best_ = 0;
        for (unsigned k = 0; k <= kmax; ++k) {
            // Pascal row update in place: row_[j] becomes C(k, j).
            row_[k] = 1;
            for (unsigned j = k - (k > 0); j >= 1; --j) row_[j] += row_[j - 1];
            acc_ = 0;
            for (unsigned j = 0; j <= k; ++j) {
                const mpz_class& pw = pows_[r + j - blo_];
                if ((k - j) & 1u)
                    mpz_submul(acc_.get_mpz_t(), row_[j].get_mpz_t(), pw.get_mpz_t());
                else
                    mpz_addmul(acc_.get_mpz_t(), row_[j].get_mpz_t(), pw.get_mpz_t());
            }
            terms += k + 1;
            visit(k);
        }
    }

    unsigned M_, blo_;
    unsigned n_ = 0;
    std::vector<mpz_class> pows_;
    mpz_class mn_, acc_, best_;
    std::vector<mpz_class> row_;
};

struct UniformEval {
    long double p = 0.0L;
    uint64_t terms = 0;
};

// sum_n w_n sum_r w_r max_k t_k / M^n with fixed (n ascending, r ascending)
// reduction order. Threads work on contiguous n chunks; per-n partials are
// exact functions of n, so the reduction is bit-identical for any chunking.
UniformEval eval_uniform_windows(unsigned M, const WeightWindow& nw, const WeightWindow& rw) {
    unsigned n_count = nw.count();
    std::vector<long double> partial(n_count, 0.0L);
    std::vector<uint64_t> termc(n_count, 0);
    unsigned base_hi = std::min((uint64_t)M, (uint64_t)rw.hi + (uint64_t)nw.hi);

#pragma omp parallel
    {
        unsigned nthreads = (unsigned)omp_get_num_threads();
        unsigned tid = (unsigned)omp_get_thread_num();
        uint64_t chunk = (n_count + nthreads - 1) / nthreads;
        uint64_t i0 = (uint64_t)tid * chunk;
        uint64_t i1 = std::min<uint64_t>(n_count, i0 + chunk);
        if (i0 < i1) {
            ReducedMaxScanner scan(M, rw.lo, base_hi);
            scan.seed(nw.lo + (unsigned)i0);
            for (uint64_t i = i0; i < i1; ++i) {
                if (i > i0) scan.advance();
                unsigned n = nw.lo + (unsigned)i;
                KahanLD inner;
                uint64_t terms = 0;
                for (unsigned r = rw.lo; r <= rw.hi; ++r) {
                    auto [k_star, p_star] = scan.max_for_r(r, M - r, terms);
                    (void)k_star;
                    inner.add((long double)rw.weight(r) * p_star);
                }
                partial[i] = (long double)nw.weight(n) * inner.sum;
                termc[i] = terms;
            }
        }
    }

    KahanLD total;
    UniformEval out;
    for (unsigned i = 0; i < n_count; ++i) {
        total.add(partial[i]);
        out.terms += termc[i];
    }
    out.p = total.sum;
    return out;
}

double mu_px_of(const DetectorArrayModel& model, const SourceModel& source) {
    return source.kind == SourceModel::Kind::poisson
               ? source.mu_total / (double)model.pixel_count()
               : 0.0;
}

// Reference entropy with no adversary: product-Bernoulli max outcome.
double classical_entropy_for(const DetectorArrayModel& model, const SourceModel& source) {
    unsigned M = model.pixel_count();
    double p_none;  // no photon at one pixel
    if (source.kind == SourceModel::Kind::poisson)
        p_none = std::exp(-source.mu_total / (double)M);
    else
        p_none = std::pow(1.0 - 1.0 / (double)M, (double)source.n_fixed);
    double h = 0.0;
    for (unsigned i = 0; i < M; ++i) {
        double p1 = model.eta_at(i) * (1.0 - p_none);
        h -= std::log2(std::max(p1, 1.0 - p1));
    }
    return h;
}

EntropyReport finish_report(const DetectorArrayModel& model, const SourceModel& source,
                            EntropyMode mode, long double p, double bound,
                            IndexRange nr, IndexRange rr, uint64_t terms,
                            std::chrono::steady_clock::time_point t0) {
    EntropyReport rep;
    rep.mode = mode;
    if (p > 1.0L) p = 1.0L;
    rep.p_guess = (double)p;
    rep.h_conditional = std::max(0.0, -(double)std::log2(p));
    rep.h_classical = classical_entropy_for(model, source);
    rep.truncation_bound = bound;
    rep.n_range = nr;
    rep.r_range = rr;
    rep.secure_rate_bps = rep.h_conditional * model.acquisition().frame_rate_hz;
    rep.terms = terms;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// P_S mass per active-pixel count, accumulated over all 2^M patterns in
// ascending index order.
std::vector<double> status_mass_by_weight(const DetectorArrayModel& model) {
    unsigned M = model.pixel_count();
    std::vector<double> by_l(M + 1, 0.0);
    for (uint64_t s = 0; s < (1ull << M); ++s) {
        double p = 1.0;
        for (unsigned i = 0; i < M; ++i) {
            double eta = model.eta_at(i);
            p *= (s >> (M - 1 - i)) & 1u ? eta : 1.0 - eta;
        }
        by_l[std::popcount(s)] += p;
    }
    return by_l;
}

}  // namespace

double guessing_probability(const DetectorArrayModel& model, const SourceModel& source,
                            const TruncationPolicy& policy) {
    policy.validate();
    unsigned M = model.pixel_count();
    double eta = model.eta_uniform();
    WeightWindow nw = source_window(source, policy);
    WeightWindow rw = binomial_window(M, 1.0 - eta, policy.eps_s);
    return (double)std::min(1.0L, eval_uniform_windows(M, nw, rw).p);
}

EntropyReport uniform_entropy_report(const DetectorArrayModel& model,
                                     const SourceModel& source,
                                     const TruncationPolicy& policy) {
    auto t0 = std::chrono::steady_clock::now();
    policy.validate();
    unsigned M = model.pixel_count();
    double eta = model.eta_uniform();
    WeightWindow nw = source_window(source, policy);
    WeightWindow rw = binomial_window(M, 1.0 - eta, policy.eps_s);
    UniformEval ev = eval_uniform_windows(M, nw, rw);
    double bound = nw.neglected() + rw.neglected();
    return finish_report(model, source, EntropyMode::with_photon_info, ev.p, bound,
                         {nw.lo, nw.hi}, {rw.lo, rw.hi}, ev.terms, t0);
}

double guessing_probability_widened(const DetectorArrayModel& model,
                                    const SourceModel& source,
                                    const TruncationPolicy& policy) {
    policy.validate();
    unsigned M = model.pixel_count();
    double eta = model.eta_uniform();
    WeightWindow nw = source_window(source, policy);
    WeightWindow rw = binomial_window(M, 1.0 - eta, policy.eps_s);

    unsigned nwidth = nw.count(), rwidth = rw.count();
    WeightWindow nw2 = nw, rw2 = rw;
    if (source.kind == SourceModel::Kind::poisson)
        nw2 = poisson_window_range(source.mu_total, nw.lo > nwidth ? nw.lo - nwidth : 0,
                                   nw.hi + nwidth);
    rw2 = binomial_window_range(M, 1.0 - eta,
                                rw.lo > rwidth ? rw.lo - rwidth : 0,
                                std::min(M, rw.hi + rwidth));
    return (double)std::min(1.0L, eval_uniform_windows(M, nw2, rw2).p);
}

EntropyReport conditional_min_entropy_general(const DetectorArrayModel& model,
                                              const SourceModel& source,
                                              const TruncationPolicy& policy) {
    auto t0 = std::chrono::steady_clock::now();
    policy.validate();
    unsigned M = model.pixel_count();
    if (M > 16) throw resource_error("conditional_min_entropy_general: guard is M <= 16");
    WeightWindow nw = source_window(source, policy);
    std::vector<double> by_l = status_mass_by_weight(model);

    ReducedMaxScanner scan(M, 0, M);
    KahanLD total;
    uint64_t terms = 0;
    for (unsigned n = nw.lo; n <= nw.hi; ++n) {
        if (n == nw.lo)
            scan.seed(n);
        else
            scan.advance();
        KahanLD inner;
        for (unsigned r = 0; r <= M; ++r) {
            auto [k_star, p_star] = scan.max_for_r(r, M - r, terms);
            (void)k_star;
            inner.add((long double)by_l[M - r] * p_star);
        }
        total.add((long double)nw.weight(n) * inner.sum);
    }
    return finish_report(model, source, EntropyMode::with_photon_info, total.sum,
                         nw.neglected(), {nw.lo, nw.hi}, {0, M}, terms, t0);
}

EntropyReport no_source_info_entropy(const DetectorArrayModel& model,
                                     const SourceModel& source,
                                     const TruncationPolicy& policy) {
    auto t0 = std::chrono::steady_clock::now();
    policy.validate();
    unsigned M = model.pixel_count();
    if (M > 16) throw resource_error("no_source_info_entropy: guard is M <= 16");
    WeightWindow nw = source_window(source, policy);
    std::vector<double> by_l = status_mass_by_weight(model);

    // averaged[l][k] = sum_n P_N(n) t_k / M^n, accumulated n-ascending
    std::vector<std::vector<KahanLD>> averaged(M + 1, std::vector<KahanLD>(M + 1));
    std::vector<long double> vals(M + 1);
    ReducedMaxScanner scan(M, 0, M);
    uint64_t terms = 0;
    for (unsigned n = nw.lo; n <= nw.hi; ++n) {
        if (n == nw.lo)
            scan.seed(n);
        else
            scan.advance();
        for (unsigned r = 0; r <= M; ++r) {
            unsigned l = M - r;
            unsigned kmax = std::min(l, n);
            scan.values_for_r(r, kmax, vals.data(), terms);
            for (unsigned k = 0; k <= kmax; ++k)
                averaged[l][k].add((long double)nw.weight(n) * vals[k]);
        }
    }
    KahanLD total;
    for (unsigned r = 0; r <= M; ++r) {
        unsigned l = M - r;
        long double best = 0.0L;
        for (unsigned k = 0; k <= l; ++k)
            if (averaged[l][k].sum > best) best = averaged[l][k].sum;
        total.add((long double)by_l[l] * best);
    }
    return finish_report(model, source, EntropyMode::no_photon_info, total.sum,
                         nw.neglected(), {nw.lo, nw.hi}, {0, M}, terms, t0);
}

std::vector<SweepRow> sweep_mu(const std::vector<double>& mu_px_grid,
                               const DetectorArrayModel& model,
                               const TruncationPolicy& policy,
                               const CalibrationCurve* calibration) {
    if (mu_px_grid.empty()) throw param_error("sweep_mu: empty grid");
    for (double mu : mu_px_grid)
        if (!(mu >= 0.0)) throw param_error("sweep_mu: grid values must be >= 0");
    if (!calibration && !model.uniform())
        throw param_error("sweep_mu: need uniform efficiency or a calibration curve");
    std::vector<SweepRow> rows;
    rows.reserve(mu_px_grid.size());
    for (double mu_px : mu_px_grid) {
        double eta = calibration ? calibration->eta_at(mu_px) : model.eta_uniform();
        DetectorArrayModel m = model.with_eta(eta);
        SourceModel src = SourceModel::poisson(mu_px * (double)model.pixel_count());
        rows.push_back(SweepRow{mu_px, eta, uniform_entropy_report(m, src, policy)});
    }
    return rows;
}

OptimizeResult optimize_mu(const DetectorArrayModel& model, const TruncationPolicy& policy,
                           double mu_lo, double mu_hi, unsigned resolution,
                           const CalibrationCurve* calibration) {
    if (!(mu_lo >= 0.0) || !(mu_hi >= mu_lo)) throw param_error("optimize_mu: bad range");
    if (resolution < 1) throw param_error("optimize_mu: resolution must be >= 1");

    auto rate_at = [&](double mu_px) {
        double eta = calibration ? calibration->eta_at(mu_px) : model.eta_uniform();
        DetectorArrayModel m = model.with_eta(eta);
        SourceModel src = SourceModel::poisson(mu_px * (double)model.pixel_count());
        return uniform_entropy_report(m, src, policy).secure_rate_bps;
    };

    if (mu_hi == mu_lo || resolution == 1) return OptimizeResult{mu_lo, rate_at(mu_lo)};

    double step = (mu_hi - mu_lo) / (double)(resolution - 1);
    OptimizeResult best{mu_lo, rate_at(mu_lo)};
    for (unsigned i = 1; i < resolution; ++i) {
        double mu = mu_lo + step * (double)i;
        double rate = rate_at(mu);
        if (rate > best.rate_star) best = OptimizeResult{mu, rate};
    }
    double wlo = std::max(mu_lo, best.mu_star - step);
    double whi = std::min(mu_hi, best.mu_star + step);
    double fine = step / 10.0;
    for (unsigned i = 0;; ++i) {
        double mu = wlo + fine * (double)i;
        if (mu > whi + fine * 0.5) break;
        mu = std::min(mu, whi);
        double rate = rate_at(mu);
        if (rate > best.rate_star) best = OptimizeResult{mu, rate};
    }
    return best;
}

}  // namespace qrng
