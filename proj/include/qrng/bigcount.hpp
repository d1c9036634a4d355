#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <utility>

#include "qrng/errors.hpp"

namespace qrng {

/// Nonnegative real carried as log2(value), so that quantities like
/// k!*S/M^n survive any M and n without overflow or underflow.
/// Zero is represented explicitly instead of as -inf.
class LogReal {
public:
    LogReal() : log2_(0.0), zero_(true) {}

    static LogReal zero() { return LogReal(); }
    static LogReal one() { return from_log2(0.0); }

    static LogReal from_log2(double lg) {
        LogReal x;
        x.log2_ = lg;
        x.zero_ = false;
        return x;
    }

    static LogReal from_value(double v) {
        if (v < 0.0) throw param_error("LogReal: negative value");
        if (v == 0.0) return zero();
        return from_log2(std::log2(v));
    }

    bool is_zero() const { return zero_; }

    double log2() const {
        if (zero_) throw param_error("LogReal: log2 of zero");
        return log2_;
    }

    double value() const { return zero_ ? 0.0 : std::exp2(log2_); }
    long double value_l() const { return zero_ ? 0.0L : std::exp2l((long double)log2_); }

    LogReal operator*(const LogReal& o) const {
        if (zero_ || o.zero_) return zero();
        return from_log2(log2_ + o.log2_);
    }

    LogReal operator/(const LogReal& o) const {
        if (o.zero_) throw param_error("LogReal: division by zero");
        if (zero_) return zero();
        return from_log2(log2_ - o.log2_);
    }

    bool operator<(const LogReal& o) const {
        if (zero_) return !o.zero_;
        if (o.zero_) return false;
        return log2_ < o.log2_;
    }
    bool operator>(const LogReal& o) const { return o < *this; }

private:
    double log2_;
    bool zero_;
};

/// Exact nonnegative integer count. Thin value wrapper over a GMP integer;
/// all combinatorial kernels stay in this type so no intermediate ever
/// rounds.
class BigCount {
public:
    BigCount() : v_(0) {}
    BigCount(unsigned long v) : v_(v) {}
    explicit BigCount(mpz_class v) : v_(std::move(v)) {
        if (sgn(v_) < 0) throw param_error("BigCount: negative value");
    }

    const mpz_class& value() const { return v_; }

    bool operator==(const BigCount& o) const { return v_ == o.v_; }
    bool operator!=(const BigCount& o) const { return v_ != o.v_; }
    bool operator<(const BigCount& o) const { return v_ < o.v_; }
    bool operator<=(const BigCount& o) const { return v_ <= o.v_; }

    bool operator==(unsigned long x) const { return v_ == x; }
    bool operator!=(unsigned long x) const { return v_ != x; }

    BigCount operator+(const BigCount& o) const { return BigCount(mpz_class(v_ + o.v_)); }
    BigCount operator*(const BigCount& o) const { return BigCount(mpz_class(v_ * o.v_)); }

    std::string to_string() const { return v_.get_str(); }
    double to_double() const { return v_.get_d(); }

    /// Monotone conversion; error is at most ~1 ulp of the log2 value.
    LogReal to_log2() const {
        if (v_ == 0) return LogReal::zero();
        long exp2i = 0;
        double mant = mpz_get_d_2exp(&exp2i, v_.get_mpz_t());  // mant in [0.5, 1)
        return LogReal::from_log2((double)exp2i + std::log2(mant));
    }

private:
    mpz_class v_;
};

/// log2 of a positive big integer (1-ulp-accurate helper shared by the
/// probability kernels).
inline double log2_mpz(const mpz_class& v) {
    long exp2i = 0;
    double mant = mpz_get_d_2exp(&exp2i, v.get_mpz_t());
    return (double)exp2i + std::log2(mant);
}

/// num/den as a long double through mantissa/exponent splitting, safe for
/// operands far outside the double exponent range.
inline long double mpz_ratio_ld(const mpz_class& num, const mpz_class& den) {
    if (sgn(num) == 0) return 0.0L;
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
    double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
    return std::ldexp((long double)mn / (long double)md, (int)(en - ed));
}

}  // namespace qrng
