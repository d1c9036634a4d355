#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "qrng/bigcount.hpp"

namespace qrng {

BigCount factorial(unsigned long n);

/// C(n, k); zero when k > n.
BigCount binomial(unsigned long n, unsigned long k);

/// Stirling number of the second kind {n brace k}: partitions of an n-set
/// into k non-empty blocks. Evaluated through the explicit alternating sum
/// in exact integer arithmetic (scaled by k!, summed signed, divided exactly
/// at the end), never in floating point.
BigCount stirling2(unsigned n, unsigned k);

/// Restricted Stirling number {n+r brace k+r}_r: partitions of an
/// (n+r)-set into k+r non-empty blocks with the r designated elements in
/// pairwise distinct blocks. Same exact alternating-sum evaluation.
/// Zero when k > n.
BigCount r_stirling2(unsigned n, unsigned k, unsigned r);

/// {n brace k}_r through the branching identity
///   {n brace k}_r = sum_i C(n-r, i) {n-p-i brace k-p}_{r-p} p^i
/// for a chosen split 0 <= p <= r; bottoms out at ordinary Stirling
/// numbers. Note the unshifted convention: the inputs here are the full
/// set size n and block count k, so the value equals
/// r_stirling2(n - r, k - r, r).
/// Throws param_error when p > r.
BigCount r_stirling2_recurrence(unsigned n, unsigned k, unsigned r, unsigned p);

/// Counts, by exhaustive enumeration of the set partitions of an
/// (n+r)-element set into k+r non-empty blocks, those in which the r
/// designated elements lie in distinct blocks. Guard: n + r <= 13.
BigCount count_partitions_oracle(unsigned n, unsigned k, unsigned r);

/// k! * {n+r brace k+r}_r: the number of ways to distribute n
/// distinguishable items over k + r labeled cells such that the k
/// designated cells each receive at least one item. This integer is the
/// numerator of every reduced conditional probability (denominator M^n).
mpz_class arrangement_count(unsigned n, unsigned k, unsigned r);

/// Insert-only concurrent cache of arrangement_count values, keyed by the
/// exact (n, k, r) triple. Presence never changes results; it only skips
/// recomputation when the same triple recurs within one evaluation.
class StirlingMemo {
public:
    const mpz_class& arrangements(unsigned n, unsigned k, unsigned r);

private:
    std::mutex mu_;
    std::unordered_map<uint64_t, std::unique_ptr<const mpz_class>> map_;
};

}  // namespace qrng
