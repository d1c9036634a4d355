#include "qrng/combinatorics.hpp"

#include <cassert>
#include <map>
#include <vector>

#include "qrng/errors.hpp"

namespace qrng {

BigCount factorial(unsigned long n) {
    mpz_class v;
    mpz_fac_ui(v.get_mpz_t(), n);
    return BigCount(std::move(v));
}

BigCount binomial(unsigned long n, unsigned long k) {
    if (k > n) return BigCount(0ul);
    mpz_class v;
    mpz_bin_uiui(v.get_mpz_t(), n, k);
    return BigCount(std::move(v));
}

mpz_class arrangement_count(unsigned n, unsigned k, unsigned r) {
    // sum_{j=0..k} (-1)^{k-j} C(k,j) (r+j)^n, the k-th finite difference of
    // x^n at r. A polynomial of degree n < k differences to zero, which is
    // exactly the k > n case.
    if (k > n) return mpz_class(0);
    mpz_class acc(0), choose(1), pw, term;
    for (unsigned j = 0; j <= k; ++j) {
        if (j > 0) {
            // C(k, j) from C(k, j-1); division is exact.
            choose *= (unsigned long)(k - j + 1);
            mpz_divexact_ui(choose.get_mpz_t(), choose.get_mpz_t(), j);
        }
        mpz_ui_pow_ui(pw.get_mpz_t(), r + j, n);
        term = choose * pw;
        if ((k - j) & 1u)
            acc -= term;
        else
            acc += term;
    }
    assert(sgn(acc) >= 0);
    return acc;
}

BigCount r_stirling2(unsigned n, unsigned k, unsigned r) {
    if (k > n) return BigCount(0ul);
    mpz_class t = arrangement_count(n, k, r);
    mpz_class kfac;
    mpz_fac_ui(kfac.get_mpz_t(), k);
    mpz_class s;
    mpz_divexact(s.get_mpz_t(), t.get_mpz_t(), kfac.get_mpz_t());
    return BigCount(std::move(s));
}

BigCount stirling2(unsigned n, unsigned k) { return r_stirling2(n, k, 0); }

namespace {

struct RecKey {
    unsigned n, k, r, p;
    bool operator<(const RecKey& o) const {
        if (n != o.n) return n < o.n;
        if (k != o.k) return k < o.k;
        if (r != o.r) return r < o.r;
        return p < o.p;
    }
};

mpz_class recurrence_eval(unsigned n, unsigned k, unsigned r, unsigned p);

const mpz_class& recurrence_cached(unsigned n, unsigned k, unsigned r, unsigned p) {
    static std::mutex mu;
    static std::map<RecKey, std::unique_ptr<const mpz_class>> cache;
    RecKey key{n, k, r, p};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto val = std::make_unique<const mpz_class>(recurrence_eval(n, k, r, p));
    std::lock_guard<std::mutex> lock(mu);
    auto [it, ignored] = cache.emplace(key, std::move(val));
    return *it->second;
}

mpz_class recurrence_eval(unsigned n, unsigned k, unsigned r, unsigned p) {
    // {n brace k}_r vanishes unless r <= k <= n.
    if (n < r || k < r || k > n) return mpz_class(0);
    if (r == 0) return stirling2(n, k).value();
    // With p == 0 the identity is vacuous (only the i = 0 term survives and
    // reproduces the left-hand side), so the inner symbol is expanded with
    // the full split instead.
    if (p == 0) return recurrence_cached(n, k, r, r);

    mpz_class acc(0), choose(1), pw(1), term;
    for (unsigned i = 0; i <= n - r; ++i) {
        if (i > 0) {
            choose *= (unsigned long)(n - r - i + 1);
            mpz_divexact_ui(choose.get_mpz_t(), choose.get_mpz_t(), i);
            pw *= (unsigned long)p;
        }
        if (n - p - i < k - p) continue;  // inner symbol is zero
        const mpz_class& inner = recurrence_cached(n - p - i, k - p, r - p, r - p);
        term = choose * inner;
        term *= pw;
        acc += term;
    }
    return acc;
}

}  // namespace

BigCount r_stirling2_recurrence(unsigned n, unsigned k, unsigned r, unsigned p) {
    if (p > r) throw param_error("r_stirling2_recurrence: split p exceeds r");
    return BigCount(mpz_class(recurrence_cached(n, k, r, p)));
}

namespace {

// Restricted-growth-string walk over all partitions of {0..m-1}. Elements
// n..m-1 are the designated ones; a branch dies as soon as two designated
// elements share a block.
struct PartitionWalk {
    unsigned m, want_blocks, n;
    uint64_t hits = 0;
    std::vector<char> block_has_designated;

    void walk(unsigned elem, unsigned used_blocks) {
        if (elem == m) {
            if (used_blocks == want_blocks) ++hits;
            return;
        }
        // Even sending every remaining element to a fresh block cannot reach
        // the target count.
        if (used_blocks + (m - elem) < want_blocks) return;
        bool designated = elem >= n;
        for (unsigned b = 0; b < used_blocks && b < want_blocks; ++b) {
            if (designated && block_has_designated[b]) continue;
            char saved = block_has_designated[b];
            if (designated) block_has_designated[b] = 1;
            walk(elem + 1, used_blocks);
            block_has_designated[b] = saved;
        }
        if (used_blocks < want_blocks) {
            block_has_designated[used_blocks] = designated ? 1 : 0;
            walk(elem + 1, used_blocks + 1);
        }
    }
};

}  // namespace

BigCount count_partitions_oracle(unsigned n, unsigned k, unsigned r) {
    if (n + r > 13) throw resource_error("count_partitions_oracle: n + r > 13");
    unsigned m = n + r;
    unsigned blocks = k + r;
    if (m == 0) return BigCount(blocks == 0 ? 1ul : 0ul);
    if (blocks == 0 || blocks > m) return BigCount(0ul);
    PartitionWalk w{m, blocks, n, 0, std::vector<char>(blocks, 0)};
    w.walk(0, 0);
    return BigCount((unsigned long)w.hits);
}

const mpz_class& StirlingMemo::arrangements(unsigned n, unsigned k, unsigned r) {
    uint64_t key = ((uint64_t)n << 42) | ((uint64_t)k << 21) | (uint64_t)r;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(key);
        if (it != map_.end()) return *it->second;
    }
    auto val = std::make_unique<const mpz_class>(arrangement_count(n, k, r));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, ignored] = map_.emplace(key, std::move(val));
    return *it->second;
}

}  // namespace qrng
