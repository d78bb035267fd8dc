// analysis.hpp
// Efficiency calculators for the scheme comparison (QKD round counts,
// detector-efficiency scaling), the classical Shamir baseline, and
// summary statistics over session transcripts.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "protocol.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace qss {

// Rounds of d-level QKD per recipient so that all N recipients hit a
// correct basis at least once with probability >= p_success:
// ceil( ln(1 - p^{1/N}) / ln(1 - 1/d) ).
inline int qkd_rounds(int n_recipients, int d, double p_success) {
    if (n_recipients < 1 || d < 2)
        throw std::invalid_argument("need N >= 1 and d >= 2");
    if (p_success <= 0.0 || p_success >= 1.0)
        throw std::invalid_argument("p_success must be in (0,1)");
    const double num = std::log(1.0 - std::pow(p_success, 1.0 / n_recipients));
    const double den = std::log(1.0 - 1.0 / d);
    return (int)std::ceil(num / den - 1e-12);
}

// (1 - (1 - 1/d)^m)^N : probability all recipients succeed within m rounds.
inline double qkd_success(int n_recipients, int d, int m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    return std::pow(1.0 - std::pow(1.0 - 1.0 / d, (double)m),
                    (double)n_recipients);
}

enum class Scheme { ghz, single_qudit, qkd };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::ghz: return "ghz";
        case Scheme::single_qudit: return "single_qudit";
        case Scheme::qkd: return "qkd";
    }
    return "?";
}

// Detector-efficiency factor per useful round: every GHZ round needs all
// N+1 stations to fire, the single-qudit scheme has one station, QKD one
// per recipient channel.
inline double detection_scaling(Scheme scheme, int n_recipients, double eta) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must be in [0,1]");
    switch (scheme) {
        case Scheme::ghz: return std::pow(eta, (double)n_recipients + 1.0);
        case Scheme::single_qudit: return eta;
        case Scheme::qkd: return std::pow(eta, (double)n_recipients);
    }
    return 0.0;
}

// ---------------------------------------------------------------------
// Classical (N,k) Shamir baseline.

struct ShamirParams {
    int n_shares = 0;                   // N
    int threshold = 0;                  // k
    std::int64_t prime = 0;             // P
    std::vector<std::int64_t> coeffs;   // a_0..a_{k-1}; a_0 is the secret

    void validate() const {
        if (threshold < 1 || threshold > n_shares)
            throw std::invalid_argument("need 1 <= k <= N");
        if (n_shares >= prime)
            throw std::invalid_argument("need N < P");
        if (!is_prime(prime)) throw std::invalid_argument("P must be prime");
        if ((int)coeffs.size() != threshold)
            throw std::invalid_argument("need exactly k coefficients");
        for (auto c : coeffs)
            if (c < 1 || c > prime)
                throw std::invalid_argument("coefficients must lie in {1,...,P}");
    }

    static bool is_prime(std::int64_t n) {
        if (n < 2) return false;
        for (std::int64_t f = 2; f * f <= n; ++f)
            if (n % f == 0) return false;
        return true;
    }
};

struct ShamirShare {
    std::int64_t x;
    std::int64_t value;
};

namespace detail {

inline std::int64_t mod_pow(std::int64_t b, std::int64_t e, std::int64_t p) {
    std::int64_t r = 1;
    b %= p;
    while (e > 0) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

inline std::int64_t mod_inv(std::int64_t a, std::int64_t p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw std::invalid_argument("no inverse of 0");
    return mod_pow(a, p - 2, p);
}

}  // namespace detail

// Evaluates p(x) = a_0 + a_1 x + ... + a_{k-1} x^{k-1} mod P at x = 1..N.
inline std::vector<ShamirShare> shamir_share(const ShamirParams& params) {
    params.validate();
    std::vector<ShamirShare> shares;
    shares.reserve((size_t)params.n_shares);
    for (std::int64_t x = 1; x <= params.n_shares; ++x) {
        std::int64_t v = 0, xp = 1;
        for (auto c : params.coeffs) {
            v = (v + c % params.prime * xp) % params.prime;
            xp = xp * x % params.prime;
        }
        shares.push_back({x, v});
    }
    return shares;
}

// Lagrange interpolation at x = 0 over GF(P); recovers a_0 from any k shares.
inline std::int64_t shamir_reconstruct(const std::vector<ShamirShare>& shares,
                                       std::int64_t prime) {
    if (!ShamirParams::is_prime(prime))
        throw std::invalid_argument("P must be prime");
    for (size_t i = 0; i < shares.size(); ++i)
        for (size_t k = i + 1; k < shares.size(); ++k)
            if ((shares[i].x - shares[k].x) % prime == 0)
                throw std::invalid_argument("repeated abscissae");
    std::int64_t secret = 0;
    for (size_t i = 0; i < shares.size(); ++i) {
        std::int64_t num = 1, den = 1;
        for (size_t k = 0; k < shares.size(); ++k) {
            if (k == i) continue;
            num = num * (shares[k].x % prime) % prime;
            std::int64_t diff = (shares[k].x - shares[i].x) % prime;
            if (diff < 0) diff += prime;
            den = den * diff % prime;
        }
        std::int64_t term =
            shares[i].value % prime * num % prime * detail::mod_inv(den, prime) % prime;
        secret = (secret + term) % prime;
    }
    return secret;
}

// ---------------------------------------------------------------------
// Transcript aggregation.

struct SummaryRow {
    std::string scheme;
    int d = 0;
    int n_recipients = 0;
    std::string metric;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::int64_t n_samples = 0;
};

// Per-config valid-round rate, violation rate and secret throughput
// (secret digits per round) with Wilson intervals.
inline std::vector<SummaryRow> aggregate(
    const std::vector<SessionTranscript>& transcripts) {
    struct Acc {
        std::int64_t rounds = 0, valid = 0, checks = 0, violations = 0, secrets = 0;
    };
    std::map<std::pair<int, int>, Acc> groups;
    for (const auto& ts : transcripts) {
        Acc& acc = groups[{ts.config.d, ts.config.n_recipients}];
        acc.rounds += ts.rounds.size();
        for (const auto& r : ts.rounds) {
            if (r.valid) ++acc.valid;
            if (r.is_check_round) {
                ++acc.checks;
                if (!*r.check_passed) ++acc.violations;
            }
        }
        acc.secrets += (std::int64_t)ts.secret_stream.size();
    }

    std::vector<SummaryRow> rows;
    auto push = [&rows](int d, int n, const std::string& metric,
                        std::int64_t hits, std::int64_t trials) {
        auto [lo, hi] = wilson_interval((int)hits, (int)trials);
        rows.push_back({"single_qudit", d, n, metric,
                        trials > 0 ? (double)hits / trials : 0.0, lo, hi, trials});
    };
    for (const auto& [key, acc] : groups) {
        push(key.first, key.second, "valid_rate", acc.valid, acc.rounds);
        push(key.first, key.second, "violation_rate", acc.violations, acc.checks);
        push(key.first, key.second, "throughput", acc.secrets, acc.rounds);
    }
    return rows;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "scheme,d,N,metric,value,ci_low,ci_high,n_samples\n";
    for (const auto& r : rows)
        out << r.scheme << ',' << r.d << ',' << r.n_recipients << ',' << r.metric
            << ',' << r.value << ',' << r.ci_low << ',' << r.ci_high << ','
            << r.n_samples << '\n';
    return out.str();
}

}  // namespace qss
