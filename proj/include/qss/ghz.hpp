// ghz.hpp
// Brute-force reference for the entanglement-based protocol: exact joint
// outcome distribution of local MUB measurements on a (N+1)-party d-level
// GHZ state, desk-scale sampling, and the map identifying single-qudit
// rounds with GHZ outcomes.

#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "modular.hpp"
#include "protocol.hpp"
#include "random.hpp"
#include "state.hpp"

namespace qss {

struct GhzSpec {
    Dimension d;
    int n_parties;  // N+1

    GhzSpec(Dimension dim, int parties) : d(dim), n_parties(parties) {
        if (parties < 2) throw std::invalid_argument("GHZ needs at least 2 parties");
        double table = std::pow((double)d.value(), (double)parties);
        if (table > 1e6)
            throw std::invalid_argument("joint outcome table exceeds memory guard");
    }

    std::int64_t table_size() const {
        std::int64_t s = 1;
        for (int i = 0; i < n_parties; ++i) s *= d.value();
        return s;
    }
};

struct JointOutcome {
    std::vector<int> l;  // one local result per party
    std::vector<int> j;  // one local basis per party
};

// P(l_1..l_{N+1} | j_1..j_{N+1}) = |sum_k omega^{-sum_n (k l_n + k^2 j_n)}|^2 / d^{N+2}.
inline double joint_prob(const GhzSpec& spec, const JointOutcome& outcome) {
    const int d = spec.d.value();
    if ((int)outcome.l.size() != spec.n_parties ||
        (int)outcome.j.size() != spec.n_parties)
        throw std::invalid_argument("outcome arity does not match spec");
    Complex sum{0.0, 0.0};
    for (int k = 0; k < d; ++k) {
        long long e = 0;
        for (int n = 0; n < spec.n_parties; ++n)
            e += (long long)k * outcome.l[(size_t)n] +
                 (long long)k * k * outcome.j[(size_t)n];
        sum += omega_pow(d, -e);
    }
    double denom = 1.0;  // d^{N+2} with N+1 = n_parties
    for (int i = 0; i <= spec.n_parties; ++i) denom *= d;
    return std::norm(sum) / denom;
}

namespace detail {

inline std::vector<int> unrank_tuple(std::int64_t idx, int d, int n) {
    std::vector<int> t((size_t)n);
    for (int i = n - 1; i >= 0; --i) {
        t[(size_t)i] = (int)(idx % d);
        idx /= d;
    }
    return t;
}

}  // namespace detail

struct GhzRound {
    JointOutcome outcome;
    bool valid = false;  // sum of bases vanishes mod d
};

// Draws each basis uniformly, then samples the l-tuple from the exact
// conditional table.
inline GhzRound sample_round(const GhzSpec& spec, RandomSource& rng) {
    const int d = spec.d.value();
    GhzRound round;
    round.outcome.j.resize((size_t)spec.n_parties);
    long long sum_j = 0;
    for (int n = 0; n < spec.n_parties; ++n) {
        round.outcome.j[(size_t)n] = uniform_below(rng, d);
        sum_j += round.outcome.j[(size_t)n];
    }
    round.valid = ModInt::reduce(sum_j, d) == 0;

    const std::int64_t cells = spec.table_size();
    std::vector<double> probs((size_t)cells);
    double total = 0.0;
    JointOutcome cell;
    cell.j = round.outcome.j;
    for (std::int64_t i = 0; i < cells; ++i) {
        cell.l = detail::unrank_tuple(i, d, spec.n_parties);
        probs[(size_t)i] = joint_prob(spec, cell);
        total += probs[(size_t)i];
    }
    // Conditional on j the display normalizes to 1; renormalize away
    // rounding dust before inverse-CDF sampling.
    const double u = uniform_unit(rng) * total;
    double cum = 0.0;
    std::int64_t picked = cells - 1;
    for (std::int64_t i = 0; i < cells; ++i) {
        cum += probs[(size_t)i];
        if (u < cum) { picked = i; break; }
    }
    round.outcome.l = detail::unrank_tuple(picked, d, spec.n_parties);
    return round;
}

// Maps a valid single-qudit round onto a GHZ joint outcome: y_n plays the
// basis role and x_n the local result, with the distributor's entries
// reset (x1 -> x1 - a, y1 -> y1 - J) so both sums vanish mod d.
inline JointOutcome equivalence_map(const RoundRecord& round, Dimension d) {
    if (!round.valid) throw std::invalid_argument("round is not valid");
    JointOutcome out;
    out.l.reserve(round.x.size());
    out.j.reserve(round.y.size());
    out.l.push_back(ModInt::reduce((long long)round.x[0] - round.a, d.value()));
    out.j.push_back(ModInt::reduce((long long)round.y[0] - round.J, d.value()));
    for (size_t n = 1; n < round.x.size(); ++n) {
        out.l.push_back(round.x[n]);
        out.j.push_back(round.y[n]);
    }
    return out;
}

// Full joint table as CSV: l-tuple, j-tuple, probability.
inline std::string joint_table_csv(const GhzSpec& spec) {
    const int d = spec.d.value();
    const std::int64_t cells = spec.table_size();
    std::ostringstream out;
    out << "l,j,probability\n";
    JointOutcome cell;
    for (std::int64_t ji = 0; ji < cells; ++ji) {
        cell.j = detail::unrank_tuple(ji, d, spec.n_parties);
        for (std::int64_t li = 0; li < cells; ++li) {
            cell.l = detail::unrank_tuple(li, d, spec.n_parties);
            for (int n = 0; n < spec.n_parties; ++n)
                out << cell.l[(size_t)n] << (n + 1 < spec.n_parties ? ' ' : ',');
            for (int n = 0; n < spec.n_parties; ++n)
                out << cell.j[(size_t)n] << (n + 1 < spec.n_parties ? ' ' : ',');
            out << joint_prob(spec, cell) << '\n';
        }
    }
    return out.str();
}

}  // namespace qss
