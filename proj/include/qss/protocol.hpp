// protocol.hpp
// Single-qudit secret sharing rounds and sessions: the distributor
// prepares the carrier, every party applies a private phase gate as it
// relays, the distributor measures, and announcements determine validity,
// check rounds and the secret stream.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "modular.hpp"
#include "random.hpp"
#include "state.hpp"

#include <json.hpp>

namespace qss {

struct ProtocolConfig {
    int d = 3;
    int n_recipients = 2;      // N; total parties N+1 including the distributor
    int n_rounds = 1000;
    double check_fraction = 0.1;
    double corruption_threshold = 0.0;
    std::uint64_t seed = 0;
    double link_noise = 0.0;   // probability a link scrambles the carrier
    double particle_check_probability = 0.0;  // per-party particle-number check

    int n_parties() const { return n_recipients + 1; }

    void validate() const {
        Dimension dim(d);  // throws unless odd prime
        (void)dim;
        if (n_recipients < 1) throw std::invalid_argument("need at least one recipient");
        if (n_rounds < 1) throw std::invalid_argument("need at least one round");
        if (check_fraction < 0.0 || check_fraction >= 1.0)
            throw std::invalid_argument("check_fraction must be in [0,1)");
        if (corruption_threshold < 0.0 || corruption_threshold > 1.0)
            throw std::invalid_argument("corruption_threshold must be in [0,1]");
        if (link_noise < 0.0 || link_noise > 1.0)
            throw std::invalid_argument("link_noise must be in [0,1]");
    }
};

// The in-flight light pulse. Element 0 is the protocol carrier; anything
// beyond it is adversarial (extra probe qudits riding along).
using Pulse = std::vector<QuditState>;

// Attack insertion point. Link k carries the pulse from party k to party
// k+1 (1-based); link N+1 returns it to the distributor. The interceptor
// sees only the pulse, never any party's private residues.
struct ChannelTap {
    int link_index = 1;
    std::function<void(Pulse&, RandomSource&)> interceptor;
};

// One protocol round. Party index 0 is the distributor R1, indices
// 1..N are the recipients R2..R_{N+1}.
struct RoundRecord {
    int round_index = 0;
    std::vector<int> x;  // private shifts, one per party
    std::vector<int> y;  // private basis shifts, one per party
    int J = 0;           // distributor's measurement basis
    int a = 0;           // measurement outcome
    bool valid = false;
    bool is_check_round = false;
    std::optional<bool> check_passed;
    std::optional<int> x1_secret;
    std::vector<int> announce_order;  // party numbers 2..N+1, announcement sequence
    bool probe_flagged = false;       // particle-number countermeasure fired
};

enum class Verdict { clean, corrupt };

struct SessionTranscript {
    ProtocolConfig config;
    std::vector<RoundRecord> rounds;
    Verdict verdict = Verdict::clean;
    double observed_violation_rate = 0.0;
    std::vector<int> secret_stream;  // x1_secret of valid non-check rounds
    int n_probe_flags = 0;
};

// Test hook: pin party choices and/or the measurement basis. The
// production path always draws uniformly.
struct RoundForcing {
    std::optional<std::vector<int>> x;
    std::optional<std::vector<int>> y;
    std::optional<int> J;
};

// Uniform random announcement order for the N recipients.
inline std::vector<int> announce_order(RandomSource& rng, int n_recipients) {
    if (n_recipients < 1) throw std::invalid_argument("need at least one recipient");
    std::vector<int> order = random_permutation(rng, n_recipients);
    for (int& p : order) p += 2;  // party numbering R2..R_{N+1}
    return order;
}

namespace detail {

inline const ChannelTap* tap_on_link(const std::vector<ChannelTap>& taps, int link) {
    const ChannelTap* found = nullptr;
    for (const auto& t : taps) {
        if (t.link_index != link) continue;
        if (found) throw std::invalid_argument("multiple taps on one link");
        found = &t;
    }
    return found;
}

}  // namespace detail

// Executes one relay round: prepare |e_0^{(0)}>, per-party gate then
// per-link tap and noise, final measurement, validity and secret fields.
inline RoundRecord run_round(const ProtocolConfig& config, RandomSource& rng,
                             const std::vector<ChannelTap>& taps,
                             const RoundForcing& forcing = {}) {
    const Dimension d(config.d);
    const int parties = config.n_parties();
    for (const auto& t : taps)
        if (t.link_index < 1 || t.link_index > parties)
            throw std::invalid_argument("tap link out of range");

    RoundRecord rec;
    rec.x.resize((size_t)parties);
    rec.y.resize((size_t)parties);

    Pulse pulse;
    pulse.push_back(mub_vector(d, {ModInt(0, d), ModInt(0, d)}));

    for (int n = 0; n < parties; ++n) {
        rec.x[(size_t)n] = forcing.x ? (*forcing.x)[(size_t)n] % config.d
                                     : uniform_below(rng, config.d);
        rec.y[(size_t)n] = forcing.y ? (*forcing.y)[(size_t)n] % config.d
                                     : uniform_below(rng, config.d);
        const PhaseGate gate{ModInt(rec.x[(size_t)n], d), ModInt(rec.y[(size_t)n], d)};
        for (auto& q : pulse) q = apply_gate(q, gate);

        if (config.particle_check_probability > 0.0 &&
            uniform_unit(rng) < config.particle_check_probability &&
            pulse.size() > 1)
            rec.probe_flagged = true;

        if (const ChannelTap* tap = detail::tap_on_link(taps, n + 1))
            tap->interceptor(pulse, rng);

        if (config.link_noise > 0.0 && uniform_unit(rng) < config.link_noise) {
            const int l = uniform_below(rng, config.d);
            const int j = uniform_below(rng, config.d);
            pulse[0] = mub_vector(d, {ModInt(l, d), ModInt(j, d)});
        }
    }

    rec.J = forcing.J ? *forcing.J % config.d : uniform_below(rng, config.d);
    const auto meas = measure_in_basis(pulse[0], ModInt(rec.J, d), rng);
    rec.a = meas.outcome.value();

    long long sum_y = 0;
    for (int v : rec.y) sum_y += v;
    rec.valid = ModInt::reduce(sum_y, config.d) == rec.J;
    if (rec.valid)
        rec.x1_secret = ModInt::reduce((long long)rec.x[0] - rec.a, config.d);
    return rec;
}

// Recipients pool their shares; the result equals the distributor's reset
// secret x1 - a on honest noiseless rounds.
inline int reconstruct_secret(const std::vector<int>& shares, Dimension d,
                              int n_recipients) {
    if ((int)shares.size() != n_recipients)
        throw std::invalid_argument("need exactly one share per recipient");
    long long sum = 0;
    for (int s : shares) sum += s;
    return ModInt::reduce(-sum, d.value());
}

inline SessionTranscript run_session(const ProtocolConfig& config,
                                     const std::vector<ChannelTap>& taps = {}) {
    config.validate();
    RandomSource rng(config.seed);
    SessionTranscript ts;
    ts.config = config;
    ts.rounds.reserve((size_t)config.n_rounds);

    int check_rounds = 0;
    int violations = 0;
    for (int i = 0; i < config.n_rounds; ++i) {
        RoundRecord rec = run_round(config, rng, taps);
        rec.round_index = i;
        rec.announce_order = announce_order(rng, config.n_recipients);
        if (rec.valid) {
            // Check-round selection happens after validity is known;
            // invalid rounds carry no usable correlation to test.
            rec.is_check_round = uniform_unit(rng) < config.check_fraction;
            if (rec.is_check_round) {
                long long sum_x = 0;
                for (int v : rec.x) sum_x += v;
                rec.check_passed = ModInt::reduce(sum_x, config.d) == rec.a;
                ++check_rounds;
                if (!*rec.check_passed) ++violations;
            } else {
                ts.secret_stream.push_back(*rec.x1_secret);
            }
        }
        if (rec.probe_flagged) ++ts.n_probe_flags;
        ts.rounds.push_back(std::move(rec));
    }

    ts.observed_violation_rate =
        check_rounds > 0 ? (double)violations / check_rounds : 0.0;
    ts.verdict = ts.observed_violation_rate > config.corruption_threshold
                     ? Verdict::corrupt
                     : Verdict::clean;
    return ts;
}

// ---------------------------------------------------------------------
// Transcript serialization: line-delimited JSON, one round per line.
// The public view shows only what an outside observer of the classical
// channel sees: recipient y announcements, validity, check reveals.

enum class TranscriptView { full, public_only };

inline nlohmann::json round_to_json(const RoundRecord& r, TranscriptView view) {
    nlohmann::json o;
    o["round_index"] = r.round_index;
    if (view == TranscriptView::full) {
        o["y"] = r.y;
        o["J"] = r.J;
        o["x"] = r.x;
        o["a"] = r.a;
        if (r.x1_secret) o["x1_secret"] = *r.x1_secret;
    } else {
        std::vector<int> y_pub(r.y.begin() + 1, r.y.end());
        o["y"] = y_pub;
        if (r.is_check_round) {
            std::vector<int> x_pub(r.x.begin() + 1, r.x.end());
            o["x"] = x_pub;
        }
    }
    o["valid"] = r.valid;
    o["check"] = r.is_check_round;
    if (r.check_passed) o["check_passed"] = *r.check_passed;
    o["order"] = r.announce_order;
    return o;
}

inline std::string transcript_to_jsonl(const SessionTranscript& ts,
                                       TranscriptView view,
                                       const std::string& timestamp = "") {
    std::ostringstream out;
    nlohmann::json header;
    header["type"] = "header";
    header["d"] = ts.config.d;
    header["n_recipients"] = ts.config.n_recipients;
    header["n_rounds"] = ts.config.n_rounds;
    header["check_fraction"] = ts.config.check_fraction;
    header["corruption_threshold"] = ts.config.corruption_threshold;
    header["link_noise"] = ts.config.link_noise;
    if (view == TranscriptView::full) header["seed"] = ts.config.seed;
    if (!timestamp.empty()) header["generated_at"] = timestamp;
    out << header.dump() << '\n';
    for (const auto& r : ts.rounds) out << round_to_json(r, view).dump() << '\n';
    nlohmann::json summary;
    summary["type"] = "summary";
    summary["verdict"] = ts.verdict == Verdict::clean ? "clean" : "corrupt";
    summary["violation_rate"] = ts.observed_violation_rate;
    summary["n_secret_digits"] = ts.secret_stream.size();
    out << summary.dump() << '\n';
    return out.str();
}

}  // namespace qss
