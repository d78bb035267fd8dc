// adversary.hpp
// Eavesdropping attack models installed as channel taps, the
// particle-number countermeasure, and detection/information statistics.
// Taps see only the in-flight pulse and the public announcements; party
// private residues stay out of reach.

#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modular.hpp"
#include "protocol.hpp"
#include "random.hpp"
#include "state.hpp"
#include "stats.hpp"

#include <json.hpp>

namespace qss {

enum class AttackKind { intercept_resend, substitute_qudit, multi_pulse };

inline std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::intercept_resend: return "intercept-resend";
        case AttackKind::substitute_qudit: return "substitute-qudit";
        case AttackKind::multi_pulse: return "multi-pulse";
    }
    return "?";
}

struct AdversaryConfig {
    AttackKind kind = AttackKind::intercept_resend;
    int link = 2;
    std::optional<int> fixed_basis;       // intercept-resend: pin Eve's basis
    double num_check_probability = 0.0;   // multi-pulse countermeasure rate
};

struct AttackReport {
    AttackKind kind = AttackKind::intercept_resend;
    int link = 0;
    int rounds_attacked = 0;
    double eve_guess_correct_rate = 0.0;
    double detection_rate = 0.0;  // violations per valid check round
    double ci_low = 0.0;          // Wilson interval on detection_rate
    double ci_high = 0.0;
    bool detected = false;
};

// Eve measures the carrier in a guessed MUB basis and forwards the
// collapsed state. With probability 1/d her basis matches the carrier's
// and the tap is exactly transparent.
class InterceptResendAttack {
public:
    explicit InterceptResendAttack(Dimension d, AdversaryConfig cfg)
        : d_(d), cfg_(cfg) {
        if (cfg.kind != AttackKind::intercept_resend)
            throw std::invalid_argument("wrong attack kind");
    }

    ChannelTap tap() {
        return {cfg_.link, [this](Pulse& pulse, RandomSource& rng) {
                    const int basis = cfg_.fixed_basis
                                          ? ModInt::reduce(*cfg_.fixed_basis, d_.value())
                                          : uniform_below(rng, d_.value());
                    auto meas = measure_in_basis(pulse[0], ModInt(basis, d_), rng);
                    pulse[0] = meas.post_state;
                    records_.push_back({basis, meas.outcome.value()});
                }};
    }

    struct Record { int basis; int outcome; };
    const std::vector<Record>& records() const { return records_; }

private:
    Dimension d_;
    AdversaryConfig cfg_;
    std::vector<Record> records_;
};

// Eve swaps her own |e_0^{(0)}> in on link 1, keeps the distributor's
// carrier, and on the return link hands that original back while keeping
// the qudit the recipients transformed. After the y announcements she
// measures her kept qudit and reads off the recipients' x sum.
class SubstituteQuditAttack {
public:
    explicit SubstituteQuditAttack(Dimension d, int n_parties)
        : d_(d), return_link_(n_parties) {}

    std::vector<ChannelTap> taps() {
        ChannelTap front{1, [this](Pulse& pulse, RandomSource&) {
                             retained_ = pulse[0];
                             pulse[0] = mub_vector(d_, {ModInt(0, d_), ModInt(0, d_)});
                         }};
        ChannelTap back{return_link_, [this](Pulse& pulse, RandomSource&) {
                            kept_.push_back(pulse[0]);
                            pulse[0] = *retained_;
                            retained_.reset();
                        }};
        return {front, back};
    }

    // Measurement of the kept qudit for one round, in the basis implied
    // by the recipients' announced y values.
    int recover(size_t round, int announced_y_sum, RandomSource& rng) const {
        const ModInt basis(announced_y_sum, d_);
        RandomSource local = rng;  // kept states are exact eigenstates
        auto meas = measure_in_basis(kept_.at(round), basis, local);
        return meas.outcome.value();
    }

    size_t kept_count() const { return kept_.size(); }

private:
    Dimension d_;
    int return_link_;
    std::optional<QuditState> retained_;
    std::vector<QuditState> kept_;
};

// Eve rides an extra probe qudit through one party's gate: injected on
// the link entering the party, collected on the link leaving it. The
// probe picks up the same phase gate, so classifying it reveals that
// party's (x, y). The particle-number countermeasure at the gate exit is
// what catches it.
class MultiPulseAttack {
public:
    MultiPulseAttack(Dimension d, int target_party) : d_(d), party_(target_party) {
        if (target_party < 2)
            throw std::invalid_argument("probe insertion needs an upstream link");
    }

    std::vector<ChannelTap> taps() {
        ChannelTap inject{party_ - 1, [this](Pulse& pulse, RandomSource&) {
                              pulse.push_back(
                                  mub_vector(d_, {ModInt(0, d_), ModInt(0, d_)}));
                          }};
        ChannelTap collect{party_, [this](Pulse& pulse, RandomSource&) {
                               auto label = classify(pulse.back());
                               ledger_.push_back(
                                   {label->l.value(), label->j.value()});
                               pulse.pop_back();
                           }};
        return {inject, collect};
    }

    struct Probe { int x; int y; };
    const std::vector<Probe>& ledger() const { return ledger_; }

private:
    Dimension d_;
    int party_;
    std::vector<Probe> ledger_;
};

// Probability the probe is caught at least once over r attacked rounds
// when the gate checks particle number with probability p per round.
inline double multi_pulse_detection_prob(double p, int rounds) {
    return 1.0 - std::pow(1.0 - p, (double)rounds);
}

// Runs a session with the chosen attack installed and aggregates what
// Eve learned against what the distributor could detect.
inline AttackReport evaluate_attack(ProtocolConfig config,
                                    const AdversaryConfig& adv, int n_rounds) {
    config.n_rounds = n_rounds;
    config.validate();
    const Dimension d(config.d);
    if (adv.link < 1 || adv.link > config.n_parties())
        throw std::invalid_argument("attack link out of range");

    AttackReport report;
    report.kind = adv.kind;
    report.link = adv.link;
    report.rounds_attacked = n_rounds;

    int valid_checks = 0;
    int violations = 0;
    int guess_trials = 0;
    int guess_hits = 0;

    if (adv.kind == AttackKind::intercept_resend) {
        InterceptResendAttack eve(d, adv);
        std::vector<ChannelTap> taps{eve.tap()};
        SessionTranscript ts = run_session(config, taps);
        for (size_t i = 0; i < ts.rounds.size(); ++i) {
            const RoundRecord& r = ts.rounds[i];
            if (r.is_check_round) {
                ++valid_checks;
                if (!*r.check_passed) ++violations;
            }
            if (!r.valid) continue;
            // Eve's guess of the partial shift sum up to the tapped link
            // is her recorded outcome.
            long long truth = 0;
            for (int n = 0; n < adv.link; ++n) truth += r.x[(size_t)n];
            ++guess_trials;
            if (eve.records()[i].outcome == ModInt::reduce(truth, config.d))
                ++guess_hits;
        }
        report.detected = ts.verdict == Verdict::corrupt;
    } else if (adv.kind == AttackKind::substitute_qudit) {
        SubstituteQuditAttack eve(d, config.n_parties());
        SessionTranscript ts = run_session(config, eve.taps());
        RandomSource eve_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
        for (size_t i = 0; i < ts.rounds.size(); ++i) {
            const RoundRecord& r = ts.rounds[i];
            if (r.is_check_round) {
                ++valid_checks;
                if (!*r.check_passed) ++violations;
            }
            if (!r.valid) continue;
            long long y_sum = 0, x_sum = 0;
            for (size_t n = 1; n < r.y.size(); ++n) {
                y_sum += r.y[n];
                x_sum += r.x[n];
            }
            ++guess_trials;
            if (eve.recover(i, (int)ModInt::reduce(y_sum, config.d), eve_rng) ==
                ModInt::reduce(x_sum, config.d))
                ++guess_hits;
        }
        report.detected = ts.verdict == Verdict::corrupt;
    } else {
        config.particle_check_probability = adv.num_check_probability;
        MultiPulseAttack eve(d, adv.link);
        SessionTranscript ts = run_session(config, eve.taps());
        for (size_t i = 0; i < ts.rounds.size(); ++i) {
            const RoundRecord& r = ts.rounds[i];
            if (!r.valid) continue;
            ++guess_trials;
            if (i < eve.ledger().size() &&
                eve.ledger()[i].x == r.x[(size_t)(adv.link - 1)] &&
                eve.ledger()[i].y == r.y[(size_t)(adv.link - 1)])
                ++guess_hits;
        }
        valid_checks = n_rounds;
        violations = ts.n_probe_flags;
        report.detected = ts.n_probe_flags > 0;
    }

    report.eve_guess_correct_rate =
        guess_trials > 0 ? (double)guess_hits / guess_trials : 0.0;
    report.detection_rate =
        valid_checks > 0 ? (double)violations / valid_checks : 0.0;
    auto [lo, hi] = wilson_interval(violations, valid_checks);
    report.ci_low = lo;
    report.ci_high = hi;
    return report;
}

inline nlohmann::json report_to_json(const AttackReport& r) {
    return {{"kind", to_string(r.kind)},
            {"link", r.link},
            {"rounds", r.rounds_attacked},
            {"guess_rate", r.eve_guess_correct_rate},
            {"detection_rate", r.detection_rate},
            {"ci_low", r.ci_low},
            {"ci_high", r.ci_high},
            {"detected", r.detected}};
}

inline std::string report_to_csv(const AttackReport& r) {
    std::ostringstream out;
    out << "kind,link,rounds,guess_rate,detection_rate,ci_low,ci_high\n"
        << to_string(r.kind) << ',' << r.link << ',' << r.rounds_attacked << ','
        << r.eve_guess_correct_rate << ',' << r.detection_rate << ','
        << r.ci_low << ',' << r.ci_high << '\n';
    return out.str();
}

}  // namespace qss
