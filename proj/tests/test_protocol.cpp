#include <catch_amalgamated.hpp>

#include <qss/protocol.hpp>

#include <json.hpp>

#include <cmath>
#include <array>
#include <map>
#include <sstream>
#include <tuple>

using namespace qss;

TEST_CASE("forced all-zero round is a valid identity round") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    RandomSource rng(1);
    RoundForcing f;
    f.x = std::vector<int>{0, 0, 0};
    f.y = std::vector<int>{0, 0, 0};
    f.J = 0;
    auto rec = run_round(cfg, rng, {}, f);
    CHECK(rec.valid);
    CHECK(rec.a == 0);
    REQUIRE(rec.x1_secret.has_value());
    CHECK(*rec.x1_secret == 0);
}

TEST_CASE("worked round d=3 N=2") {
    // x=(1,2,1), y=(0,1,2), J=0: sum y = 3 = 0 mod 3 so valid, and the
    // carrier ends as the eigenvector e_{sum x}^{(0)}, so a = 4 mod 3 = 1.
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    RandomSource rng(1);
    RoundForcing f;
    f.x = std::vector<int>{1, 2, 1};
    f.y = std::vector<int>{0, 1, 2};
    f.J = 0;
    auto rec = run_round(cfg, rng, {}, f);
    CHECK(rec.valid);
    CHECK(rec.a == 1);
    REQUIRE(rec.x1_secret.has_value());
    CHECK(*rec.x1_secret == 0);

    // independent oracle: build the final state amplitude-by-amplitude
    // from the product formula and locate its basis-0 eigen-index
    Dimension d(3);
    std::vector<Complex> amp(3);
    for (int k = 0; k < 3; ++k) {
        long long e = 0;
        for (int n = 0; n < 3; ++n)
            e += (long long)k * (*f.x)[(size_t)n] + (long long)k * k * (*f.y)[(size_t)n];
        amp[(size_t)k] = omega_pow(3, e) / std::sqrt(3.0);
    }
    auto label = classify(QuditState(std::move(amp)));
    REQUIRE(label.has_value());
    CHECK(label->j.value() == 0);
    CHECK(label->l.value() == rec.a);
}

TEST_CASE("invalid rounds have uniform outcomes") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    RandomSource rng(21);
    const int trials = 30000;
    int counts[3] = {0};
    int invalid = 0;
    for (int i = 0; i < trials; ++i) {
        auto rec = run_round(cfg, rng, {});
        if (!rec.valid) {
            ++invalid;
            ++counts[rec.a];
            CHECK_FALSE(rec.x1_secret.has_value());
        }
    }
    const double p = 1.0 / 3;
    const double sigma = std::sqrt(invalid * p * (1 - p));
    for (int c : counts) REQUIRE(std::abs(c - invalid * p) < 3.0 * sigma);
}

TEST_CASE("validity depends only on y and J") {
    ProtocolConfig cfg;
    cfg.d = 5;
    cfg.n_recipients = 3;
    RoundForcing f;
    f.y = std::vector<int>{1, 4, 2, 3};
    f.J = 0;
    for (auto x : {std::vector<int>{0, 1, 2, 3}, std::vector<int>{3, 2, 1, 0},
                   std::vector<int>{4, 4, 4, 4}}) {
        RandomSource rng(3);
        f.x = x;
        auto rec = run_round(cfg, rng, {}, f);
        REQUIRE(rec.valid);  // 1+4+2+3 = 10 = 0 mod 5
    }
    f.J = 1;
    RandomSource rng(3);
    f.x = std::vector<int>{0, 0, 0, 0};
    CHECK_FALSE(run_round(cfg, rng, {}, f).valid);
}

TEST_CASE("in-flight carrier tracks partial sums") {
    ProtocolConfig cfg;
    cfg.d = 5;
    cfg.n_recipients = 3;
    RoundForcing f;
    f.x = std::vector<int>{2, 4, 1, 3};
    f.y = std::vector<int>{1, 0, 4, 2};
    f.J = 0;

    std::vector<std::pair<int, int>> seen;
    std::vector<ChannelTap> taps;
    for (int link = 1; link <= 4; ++link)
        taps.push_back({link, [&seen](Pulse& pulse, RandomSource&) {
                            auto label = classify(pulse[0]);
                            REQUIRE(label.has_value());
                            seen.push_back({label->l.value(), label->j.value()});
                        }});
    RandomSource rng(8);
    run_round(cfg, rng, taps, f);
    REQUIRE(seen.size() == 4);
    int sx = 0, sy = 0;
    for (int n = 0; n < 4; ++n) {
        sx = (sx + (*f.x)[(size_t)n]) % 5;
        sy = (sy + (*f.y)[(size_t)n]) % 5;
        CHECK(seen[(size_t)n] == std::make_pair(sx, sy));
    }
}

TEST_CASE("reconstruct_secret") {
    Dimension d3(3), d5(5);
    CHECK(reconstruct_secret({2, 1}, d3, 2) == 0);
    CHECK(reconstruct_secret({0, 0}, d3, 2) == 0);
    CHECK(reconstruct_secret({1, 1, 1, 1}, d5, 4) == 1);
    CHECK_THROWS_AS(reconstruct_secret({1, 2, 3}, d3, 2), std::invalid_argument);
}

TEST_CASE("honest session is clean with valid rate near 1/d") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    cfg.n_rounds = 10000;
    cfg.check_fraction = 0.2;
    cfg.seed = 77;
    auto ts = run_session(cfg);
    CHECK(ts.verdict == Verdict::clean);
    CHECK(ts.observed_violation_rate == 0.0);

    int valid = 0;
    for (const auto& r : ts.rounds) {
        if (!r.valid) continue;
        ++valid;
        long long sx = 0;
        for (int v : r.x) sx += v;
        REQUIRE(sx % 3 == r.a);  // perfect correlation on valid rounds
        std::vector<int> shares(r.x.begin() + 1, r.x.end());
        REQUIRE(reconstruct_secret(shares, Dimension(3), 2) == *r.x1_secret);
    }
    const double p = 1.0 / 3;
    const double sigma = std::sqrt(cfg.n_rounds * p * (1 - p));
    CHECK(std::abs(valid - cfg.n_rounds * p) < 3.0 * sigma);
    CHECK(ts.secret_stream.size() > 0);
}

TEST_CASE("zero check fraction never corrupts") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    cfg.n_rounds = 500;
    cfg.check_fraction = 0.0;
    cfg.seed = 5;
    cfg.link_noise = 0.5;  // even heavy noise leaves no evidence channel
    auto ts = run_session(cfg);
    CHECK(ts.verdict == Verdict::clean);
    for (const auto& r : ts.rounds) CHECK_FALSE(r.is_check_round);
}

TEST_CASE("link noise triggers the corruption verdict") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    cfg.n_rounds = 5000;
    cfg.check_fraction = 0.5;
    cfg.seed = 13;
    cfg.link_noise = 0.3;
    cfg.corruption_threshold = 0.05;
    auto ts = run_session(cfg);
    CHECK(ts.verdict == Verdict::corrupt);
    CHECK(ts.observed_violation_rate > 0.05);
}

TEST_CASE("announce_order") {
    RandomSource rng(3);
    CHECK(announce_order(rng, 1) == std::vector<int>{2});

    RandomSource a(42), b(42);
    CHECK(announce_order(a, 3) == announce_order(b, 3));

    std::map<std::vector<int>, int> counts;
    RandomSource rng2(9);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) ++counts[announce_order(rng2, 3)];
    REQUIRE(counts.size() == 6);
    const double p = 1.0 / 6;
    const double sigma = std::sqrt(trials * p * (1 - p));
    for (const auto& [order, c] : counts)
        REQUIRE(std::abs(c - trials * p) < 3.0 * sigma);
}

TEST_CASE("public transcript view hides distributor data") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    cfg.n_rounds = 400;
    cfg.check_fraction = 0.3;
    cfg.seed = 4;
    auto ts = run_session(cfg);
    std::istringstream in(transcript_to_jsonl(ts, TranscriptView::public_only));
    std::string line;
    int round_lines = 0;
    while (std::getline(in, line)) {
        auto o = nlohmann::json::parse(line);
        if (o.contains("type")) continue;  // header/summary
        ++round_lines;
        CHECK_FALSE(o.contains("J"));
        CHECK_FALSE(o.contains("a"));
        CHECK_FALSE(o.contains("x1_secret"));
        REQUIRE(o["y"].size() == 2);  // recipients only, no y1
        if (o.contains("x")) {
            CHECK(o["check"].get<bool>());
            CHECK(o["x"].size() == 2);  // no x1
        }
    }
    CHECK(round_lines == cfg.n_rounds);
}

TEST_CASE("full transcript serialization is deterministic") {
    ProtocolConfig cfg;
    cfg.d = 5;
    cfg.n_recipients = 3;
    cfg.n_rounds = 200;
    cfg.check_fraction = 0.2;
    cfg.seed = 31337;
    auto a = transcript_to_jsonl(run_session(cfg), TranscriptView::full);
    auto b = transcript_to_jsonl(run_session(cfg), TranscriptView::full);
    CHECK(a == b);
}

TEST_CASE("config validation") {
    ProtocolConfig cfg;
    cfg.d = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.d = 3;
    cfg.n_recipients = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n_recipients = 2;
    cfg.check_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.check_fraction = 0.1;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("duplicate taps on one link are rejected") {
    ProtocolConfig cfg;
    cfg.d = 3;
    cfg.n_recipients = 2;
    RandomSource rng(1);
    auto noop = [](Pulse&, RandomSource&) {};
    std::vector<ChannelTap> taps{{1, noop}, {1, noop}};
    CHECK_THROWS_AS(run_round(cfg, rng, taps), std::invalid_argument);
}

TEST_CASE("exhaustive secrecy at d=3 N=2") {
    // For every conditioning cell (public y announcements, validity, one
    // recipient's private pair) the distributor's secret digit is exactly
    // uniform. Integer counting over all valid configurations.
    const int d = 3;
    for (int observer = 1; observer <= 2; ++observer) {
        std::map<std::tuple<int, int, int, int, int>, std::array<int, 3>> hist;
        for (int x1 = 0; x1 < d; ++x1)
            for (int x2 = 0; x2 < d; ++x2)
                for (int x3 = 0; x3 < d; ++x3)
                    for (int y1 = 0; y1 < d; ++y1)
                        for (int y2 = 0; y2 < d; ++y2)
                            for (int y3 = 0; y3 < d; ++y3)
                                for (int J = 0; J < d; ++J) {
                                    if ((y1 + y2 + y3) % d != J) continue;
                                    const int a = (x1 + x2 + x3) % d;
                                    const int secret = ((x1 - a) % d + d) % d;
                                    const int xo = observer == 1 ? x2 : x3;
                                    const int yo = observer == 1 ? y2 : y3;
                                    ++hist[{y2, y3, J, xo, yo}][(size_t)secret];
                                }
        for (const auto& [cell, counts] : hist) {
            REQUIRE(counts[0] == counts[1]);
            REQUIRE(counts[1] == counts[2]);
        }
    }
}
