// qss: command-line frontend for the single-qudit secret sharing
// simulator. Subcommands: run, attack, compare, verify-mubs.
// Exit codes: 0 clean, 2 corrupt/failed verification, 3 config error,
// 4 I/O error.

#include <qss/adversary.hpp>
#include <qss/analysis.hpp>
#include <qss/ghz.hpp>
#include <qss/protocol.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitClean = 0;
constexpr int kExitCorrupt = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("QSS_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// Applies a flat key=value config file to the protocol settings. Keys use
// the same spelling as the long flags (without the leading dashes); values
// given on the command line take precedence over the file.
void apply_config_file(const std::string& path, const CLI::App& sub,
                       qss::ProtocolConfig& proto,
                       std::optional<std::uint64_t>& seed_flag) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file " + path);
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        static const std::vector<std::string> known{
            "d", "recipients", "rounds", "check-fraction",
            "threshold", "link-noise", "seed"};
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        if (sub.count("--" + key) > 0) continue;
        try {
            if (key == "d") proto.d = std::stoi(val);
            else if (key == "recipients") proto.n_recipients = std::stoi(val);
            else if (key == "rounds") proto.n_rounds = std::stoi(val);
            else if (key == "check-fraction") proto.check_fraction = std::stod(val);
            else if (key == "threshold") proto.corruption_threshold = std::stod(val);
            else if (key == "link-noise") proto.link_noise = std::stod(val);
            else seed_flag = std::stoull(val);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": bad value '" + val + "' for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": value out of range for '" + key + "'");
        }
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string());
    out << content;
    if (!out) throw std::ios_base::failure("write failed on " + path.string());
}

int cmd_run(const qss::ProtocolConfig& cfg, const std::string& out_dir, bool quiet) {
    auto ts = qss::run_session(cfg);
    const std::string stamp = now_iso8601();
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::filesystem::path dir(out_dir);
        write_file(dir / "transcript_full.jsonl",
                   qss::transcript_to_jsonl(ts, qss::TranscriptView::full, stamp));
        write_file(dir / "transcript_public.jsonl",
                   qss::transcript_to_jsonl(ts, qss::TranscriptView::public_only, stamp));
        write_file(dir / "summary.csv", qss::summary_csv(qss::aggregate({ts})));
    }
    int valid = 0;
    for (const auto& r : ts.rounds) valid += r.valid ? 1 : 0;
    if (!quiet) {
        std::cout << "verdict: "
                  << (ts.verdict == qss::Verdict::clean ? "clean" : "corrupt") << '\n'
                  << "valid rounds: " << valid << "/" << cfg.n_rounds << " ("
                  << (double)valid / cfg.n_rounds << ")\n"
                  << "violation rate: " << ts.observed_violation_rate << '\n'
                  << "secret digits: " << ts.secret_stream.size() << '\n';
    }
    return ts.verdict == qss::Verdict::clean ? kExitClean : kExitCorrupt;
}

int cmd_attack(const qss::ProtocolConfig& cfg, const qss::AdversaryConfig& adv,
               int rounds, const std::string& out_file, const std::string& format) {
    auto report = qss::evaluate_attack(cfg, adv, rounds);
    const std::string text = format == "csv"
                                 ? qss::report_to_csv(report)
                                 : qss::report_to_json(report).dump() + "\n";
    if (out_file.empty())
        std::cout << text;
    else
        write_file(out_file, text);
    std::cerr << "attack " << qss::to_string(adv.kind)
              << ": guess_rate=" << report.eve_guess_correct_rate
              << " detection_rate=" << report.detection_rate
              << (report.detected ? " (detected)" : " (undetected)") << '\n';
    return kExitClean;
}

bool verify_mubs(int d_value, std::ostream& out) {
    using namespace qss;
    Dimension d(d_value);
    bool ok = true;
    int pairs = 0;
    for (int j = 0; j < d_value && ok; ++j)
        for (int jp = j + 1; jp < d_value && ok; ++jp)
            for (int l = 0; l < d_value && ok; ++l)
                for (int lp = 0; lp < d_value && ok; ++lp) {
                    ++pairs;
                    const double ov = overlap_sq(
                        mub_vector(d, {ModInt(l, d), ModInt(j, d)}),
                        mub_vector(d, {ModInt(lp, d), ModInt(jp, d)}));
                    if (std::abs(ov - 1.0 / d_value) > 1e-9) ok = false;
                }
    out << "unbiasedness: " << pairs << " cross-basis pairs checked, "
        << (ok ? "all 1/d" : "FAILED") << '\n';

    bool cyc = true;
    for (int l = 0; l < d_value && cyc; ++l)
        for (int j = 0; j < d_value && cyc; ++j)
            for (int x = 0; x < d_value && cyc; ++x)
                for (int y = 0; y < d_value && cyc; ++y) {
                    auto label = classify(apply_gate(
                        mub_vector(d, {ModInt(l, d), ModInt(j, d)}),
                        {ModInt(x, d), ModInt(y, d)}));
                    if (!label || label->l.value() != (l + x) % d_value ||
                        label->j.value() != (j + y) % d_value)
                        cyc = false;
                }
    out << "cyclic action: " << d_value * d_value * d_value * d_value
        << " gate applications checked, " << (cyc ? "all consistent" : "FAILED")
        << '\n';
    return ok && cyc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-qudit (N,N) secret sharing simulator"};
    app.require_subcommand(1);

    qss::ProtocolConfig proto;
    std::optional<std::uint64_t> seed_flag;
    std::string config_path;
    auto add_protocol_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "flat key=value config file (flags override file values)");
        sub->add_option("--d", proto.d, "qudit dimension (odd prime)");
        sub->add_option("--recipients", proto.n_recipients, "number of recipients N");
        sub->add_option("--rounds", proto.n_rounds, "protocol rounds");
        sub->add_option("--check-fraction", proto.check_fraction,
                        "fraction of valid rounds sacrificed to checking");
        sub->add_option("--threshold", proto.corruption_threshold,
                        "violation rate above which the session is corrupt");
        sub->add_option("--link-noise", proto.link_noise,
                        "per-link carrier scrambling probability");
        sub->add_option("--seed", seed_flag, "RNG seed (QSS_SEED env as fallback)");
    };

    auto* run = app.add_subcommand("run", "run honest sessions and write transcripts");
    add_protocol_flags(run);
    std::string out_dir;
    bool quiet = false;
    run->add_option("--out", out_dir, "output directory for transcript files");
    run->add_flag("--quiet", quiet, "suppress the summary printout");

    auto* attack = app.add_subcommand("attack", "run a session under attack");
    add_protocol_flags(attack);
    std::string kind = "intercept-resend";
    int link = 2;
    std::optional<int> fixed_basis;
    double num_check = 0.0;
    std::string attack_out, attack_format = "jsonl";
    attack->add_option("--kind", kind, "intercept-resend | substitute-qudit | multi-pulse")
        ->check(CLI::IsMember({"intercept-resend", "substitute-qudit", "multi-pulse"}));
    attack->add_option("--link", link, "tapped link (1..N+1)");
    attack->add_option("--basis", fixed_basis, "fix Eve's measurement basis");
    attack->add_option("--num-check", num_check,
                       "particle-number countermeasure probability");
    attack->add_option("--out", attack_out, "report file (default stdout)");
    attack->add_option("--format", attack_format, "jsonl | csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    auto* compare = app.add_subcommand("compare", "efficiency comparison tables");
    int cmp_n = 10, cmp_d = 23;
    double cmp_p = 0.8;
    std::optional<int> cmp_m;
    std::vector<double> etas{1.0};
    std::string cmp_out;
    bool cmp_verify = false;
    int verify_d = 3;
    compare->add_option("--N", cmp_n, "number of recipients");
    compare->add_option("--d", cmp_d, "encoding dimension");
    compare->add_option("--p", cmp_p, "target success probability");
    compare->add_option("--m", cmp_m, "evaluate success at a fixed round count");
    compare->add_option("--eta", etas, "detector efficiencies to tabulate");
    compare->add_option("--out", cmp_out, "CSV file (default stdout)");
    compare->add_flag("--verify-mubs", cmp_verify, "run the MUB verification suite instead");

    auto* verify = app.add_subcommand("verify-mubs", "exhaustive MUB property check");
    verify->add_option("--d", verify_d, "qudit dimension (odd prime)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitConfig;
    }

    try {
        if (!config_path.empty())
            apply_config_file(config_path, *run ? *run : *attack, proto, seed_flag);
        proto.seed = resolve_seed(seed_flag);
        if (*run) return cmd_run(proto, out_dir, quiet);
        if (*attack) {
            qss::AdversaryConfig adv;
            if (kind == "intercept-resend") adv.kind = qss::AttackKind::intercept_resend;
            else if (kind == "substitute-qudit") adv.kind = qss::AttackKind::substitute_qudit;
            else adv.kind = qss::AttackKind::multi_pulse;
            adv.link = link;
            adv.fixed_basis = fixed_basis;
            adv.num_check_probability = num_check;
            return cmd_attack(proto, adv, proto.n_rounds, attack_out, attack_format);
        }
        if (*verify || (*compare && cmp_verify)) {
            const int d = *verify ? verify_d : cmp_d;
            return verify_mubs(d, std::cout) ? kExitClean : kExitCorrupt;
        }
        // compare: QKD round counts plus detector scaling per scheme
        std::ostringstream csv;
        csv << "scheme,d,N,metric,value,ci_low,ci_high,n_samples\n";
        const int m = cmp_m ? *cmp_m : qss::qkd_rounds(cmp_n, cmp_d, cmp_p);
        csv << "qkd," << cmp_d << ',' << cmp_n << ",rounds_m," << m << ",,,\n";
        csv << "qkd," << cmp_d << ',' << cmp_n << ",p_success,"
            << qss::qkd_success(cmp_n, cmp_d, m) << ",,,\n";
        for (double eta : etas)
            for (auto scheme : {qss::Scheme::ghz, qss::Scheme::single_qudit, qss::Scheme::qkd})
                csv << qss::to_string(scheme) << ',' << cmp_d << ',' << cmp_n
                    << ",detection_scaling(eta=" << eta << "),"
                    << qss::detection_scaling(scheme, cmp_n, eta) << ",,,\n";
        if (cmp_out.empty())
            std::cout << csv.str();
        else
            write_file(cmp_out, csv.str());
        return kExitClean;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}
