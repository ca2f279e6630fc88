#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sentinel/behavior.hpp"
#include "sentinel/http_api.hpp"
#include "sentinel/scoring.hpp"
#include "sentinel/screening.hpp"
#include "sentinel/service.hpp"
#include "sentinel/simulator.hpp"
#include "sentinel/validate.hpp"
#include "sentinel/wire.hpp"

namespace sentinel::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kDataDirEnv = "POLLUTION_SENTINEL_DATA_DIR";

/// Operator mistakes that end the command with exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

std::string read_input(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    ss << in.rdbuf();
    return ss.str();
}

/// Runs `write` against the named file, or against `out` for "-".
template <typename F>
void with_output(const std::string& path, std::ostream& out, F&& write) {
    if (path.empty() || path == "-") {
        write(out);
        out.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw UsageError("cannot write " + path);
    write(file);
    file.flush();
    if (!file) throw UsageError("cannot write " + path);
}

StudyConfig study_config(const std::string& path) {
    return path.empty() ? default_study_config() : load_study_config(path);
}

fs::path data_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') return env;
    throw UsageError(std::string("no data directory: pass --data-dir or set ") + kDataDirEnv);
}

std::map<sim::ProfileKind, int> parse_mix(const std::string& spec, int n) {
    std::map<sim::ProfileKind, int> mix;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        const auto name = part.substr(0, colon);
        const auto kind = sim::parse_profile_kind(name);
        if (!kind) throw UsageError("unknown profile '" + name + "'");
        int count = n;
        if (colon != std::string::npos) {
            try {
                count = std::stoi(part.substr(colon + 1));
            } catch (const std::exception&) {
                throw UsageError("bad count in '" + part + "'");
            }
        }
        if (count < 0) throw UsageError("negative count in '" + part + "'");
        mix[*kind] += count;
    }
    if (mix.empty()) throw UsageError("no profile given");
    return mix;
}

// ---- serve ------------------------------------------------------------------

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string config;
    std::string data_dir;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    service::ServiceOptions opts;
    opts.data_dir = data_dir(a.data_dir);
    service::TelemetryService svc(opts);
    if (!a.config.empty()) svc.register_study(load_study_config(a.config));

    httplib::Server server;
    service::install_routes(server, svc);

    // Signals are taken synchronously by a waiter thread that stops the server.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);
    std::atomic<bool> done{false};
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        if (!done.exchange(true)) server.stop();
    });

    int port = a.port;
    bool bound = true;
    if (port == 0) {
        port = server.bind_to_any_port(a.host);
        bound = port > 0;
    } else {
        bound = server.bind_to_port(a.host, port);
    }
    int rc = 0;
    if (!bound) {
        err << "error: cannot bind " << a.host << ":" << a.port << "\n";
        rc = kExitError;
    } else {
        out << "listening on " << a.host << ":" << port << std::endl;
        server.listen_after_bind();
    }
    if (!done.exchange(true)) pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    if (rc == 0) out << "stopped" << std::endl;
    return rc;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string profile;
    int n = 1;
    std::uint64_t seed = 0;
    std::string config;
    std::string out = "-";
    std::string labels_out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto cfg = study_config(a.config);
    const auto corpus = sim::generate_corpus(parse_mix(a.profile, a.n), cfg, a.seed);
    with_output(a.out, out, [&](std::ostream& o) {
        for (const auto& l : corpus) o << wire::canonical_encode(l.session);
    });
    std::string labels = a.labels_out;
    if (labels.empty() && a.out != "-") labels = a.out + ".labels.json";
    if (!labels.empty()) {
        with_output(labels, out, [&](std::ostream& o) { o << sim::labels_to_json(corpus).dump(2) << "\n"; });
    }
    return kExitPass;
}

// ---- score ------------------------------------------------------------------

struct ScoreArgs {
    std::string input;
    std::string config;
    std::string out = "-";
    std::string features_out;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = study_config(a.config);
    const auto bytes = read_input(a.input);
    std::vector<SessionRecord> sessions;
    try {
        sessions = wire::decode_stream(bytes);
    } catch (const wire::ParseError& e) {
        err << "error: " << a.input << ": " << e.what() << "\n";
        return kExitError;
    }
    for (const auto& s : sessions) {
        for (const auto& v : validate_session(s, &cfg)) {
            err << "warning: session " << s.session_id << ": " << describe(v) << "\n";
        }
    }
    const auto assessments = pipeline::assess_corpus(sessions, cfg);
    int rc = kExitPass;
    with_output(a.out, out, [&](std::ostream& o) {
        for (const auto& as : assessments) {
            o << scoring::assessment_to_json(as).dump() << "\n";
            if (as.decision == Decision::exclude) rc = kExitExclude;
            else if (as.decision == Decision::flag && rc == kExitPass) rc = kExitFlag;
        }
    });
    if (!a.features_out.empty()) {
        with_output(a.features_out, out, [&](std::ostream& o) {
            for (const auto& s : sessions) {
                ojson line;
                line["session_id"] = s.session_id;
                const auto features = behavior::features_to_json(behavior::extract_features(s, cfg.behavior));
                for (const auto& [k, v] : features.items()) line[k] = ojson::parse(v.dump());
                o << line.dump() << "\n";
            }
        });
    }
    return rc;
}

// ---- report -----------------------------------------------------------------

struct ReportArgs {
    std::string data_dir;
    std::string study;
    std::string format = "table";
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
    service::ServiceOptions opts;
    opts.data_dir = data_dir(a.data_dir);
    if (!fs::exists(*opts.data_dir)) throw UsageError("data directory " + opts.data_dir->string() + " does not exist");
    const service::TelemetryService svc(opts);
    const auto r = svc.study_report(a.study);
    if (a.format == "ndjson") {
        out << report::report_to_json(r).dump() << "\n";
    } else {
        out << report::render_table(r);
    }
    return kExitPass;
}

// ---- gen-traps / check-text -------------------------------------------------

int cmd_gen_traps(const std::string& config, std::optional<std::uint64_t> seed, std::ostream& out) {
    auto cfg = study_config(config);
    if (seed) {
        cfg.trap_settings.seed = *seed;
        finalize_study_config(cfg);
    }
    ojson j;
    j["study"] = cfg.study_id;
    j["seed"] = cfg.trap_settings.seed;
    j["traps"] = service::traps_to_json(cfg.traps);
    out << j.dump(2) << "\n";
    return kExitPass;
}

int cmd_check_text(const std::string& input, const std::string& config, std::ostream& out) {
    const auto cfg = study_config(config);
    auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
    std::istringstream lines(read_input(input));
    std::string text;
    // One response per line; blank lines keep their number but produce nothing.
    for (int line_no = 1; std::getline(lines, text); ++line_no) {
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        const auto r = screening::stylometric_flags(text, cfg.text);
        ojson hits = ojson::array();
        for (const auto& h : r.profile.marker_phrase_hits) {
            hits.push_back({{"pattern", h.pattern_id}, {"begin", h.begin}, {"end", h.end}});
        }
        ojson j;
        j["line"] = line_no;
        j["word_count"] = r.profile.word_count;
        j["hedge_density"] = opt(r.profile.hedge_density);
        j["mean_sentence_len"] = opt(r.profile.mean_sentence_len);
        j["sentence_len_cv"] = opt(r.profile.sentence_len_cv);
        j["type_token_ratio"] = opt(r.profile.type_token_ratio);
        j["marker_phrase_hits"] = std::move(hits);
        j["flagged"] = r.signal.has_value();
        j["signal"] = r.signal ? scoring::signal_to_json(*r.signal) : ojson(nullptr);
        out << j.dump() << "\n";
    }
    return kExitPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Detects machine involvement in online behavioural studies.", "pollution-sentinel"};
    app.require_subcommand(1);

    ServeArgs serve;
    auto* s_serve = app.add_subcommand("serve", "Run the telemetry service");
    s_serve->add_option("--host", serve.host, "Bind address")->capture_default_str();
    s_serve->add_option("--port", serve.port, "Port (0 picks a free one)")->capture_default_str();
    s_serve->add_option("--config", serve.config, "Study config to register");
    s_serve->add_option("--data-dir", serve.data_dir, std::string("Log directory (default $") + kDataDirEnv + ")");

    SimulateArgs simulate;
    auto* s_sim = app.add_subcommand("simulate", "Generate labelled synthetic sessions");
    s_sim->add_option("--profile", simulate.profile, "Profile name, or name:count[,name:count...]")->required();
    s_sim->add_option("--n", simulate.n, "Sessions for a single profile")->capture_default_str();
    s_sim->add_option("--seed", simulate.seed, "Base seed")->capture_default_str();
    s_sim->add_option("--config", simulate.config, "Study config (default: built-in demo study)");
    s_sim->add_option("--out", simulate.out, "Canonical NDJSON output, - for stdout")->capture_default_str();
    s_sim->add_option("--labels-out", simulate.labels_out, "Labels sidecar {session_id: profile}");

    ScoreArgs score;
    auto* s_score = app.add_subcommand("score", "Assess recorded sessions; exit 0 pass, 2 flag, 3 exclude");
    s_score->add_option("--input", score.input, "Canonical NDJSON sessions, - for stdin")->required();
    s_score->add_option("--config", score.config, "Study config (default: built-in demo study)");
    s_score->add_option("--out", score.out, "Assessments as NDJSON, - for stdout")->capture_default_str();
    s_score->add_option("--features-out", score.features_out, "Behavioral features as NDJSON");

    ReportArgs rep;
    auto* s_report = app.add_subcommand("report", "Incidence table for a study");
    s_report->add_option("--data-dir", rep.data_dir, std::string("Log directory (default $") + kDataDirEnv + ")");
    s_report->add_option("--study", rep.study, "Study id")->required();
    s_report->add_option("--format", rep.format, "table or ndjson")
        ->check(CLI::IsMember({"table", "ndjson"}))
        ->capture_default_str();

    std::string traps_config;
    std::optional<std::uint64_t> traps_seed;
    auto* s_traps = app.add_subcommand("gen-traps", "Print the honeypot traps of a study");
    s_traps->add_option("--config", traps_config, "Study config (default: built-in demo study)");
    s_traps->add_option("--seed", traps_seed, "Override the trap seed");

    std::string text_input;
    std::string text_config;
    auto* s_text = app.add_subcommand("check-text", "Stylometric screening, one response per line");
    s_text->add_option("--input", text_input, "Text file with one response per line, - for stdin")->required();
    s_text->add_option("--config", text_config, "Study config for thresholds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitPass : kExitError;
    }

    try {
        if (*s_serve) return cmd_serve(serve, out, err);
        if (*s_sim) return cmd_simulate(simulate, out);
        if (*s_score) return cmd_score(score, out, err);
        if (*s_report) return cmd_report(rep, out);
        if (*s_traps) return cmd_gen_traps(traps_config, traps_seed, out);
        if (*s_text) return cmd_check_text(text_input, text_config, out);
    } catch (const service::ServiceError& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace sentinel::cli
