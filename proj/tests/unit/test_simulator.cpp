#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sentinel/behavior.hpp"
#include "sentinel/honeypot.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/screening.hpp"
#include "sentinel/simulator.hpp"
#include "sentinel/unicode.hpp"
#include "sentinel/validate.hpp"
#include "sentinel/wire.hpp"

using namespace sentinel;
using namespace sentinel::sim;

namespace {

const StudyConfig& study() {
    static const StudyConfig cfg = default_study_config();
    return cfg;
}

std::string encode_all(const std::vector<LabeledSession>& corpus) {
    std::string out;
    for (const auto& l : corpus) out += wire::canonical_encode(l.session);
    return out;
}

}  // namespace

TEST_CASE("profile defaults are valid and respect the hidden-content rules") {
    for (auto kind : {ProfileKind::human, ProfileKind::spillover_human, ProfileKind::partial_mediation,
                      ProfileKind::full_delegation, ProfileKind::honeypot_aware_delegation}) {
        const auto p = AgentProfile::defaults(kind);
        CHECK_NOTHROW(p.validate());
        CHECK(parse_profile_kind(to_string(kind)) == kind);
    }
    CHECK(AgentProfile::defaults(ProfileKind::human).interkey_log_mu == doctest::Approx(std::log(180.0)));
    CHECK(AgentProfile::defaults(ProfileKind::human).interkey_log_sigma == doctest::Approx(0.45));
    CHECK(AgentProfile::defaults(ProfileKind::human).backspace_rate == doctest::Approx(0.05));
    CHECK(AgentProfile::defaults(ProfileKind::spillover_human).typo_rate == doctest::Approx(0.08));
    CHECK(AgentProfile::defaults(ProfileKind::full_delegation).constant_interkey_ms == doctest::Approx(50.0));
    CHECK(AgentProfile::defaults(ProfileKind::full_delegation).marker_probability == doctest::Approx(0.3));
    CHECK(AgentProfile::defaults(ProfileKind::full_delegation).sees_hidden_content);
    const auto aware = AgentProfile::defaults(ProfileKind::honeypot_aware_delegation);
    CHECK(aware.sees_hidden_content);
    CHECK_FALSE(aware.follows_hidden_instructions);
    CHECK_FALSE(aware.touches_hidden_checkbox);

    auto bad = AgentProfile::defaults(ProfileKind::human);
    bad.backspace_rate = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = AgentProfile::defaults(ProfileKind::full_delegation);
    bad.sees_hidden_content = false;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK_FALSE(is_polluted(ProfileKind::human));
    CHECK_FALSE(is_polluted(ProfileKind::spillover_human));
    CHECK(is_polluted(ProfileKind::partial_mediation));
    CHECK(is_polluted(ProfileKind::honeypot_aware_delegation));
}

TEST_CASE("same profile, config and seed give identical sessions") {
    for (auto kind : {ProfileKind::human, ProfileKind::partial_mediation, ProfileKind::full_delegation}) {
        const auto p = AgentProfile::defaults(kind);
        const auto a = simulate_session(p, study(), 42);
        const auto b = simulate_session(p, study(), 42);
        CHECK(a.session == b.session);
        CHECK(a.ground_truth == kind);
        CHECK_FALSE(simulate_session(p, study(), 43).session == a.session);
    }
}

TEST_CASE("corpora are byte-identical for equal inputs and use derived seeds") {
    const std::map<ProfileKind, int> mix{{ProfileKind::human, 5}, {ProfileKind::full_delegation, 3}};
    const auto a = generate_corpus(mix, study(), 100);
    const auto b = generate_corpus(mix, study(), 100);
    REQUIRE(a.size() == 8);
    CHECK(encode_all(a) == encode_all(b));
    CHECK(a[0].ground_truth == ProfileKind::human);
    CHECK(a[7].ground_truth == ProfileKind::full_delegation);
    CHECK(a[2].session == simulate_session(AgentProfile::defaults(ProfileKind::human), study(), 102).session);
    CHECK(a[6].session == simulate_session(AgentProfile::defaults(ProfileKind::full_delegation), study(), 106).session);
}

TEST_CASE("full delegation trips the honeypot and types with zero latency spread") {
    const auto& cfg = study();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = simulate_session(AgentProfile::defaults(ProfileKind::full_delegation), cfg, seed).session;
        const auto f = behavior::extract_features(s, cfg.behavior);
        REQUIRE(f.latency_cv);
        CHECK(*f.latency_cv == 0.0);
        CHECK(f.n_backspace == 0);
        bool keyword = false;
        for (const auto& r : s.responses()) keyword = keyword || !honeypot::scan_response(r, cfg.traps).empty();
        CHECK(keyword);
        CHECK(honeypot::scan_checkbox(s.events, cfg.traps).signals.size() == 1);
        const auto a = pipeline::assess_session(s, cfg, nullptr);
        CHECK(a.families_triggered.size() >= 2);
        CHECK(a.decision == Decision::exclude);
    }
}

TEST_CASE("honeypot-aware delegation never trips a honeypot") {
    const auto& cfg = study();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto s = simulate_session(AgentProfile::defaults(ProfileKind::honeypot_aware_delegation), cfg, seed).session;
        for (const auto& r : s.responses()) CHECK(honeypot::scan_response(r, cfg.traps).empty());
        CHECK(honeypot::scan_checkbox(s.events, cfg.traps).signals.empty());
    }
}

TEST_CASE("partial mediation pastes most of each open answer after focus shifts") {
    const auto& cfg = study();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = simulate_session(AgentProfile::defaults(ProfileKind::partial_mediation), cfg, seed).session;
        for (const auto& seg : behavior::segment_by_item(s.events)) {
            if (!cfg.is_open_text(seg.item_id)) continue;
            const auto f = behavior::extract_features(seg.events, cfg.behavior);
            CHECK(f.paste_attempts >= 1);
            CHECK(f.focus_shifts >= 2);
            CHECK(f.focus_shifts <= 4);
            std::int64_t pasted = 0;
            for (const auto& e : seg.events) {
                if (const auto* c = std::get_if<ClipboardPayload>(&e.payload); c && c->action == ClipboardAction::paste) pasted += c->length;
            }
            const auto len = static_cast<std::int64_t>(text::codepoint_count(seg.response.text));
            CHECK(pasted >= len * 8 / 10);
            CHECK(f.n_printable_keydown < len / 4);
        }
    }
}

TEST_CASE("human sessions: typed char by char, no honeypot or marker signals") {
    const auto& cfg = study();
    for (auto kind : {ProfileKind::human, ProfileKind::spillover_human}) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto s = simulate_session(AgentProfile::defaults(kind), cfg, seed).session;
            CHECK(validate_session(s, &cfg).empty());
            for (const auto& seg : behavior::segment_by_item(s.events)) {
                if (!cfg.is_open_text(seg.item_id)) continue;
                const auto f = behavior::extract_features(seg.events, cfg.behavior);
                const int typed = f.n_printable_keydown - f.n_backspace;
                CHECK(typed == static_cast<int>(text::codepoint_count(seg.response.text)));
                CHECK(screening::stylometric_flags(seg.response.text, cfg.text).profile.marker_phrase_hits.empty());
            }
            const auto a = pipeline::assess_session(s, cfg, nullptr);
            CHECK(a.families_triggered.count("honeypot") == 0);
            for (const auto& sig : a.signals) CHECK(sig.detector_id != "text.marker");
        }
    }
}

TEST_CASE("evaluate_detectors: 100 human and 100 full delegation") {
    const auto corpus = generate_corpus({{ProfileKind::human, 100}, {ProfileKind::full_delegation, 100}}, study(), 1);
    const auto m = evaluate_detectors(corpus, study());
    CHECK(m.combined.recall() == 1.0);
    CHECK(m.combined.false_positive_rate() == 0.0);
    CHECK(m.combined.precision() == 1.0);
    CHECK(m.by_label.at(ProfileKind::full_delegation).excluded == 100);
    const auto j = metrics_to_json(m);
    CHECK(j.at("combined").at("recall") == 1.0);
    CHECK(j.at("by_label").contains("full_delegation"));
}

TEST_CASE("evaluate_detectors: all-human corpus has no precision") {
    const auto corpus = generate_corpus({{ProfileKind::human, 60}}, study(), 7);
    const auto m = evaluate_detectors(corpus, study());
    CHECK_FALSE(m.combined.precision());
    CHECK_FALSE(m.combined.recall());
    CHECK(m.combined.false_positive_rate() == 0.0);
    CHECK(metrics_to_json(m).at("combined").at("precision").is_null());
    CHECK_THROWS_AS(evaluate_detectors(std::vector<LabeledSession>{}, study()), ConfigError);
}

TEST_CASE("evaluate_detectors: aware agents defeat a honeypot-only policy") {
    auto cfg = study();
    cfg.policy.enabled = {"honeypot"};
    const auto corpus = generate_corpus({{ProfileKind::honeypot_aware_delegation, 60}}, cfg, 3);
    const auto m = evaluate_detectors(corpus, cfg);
    CHECK(m.combined.recall() == 0.0);
    CHECK(m.families.at("honeypot").recall() == 0.0);
}

TEST_CASE("binary metric arithmetic") {
    BinaryMetrics b{8, 2, 88, 2};
    CHECK(*b.precision() == doctest::Approx(0.8));
    CHECK(*b.recall() == doctest::Approx(0.8));
    CHECK(*b.false_positive_rate() == doctest::Approx(2.0 / 90.0));
    CHECK_FALSE(BinaryMetrics{}.precision());
}

TEST_CASE("incidence corpus plants exactly the planned anomalies") {
    const auto corpus = generate_incidence_corpus(IncidencePlan{}, study(), 42);
    REQUIRE(corpus.size() == 1000);
    int keyword = 0, low = 0, failures = 0, pastes = 0;
    double lowest = 1.0;
    for (const auto& l : corpus) {
        const auto& s = l.session;
        bool k = false;
        for (const auto& r : s.responses()) k = k || !honeypot::scan_response(r, study().traps).empty();
        keyword += k;
        std::optional<double> m;
        bool failed = false;
        for (const auto& c : s.captcha_scores()) {
            if (study().checkpoint_kind(c.checkpoint_id) == CaptchaKind::challenge) failed = failed || c.score.value() < 0.5;
            else m = std::min(m.value_or(1.0), c.score.value());
        }
        failures += failed;
        if (m && *m < 0.7) {
            ++low;
            lowest = std::min(lowest, *m);
        }
        pastes += std::any_of(s.events.begin(), s.events.end(), [](const TelemetryEvent& e) {
            const auto* c = std::get_if<ClipboardPayload>(&e.payload);
            return c && c->action == ClipboardAction::paste;
        });
    }
    CHECK(keyword == 16);
    CHECK(low == 27);
    CHECK(lowest == doctest::Approx(0.2));
    CHECK(failures == 2);
    CHECK(pastes == 47);
}

TEST_CASE("property: people are never excluded over a thousand seeds") {
    const auto corpus = generate_corpus({{ProfileKind::human, 500}, {ProfileKind::spillover_human, 500}}, study(), 5000);
    const auto all = pipeline::assess_corpus(std::vector<SessionRecord>([&] {
        std::vector<SessionRecord> v;
        for (const auto& l : corpus) v.push_back(l.session);
        return v;
    }()), study());
    int excluded = 0;
    for (const auto& a : all) excluded += a.decision == Decision::exclude;
    CHECK(excluded == 0);
}
