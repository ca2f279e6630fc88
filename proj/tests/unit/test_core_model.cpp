#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <nlohmann/json.hpp>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sentinel/config.hpp"
#include "sentinel/simulator.hpp"
#include "sentinel/validate.hpp"
#include "sentinel/wire.hpp"

using namespace sentinel;

namespace {

SessionRecord one_of_each() {
    fixtures::Builder b("sess-all");
    b.add(TelemetryEvent::affirmation(0, 0, true));
    b.add(TelemetryEvent::key_down(0, 10, "a"));
    b.add(TelemetryEvent::key_up(0, 30, "a"));
    b.add(TelemetryEvent::mouse_move(0, 40, 12.5, -3.0));
    b.add(TelemetryEvent::visibility(0, 50, true));
    b.add(TelemetryEvent::visibility(0, 2600, false));
    b.add(TelemetryEvent::clipboard(0, 2700, {ClipboardAction::paste, 12, std::string("hello, world"), true}));
    b.add(TelemetryEvent::trap_interaction(0, 2800, "trap-checkbox"));
    b.add(TelemetryEvent::speech_transcript(0, 2900, "spoken words é"));
    b.add(TelemetryEvent::captcha_score(0, 3000, "v3_score", Unit(0.25)));
    b.add(TelemetryEvent::response_submit(0, 3100, {"q_open_1", "answer \"quoted\"\nline", InputMode::typed}));
    auto rec = b.build();
    rec.client_meta = {{"user_agent", "Mozilla/5.0"}, {"viewport", "1280x720"}};
    return rec;
}

}  // namespace

TEST_CASE("Unit rejects out-of-range values instead of clamping") {
    CHECK_THROWS_AS(Unit(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(Unit(1.01), std::invalid_argument);
    CHECK_THROWS_AS(Unit(std::nan("")), std::invalid_argument);
    CHECK(Unit(0.0).value() == 0.0);
    CHECK(Unit(1.0).value() == 1.0);
}

TEST_CASE("validate_session on well-formed and broken sequences") {
    fixtures::Builder b;
    b.key(0, "a").key(100, "b");
    CHECK(validate_session(b.build()).empty());

    SessionRecord s = b.build();
    s.events = {TelemetryEvent::key_down(1, 0, "a"), TelemetryEvent::key_down(3, 10, "b"),
                TelemetryEvent::key_down(2, 20, "c")};
    auto v = validate_session(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "seq");
    CHECK(v[0].seq == 2);

    s.events = {TelemetryEvent::key_down(1, 100, "a"), TelemetryEvent::key_down(2, 50, "b")};
    v = validate_session(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "t");
}

TEST_CASE("validate_session reports clipboard text beyond the cap at its seq") {
    const std::string long_text(1200, 'x');
    fixtures::Builder b;
    b.key(0, "a");
    b.add(TelemetryEvent::clipboard(0, 100, {ClipboardAction::paste, 1200, long_text, false}));
    auto v = validate_session(b.build());
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "data.text");
    CHECK(v[0].seq == 3);
    CHECK(long_text.size() > kClipboardTextCap);
}

TEST_CASE("validate_session checks clipboard length and mixed payloads") {
    fixtures::Builder b;
    b.add(TelemetryEvent::clipboard(0, 0, {ClipboardAction::copy, 3, std::string("abcdef"), false}));
    auto v = validate_session(b.build());
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "data.length");

    SessionRecord s = fixtures::Builder().build();
    TelemetryEvent bad = TelemetryEvent::key_down(1, 0, "a");
    bad.kind = EventKind::mouse_move;
    s.events.push_back(bad);
    v = validate_session(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "data");
}

TEST_CASE("validate_session with a config checks declared items and length") {
    auto cfg = default_study_config();
    fixtures::Builder b;
    b.respond(0, "not_an_item", "hi");
    auto v = validate_session(b.build(), &cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "data.item_id");

    cfg.max_response_chars = 5;
    fixtures::Builder c;
    c.respond(0, cfg.items.front().item_id, "far too long");
    CHECK_FALSE(validate_session(c.build(), &cfg).empty());
}

TEST_CASE("canonical encoding of an empty session round-trips byte-identical") {
    const auto s = fixtures::Builder("empty").build();
    const auto bytes = wire::canonical_encode(s);
    CHECK(wire::canonical_decode(bytes) == s);
    CHECK(wire::canonical_encode(wire::canonical_decode(bytes)) == bytes);
    CHECK(std::count(bytes.begin(), bytes.end(), '\n') == 1);
}

TEST_CASE("canonical encoding round-trips one event of each kind") {
    const auto s = one_of_each();
    const auto bytes = wire::canonical_encode(s);
    const auto back = wire::canonical_decode(bytes);
    CHECK(back == s);
    CHECK(wire::canonical_encode(back) == bytes);
    CHECK(s.responses().size() == 1);
    CHECK(s.captcha_scores().size() == 1);
    CHECK(s.affirmation_given());
}

TEST_CASE("wire field names") {
    const auto s = one_of_each();
    const auto bytes = wire::canonical_encode(s);
    const auto first = bytes.substr(0, bytes.find('\n'));
    const auto header = nlohmann::json::parse(first);
    CHECK(header.at("v") == 1);
    CHECK(header.at("sid") == "sess-all");
    CHECK(header.at("study") == "demo-study");
    CHECK(header.at("created_at") == 1750000000000);
    CHECK(header.at("meta").at("viewport") == "1280x720");

    const auto e = wire::event_to_json(s.events[6]);
    CHECK(e.at("seq") == 7);
    CHECK(e.at("t") == 2700);
    CHECK(e.at("kind") == "clipboard");
    CHECK(e.at("data").at("action") == "paste");
    CHECK(e.at("data").at("length") == 12);
    CHECK(e.at("data").at("blocked") == true);
    CHECK(wire::event_to_json(s.events[4]).at("data").at("state") == "hidden");
}

TEST_CASE("truncated input yields a positioned parse error") {
    const auto bytes = wire::canonical_encode(one_of_each());
    const auto cut = bytes.substr(0, bytes.size() - 7);
    try {
        (void)wire::canonical_decode(cut);
        FAIL("decode should have thrown");
    } catch (const wire::ParseError& e) {
        CHECK(e.offset() <= cut.size());
        CHECK(e.offset() > 0);
        CHECK(e.line() == 12);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("decoder rejects mixed payloads and unknown fields") {
    const std::string header = R"({"v":1,"sid":"x","study":"s","created_at":0,"meta":{}})" "\n";
    CHECK_THROWS_AS(wire::canonical_decode(header + R"({"seq":1,"t":0,"kind":"key_down","data":{"key":"a","x":1}})" "\n"),
                    wire::ParseError);
    CHECK_THROWS_AS(wire::canonical_decode(header + R"({"seq":1,"t":0,"kind":"mouse_move","data":{"key":"a"}})" "\n"),
                    wire::ParseError);
    CHECK_THROWS_AS(wire::canonical_decode(header + R"({"seq":1,"t":0,"kind":"captcha_score","data":{"checkpoint_id":"c","score":1.5}})" "\n"),
                    wire::ParseError);
    CHECK_THROWS_AS(wire::canonical_decode(header + R"({"seq":1,"t":0,"kind":"nope","data":{}})" "\n"),
                    wire::ParseError);
    CHECK_NOTHROW(wire::canonical_decode(header + R"({"seq":1,"t":0,"kind":"key_down","data":{"key":"a"}})" "\n"));
}

TEST_CASE("parse error line and offset point at the bad line") {
    const std::string good = R"({"seq":1,"t":0,"kind":"key_down","data":{"key":"a"}})" "\n";
    const std::string header = R"({"v":1,"sid":"x","study":"s","created_at":0,"meta":{}})" "\n";
    const std::string text = header + good + "{not json}\n";
    try {
        (void)wire::canonical_decode(text);
        FAIL("decode should have thrown");
    } catch (const wire::ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.offset() >= header.size() + good.size());
    }
}

TEST_CASE("property: simulator sessions round-trip and validate clean") {
    const auto cfg = default_study_config();
    for (auto kind : {sim::ProfileKind::human, sim::ProfileKind::spillover_human,
                      sim::ProfileKind::partial_mediation, sim::ProfileKind::full_delegation,
                      sim::ProfileKind::honeypot_aware_delegation}) {
        const auto profile = sim::AgentProfile::defaults(kind);
        for (std::uint64_t seed = 1; seed <= 15; ++seed) {
            const auto s = sim::simulate_session(profile, cfg, seed).session;
            CAPTURE(s.session_id);
            CHECK(wire::canonical_decode(wire::canonical_encode(s)) == s);
            CHECK(validate_session(s, &cfg).empty());
        }
    }
}

TEST_CASE("decode_stream splits concatenated sessions") {
    const auto a = one_of_each();
    auto b = fixtures::Builder("other").key(0, "z").build();
    const auto all = wire::decode_stream(wire::canonical_encode(a) + wire::canonical_encode(b));
    REQUIRE(all.size() == 2);
    CHECK(all[0] == a);
    CHECK(all[1] == b);
}

TEST_CASE("study config round-trips through its file format") {
    auto cfg = default_study_config("round-trip");
    const auto text = dump_study_config(cfg);
    const auto back = parse_study_config(text);
    CHECK(back.study_id == "round-trip");
    CHECK(back.traps == cfg.traps);
    CHECK(back.items.size() == cfg.items.size());
    CHECK(back.check_items == cfg.check_items);
    CHECK(back.policy.captcha_threshold == doctest::Approx(0.7));
    CHECK(back.policy.theta_flag == doctest::Approx(0.5));
    CHECK(back.policy.theta_exclude == doctest::Approx(0.9));
}

TEST_CASE("study config invariants") {
    auto cfg = default_study_config();
    cfg.policy.theta_flag = 0.95;
    CHECK_THROWS_AS(finalize_study_config(cfg), ConfigError);
    cfg = default_study_config();
    cfg.policy.weights["behavior"] = 1.5;
    CHECK_THROWS_AS(finalize_study_config(cfg), ConfigError);
    cfg = default_study_config();
    cfg.policy.weights.erase("text");
    CHECK_THROWS_AS(finalize_study_config(cfg), ConfigError);
}

TEST_CASE("shipped example config loads") {
    const auto cfg = load_study_config(std::filesystem::path(SENTINEL_SOURCE_DIR) / "config" / "example_study.json");
    CHECK(cfg.study_id == "example-study");
    CHECK_FALSE(cfg.traps.empty());
    CHECK(cfg.check_items.size() >= 2);
}
