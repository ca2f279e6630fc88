#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sentinel/behavior.hpp"
#include "sentinel/simulator.hpp"

using namespace sentinel;
using namespace sentinel::behavior;

namespace {

/// Mean and population standard deviation, accumulated in long double.
double brute_cv(const std::vector<double>& xs) {
    long double sum = 0;
    for (double x : xs) sum += x;
    const long double mean = sum / xs.size();
    long double sq = 0;
    for (double x : xs) sq += (x - mean) * (x - mean);
    return static_cast<double>(std::sqrt(sq / xs.size()) / mean);
}

SessionRecord constant_typing(int n, std::int64_t step) {
    fixtures::Builder b;
    for (int i = 0; i < n; ++i) b.key(i * step, "k");
    return b.build();
}

SessionRecord keystrokes_then_response(int printable, int backspaces, std::size_t response_len) {
    fixtures::Builder b;
    std::int64_t t = 0;
    for (int i = 0; i < printable; ++i, t += 120) b.key(t, "x");
    for (int i = 0; i < backspaces; ++i, t += 120) b.key(t, "Backspace");
    b.respond(t, "q_open_1", std::string(response_len, 'y'));
    return b.build();
}

}  // namespace

TEST_CASE("empty stream has zero counts and no ratios") {
    const auto f = extract_features(std::span<const TelemetryEvent>{});
    CHECK(f == BehaviorFeatures{});
    CHECK_FALSE(f.latency_cv);
    CHECK_FALSE(f.straight_fraction);
    const auto cfg = default_study_config();
    CHECK(run_behavior_detectors(fixtures::Builder().build(), cfg).empty());
}

TEST_CASE("latencies and dwell times") {
    fixtures::Builder b;
    for (std::int64_t t : {0, 100, 200, 300}) b.add(TelemetryEvent::key_down(0, t, "a"));
    const auto f = extract_features(b.build());
    CHECK(f.interkey_latencies_ms == std::vector<double>{100, 100, 100});
    CHECK_FALSE(f.latency_cv);  // below the 20-latency floor

    fixtures::Builder d;
    d.add(TelemetryEvent::key_down(0, 0, "a"));
    d.add(TelemetryEvent::key_down(0, 10, "b"));
    d.add(TelemetryEvent::key_down(0, 20, "a"));
    d.add(TelemetryEvent::key_up(0, 50, "a"));   // pairs with the down at 20
    d.add(TelemetryEvent::key_up(0, 60, "b"));
    d.add(TelemetryEvent::key_up(0, 90, "a"));   // pairs with the down at 0
    d.add(TelemetryEvent::key_up(0, 95, "z"));   // unmatched
    const auto g = extract_features(d.build());
    CHECK(g.dwell_times_ms == std::vector<double>{30, 50, 90});
    CHECK(g.unmatched_key_ups == 1);
}

TEST_CASE("printable and backspace counting") {
    fixtures::Builder b;
    b.key(0, "a").key(100, "Shift").key(200, "Backspace").key(300, "\xC3\xA9").key(400, " ");
    const auto f = extract_features(b.build());
    CHECK(f.n_keydown == 5);
    CHECK(f.n_printable_keydown == 3);
    CHECK(f.n_backspace == 1);
}

TEST_CASE("focus shifts need a hidden period longer than one second") {
    fixtures::Builder a;
    a.add(TelemetryEvent::visibility(0, 1000, true)).add(TelemetryEvent::visibility(0, 2500, false));
    CHECK(extract_features(a.build()).focus_shifts == 1);

    fixtures::Builder b;
    b.add(TelemetryEvent::visibility(0, 1000, true)).add(TelemetryEvent::visibility(0, 1500, false));
    CHECK(extract_features(b.build()).focus_shifts == 0);

    fixtures::Builder c;
    c.add(TelemetryEvent::visibility(0, 1000, true)).add(TelemetryEvent::visibility(0, 2000, false));
    CHECK(extract_features(c.build()).focus_shifts == 0);
}

TEST_CASE("clipboard attempts and active time") {
    fixtures::Builder b;
    b.add(TelemetryEvent::clipboard(0, 0, {ClipboardAction::copy, 5, std::nullopt, true}));
    b.add(TelemetryEvent::clipboard(0, 10, {ClipboardAction::cut, 5, std::nullopt, true}));
    b.add(TelemetryEvent::clipboard(0, 20, {ClipboardAction::paste, 5, std::nullopt, true}));
    b.add(TelemetryEvent::mouse_move(0, 500, 1, 1));
    b.add(TelemetryEvent::mouse_move(0, 2500, 1, 1));
    b.key(2600, "a");
    const auto f = extract_features(b.build());
    CHECK(f.copy_attempts == 1);
    CHECK(f.cut_attempts == 1);
    CHECK(f.paste_attempts == 1);
    CHECK(f.active_time_s == 2);
}

TEST_CASE("cv matches the brute-force oracle") {
    std::mt19937_64 rng(11);
    std::lognormal_distribution<double> d(5.0, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xs(2 + rng() % 80);
        for (auto& x : xs) x = std::round(d(rng));
        const auto cv = coefficient_of_variation(xs);
        REQUIRE(cv);
        CHECK(*cv == doctest::Approx(brute_cv(xs)).epsilon(1e-9));
    }
    CHECK(coefficient_of_variation(std::vector<double>(10, 80.0)) == 0.0);
    CHECK_FALSE(coefficient_of_variation(std::vector<double>{}));
}

TEST_CASE("uniform typing examples") {
    const auto cfg = default_study_config();
    const auto f = extract_features(constant_typing(51, 80));
    REQUIRE(f.interkey_latencies_ms.size() == 50);
    REQUIRE(f.latency_cv);
    CHECK(*f.latency_cv == 0.0);
    const auto sig = uniform_typing_detector(f, cfg.behavior);
    REQUIRE(sig);
    CHECK(sig->severity.value() == 1.0);
    CHECK(sig->variant_hint == VariantHint::full_delegation);

    const auto few = extract_features(constant_typing(11, 80));
    CHECK(few.interkey_latencies_ms.size() == 10);
    CHECK_FALSE(uniform_typing_detector(few, cfg.behavior));

    // cv 0.025 with threshold 0.05 gives severity 0.5.
    BehaviorFeatures g;
    g.interkey_latencies_ms.assign(20, 1.0);
    g.latency_cv = 0.025;
    CHECK(uniform_typing_detector(g, cfg.behavior)->severity.value() == doctest::Approx(0.5));
    g.latency_cv = 0.05;
    CHECK_FALSE(uniform_typing_detector(g, cfg.behavior));
}

TEST_CASE("human simulator traces have high latency cv and curved mouse paths") {
    const auto cfg = default_study_config();
    const auto profile = sim::AgentProfile::defaults(sim::ProfileKind::human);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto s = sim::simulate_session(profile, cfg, seed).session;
        const auto f = extract_features(s, cfg.behavior);
        REQUIRE(f.latency_cv);
        CHECK(*f.latency_cv == doctest::Approx(brute_cv(f.interkey_latencies_ms)).epsilon(1e-9));
        CHECK(*f.latency_cv > 0.2);
        REQUIRE(f.straight_fraction);
        CHECK(*f.straight_fraction < 0.5);
        CHECK_FALSE(uniform_typing_detector(f, cfg.behavior));
        CHECK_FALSE(mouse_linearity_detector(f, cfg.behavior));
    }
}

TEST_CASE("mouse linearity examples") {
    const auto cfg = default_study_config();
    fixtures::Builder line;
    for (int i = 0; i < 100; ++i) line.add(TelemetryEvent::mouse_move(0, i * 10, 3.0 * i + 7, 2.0 * i - 5));
    const auto f = extract_features(line.build());
    CHECK(f.straight_fraction == 1.0);
    const auto sig = mouse_linearity_detector(f, cfg.behavior);
    REQUIRE(sig);
    CHECK(sig->severity.value() == 1.0);

    fixtures::Builder few;
    for (int i = 0; i < 10; ++i) few.add(TelemetryEvent::mouse_move(0, i * 10, i, i));
    CHECK_FALSE(mouse_linearity_detector(extract_features(few.build()), cfg.behavior));

    // Triangle area 0.5 is on the boundary and does not count as collinear.
    fixtures::Builder tri;
    tri.add(TelemetryEvent::mouse_move(0, 0, 0, 0));
    tri.add(TelemetryEvent::mouse_move(0, 1, 1, 0));
    tri.add(TelemetryEvent::mouse_move(0, 2, 0, 1));
    CHECK(extract_features(tri.build()).straight_fraction == 0.0);
}

TEST_CASE("property: straight fraction matches brute-force triangle areas") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        fixtures::Builder b;
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 40; ++i) {
            const double x = i * 4.0 + (rng() % 3 == 0 ? u(rng) : 0.0);
            const double y = i * 2.0;
            pts.emplace_back(x, y);
            b.add(TelemetryEvent::mouse_move(0, i * 50, x, y));
        }
        int straight = 0;
        for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
            const double ax = pts[i].first, ay = pts[i].second;
            const double bx = pts[i + 1].first, by = pts[i + 1].second;
            const double cx = pts[i + 2].first, cy = pts[i + 2].second;
            const double area = std::abs(ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) / 2;
            if (area < 0.5) ++straight;
        }
        CHECK(*extract_features(b.build()).straight_fraction ==
              doctest::Approx(straight / 38.0));
    }
}

TEST_CASE("keystroke-length consistency examples") {
    const auto cfg = default_study_config();
    const ResponseRecord r200{"q_open_1", std::string(200, 'y'), 0, InputMode::typed};

    BehaviorFeatures honest;
    honest.n_printable_keydown = 210;
    honest.n_backspace = 5;
    CHECK_FALSE(keystroke_length_consistency(honest, r200, cfg.behavior));

    BehaviorFeatures pasted;
    pasted.n_printable_keydown = 5;
    const auto sig = keystroke_length_consistency(pasted, r200, cfg.behavior);
    REQUIRE(sig);
    CHECK(sig->severity.value() >= 0.95);
    CHECK(sig->severity.value() == doctest::Approx(1.0 - 5.0 / 100.0));
    CHECK(sig->variant_hint == VariantHint::partial_mediation);

    const ResponseRecord r30{"q_open_1", std::string(30, 'y'), 0, InputMode::typed};
    CHECK_FALSE(keystroke_length_consistency(BehaviorFeatures{}, r30, cfg.behavior));

    ResponseRecord spoken = r200;
    spoken.input_mode = InputMode::speech;
    CHECK_FALSE(keystroke_length_consistency(BehaviorFeatures{}, spoken, cfg.behavior));

    // Backspaces beyond printable keys floor at zero.
    BehaviorFeatures neg;
    neg.n_backspace = 50;
    CHECK(keystroke_length_consistency(neg, r200, cfg.behavior)->severity.value() == 1.0);
}

TEST_CASE("keystroke-length consistency end to end via segmentation") {
    const auto cfg = default_study_config();
    auto flagged = run_behavior_detectors(keystrokes_then_response(5, 0, 200), cfg);
    CHECK(std::any_of(flagged.begin(), flagged.end(),
                      [](const auto& s) { return s.detector_id == "behavior.keystroke_length"; }));
    auto fine = run_behavior_detectors(keystrokes_then_response(210, 5, 200), cfg);
    CHECK(std::none_of(fine.begin(), fine.end(),
                       [](const auto& s) { return s.detector_id == "behavior.keystroke_length"; }));
    CHECK(run_behavior_detectors(keystrokes_then_response(5, 0, 200), cfg) == flagged);
}

TEST_CASE("segment_by_item splits at each response") {
    fixtures::Builder b;
    b.key(0, "a").respond(100, "q1", "a").key(200, "b").key(300, "c").respond(400, "q2", "bc").key(500, "z");
    const auto s = b.build();
    const auto segs = segment_by_item(s.events);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].item_id == "q1");
    CHECK(segs[0].events.size() == 3);
    CHECK(segs[1].events.size() == 5);
    CHECK(segs[1].response.text == "bc");
}

TEST_CASE("clipboard detector") {
    const auto cfg = default_study_config();
    const auto open = cfg.items.front().item_id;
    REQUIRE(cfg.is_open_text(open));

    fixtures::Builder one;
    one.add(TelemetryEvent::clipboard(0, 0, {ClipboardAction::paste, 300, std::nullopt, true}));
    one.respond(10, open, "x");
    auto sig = clipboard_detector(one.build().events, cfg);
    REQUIRE(sig);
    CHECK(sig->severity.value() == doctest::Approx(0.4));
    CHECK(sig->variant_hint == VariantHint::partial_mediation);

    fixtures::Builder three;
    for (int i = 0; i < 3; ++i) three.add(TelemetryEvent::clipboard(0, i, {ClipboardAction::paste, 3, std::nullopt, false}));
    three.respond(10, open, "x");
    CHECK(clipboard_detector(three.build().events, cfg)->severity.value() == doctest::Approx(0.8));

    fixtures::Builder copy;
    copy.add(TelemetryEvent::clipboard(0, 0, {ClipboardAction::copy, 20, std::nullopt, true}));
    copy.respond(10, open, "x");
    CHECK_FALSE(clipboard_detector(copy.build().events, cfg));
    CHECK(extract_features(copy.build()).copy_attempts == 1);

    CHECK_FALSE(clipboard_detector(fixtures::Builder().key(0, "a").build().events, cfg));

    std::string choice;
    for (const auto& i : cfg.items) {
        if (i.kind == ItemKind::choice) choice = i.item_id;
    }
    REQUIRE_FALSE(choice.empty());
    fixtures::Builder off_page;
    off_page.add(TelemetryEvent::clipboard(0, 0, {ClipboardAction::paste, 3, std::nullopt, true}));
    off_page.respond(10, choice, "25-34", InputMode::choice);
    CHECK_FALSE(clipboard_detector(off_page.build().events, cfg));
}

TEST_CASE("focus shift detector") {
    const auto t = BehaviorThresholds{};
    BehaviorFeatures f;
    CHECK_FALSE(focus_shift_detector(f, t));
    f.focus_shifts = 5;
    CHECK(focus_shift_detector(f, t)->severity.value() == doctest::Approx(0.5));
    f.focus_shifts = 12;
    CHECK(focus_shift_detector(f, t)->severity.value() == 1.0);
    f.focus_shifts = 2;
    CHECK_FALSE(focus_shift_detector(f, t));
}

TEST_CASE("focus shifts count only during open-text items") {
    const auto cfg = default_study_config();
    std::string open = cfg.items.front().item_id, choice;
    for (const auto& i : cfg.items) {
        if (i.kind == ItemKind::choice) choice = i.item_id;
    }
    auto shifts = [](fixtures::Builder& b, std::int64_t& t, int n) {
        for (int i = 0; i < n; ++i) {
            b.add(TelemetryEvent::visibility(0, t, true));
            b.add(TelemetryEvent::visibility(0, t + 5000, false));
            t += 6000;
        }
    };
    fixtures::Builder b;
    std::int64_t t = 0;
    shifts(b, t, 4);
    b.respond(t, choice, "25-34", InputMode::choice);
    auto sig = run_behavior_detectors(b.build(), cfg);
    CHECK(std::none_of(sig.begin(), sig.end(), [](const auto& s) { return s.detector_id == "behavior.focus_shift"; }));

    fixtures::Builder c;
    t = 0;
    shifts(c, t, 4);
    c.respond(t, open, "short");
    sig = run_behavior_detectors(c.build(), cfg);
    CHECK(std::count_if(sig.begin(), sig.end(), [](const auto& s) { return s.detector_id == "behavior.focus_shift"; }) == 1);
}

TEST_CASE("property: features are stable under shuffle then re-sort by seq") {
    const auto cfg = default_study_config();
    std::mt19937_64 rng(3);
    for (auto kind : {sim::ProfileKind::human, sim::ProfileKind::partial_mediation, sim::ProfileKind::full_delegation}) {
        const auto s = sim::simulate_session(sim::AgentProfile::defaults(kind), cfg, 77).session;
        auto shuffled = s.events;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::sort(shuffled.begin(), shuffled.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
        CHECK(extract_features(shuffled, cfg.behavior) == extract_features(s, cfg.behavior));
    }
}

TEST_CASE("property: every behavioral severity lies in [0,1]") {
    const auto cfg = default_study_config();
    for (auto kind : {sim::ProfileKind::human, sim::ProfileKind::spillover_human, sim::ProfileKind::partial_mediation,
                      sim::ProfileKind::full_delegation, sim::ProfileKind::honeypot_aware_delegation}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto s = sim::simulate_session(sim::AgentProfile::defaults(kind), cfg, seed).session;
            for (const auto& sig : run_behavior_detectors(s, cfg)) {
                CHECK(sig.severity.value() >= 0.0);
                CHECK(sig.severity.value() <= 1.0);
                CHECK(family_of(sig.detector_id) == "behavior");
            }
        }
    }
}

TEST_CASE("features dump uses the field names") {
    const auto j = features_to_json(extract_features(constant_typing(3, 80)));
    for (const char* k : {"n_keydown", "n_printable_keydown", "n_backspace", "interkey_latencies_ms",
                          "dwell_times_ms", "latency_cv", "mouse_samples", "straight_fraction",
                          "focus_shifts", "paste_attempts", "copy_attempts", "cut_attempts", "active_time_s"}) {
        CHECK(j.contains(k));
    }
    CHECK(j["latency_cv"].is_null());
    CHECK(j["n_keydown"] == 3);
}
