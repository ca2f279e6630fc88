#include <algorithm>
#include <random>

#include "doctest.h"
#include "sentinel/scoring.hpp"

using namespace sentinel;
using namespace sentinel::scoring;

namespace {

DetectionSignal sig(const std::string& family, double severity, VariantHint hint = VariantHint::unknown) {
    return {family + ".test", "s", Unit(severity), hint, {}};
}

/// Noisy-or written out directly from per-family maxima.
double oracle_score(const std::vector<DetectionSignal>& signals, const ScoringPolicy& p) {
    std::map<std::string, double> maxima;
    for (const auto& s : signals) {
        auto& m = maxima[family_of(s.detector_id)];
        m = std::max(m, s.severity.value());
    }
    double prod = 1.0;
    for (const auto& [f, m] : maxima) prod *= 1.0 - p.weights.at(f) * m;
    return 1.0 - prod;
}

std::vector<DetectionSignal> grid_signals(const std::vector<std::string>& families, int code) {
    static const double levels[] = {0.0, 0.5, 1.0};
    std::vector<DetectionSignal> out;
    for (const auto& f : families) {
        const double sev = levels[code % 3];
        code /= 3;
        if (sev > 0.0) out.push_back(sig(f, sev));
    }
    return out;
}

}  // namespace

TEST_CASE("captcha policy examples") {
    const ScoringPolicy p;
    const std::vector<CaptchaScore> low{{"a", Unit(0.9)}, {"b", Unit(0.2)}};
    auto r = captcha_policy(low, p, "s");
    REQUIRE(r.signal);
    CHECK(r.signal->severity.value() == doctest::Approx((0.7 - 0.2) / 0.7));
    CHECK(r.signal->severity.value() == doctest::Approx(0.714).epsilon(0.001));
    CHECK(r.signal->variant_hint == VariantHint::full_delegation);

    const std::vector<CaptchaScore> high{{"a", Unit(0.9)}};
    r = captcha_policy(high, p);
    CHECK_FALSE(r.signal);
    CHECK_FALSE(r.warning);

    r = captcha_policy(std::vector<CaptchaScore>{}, p);
    CHECK_FALSE(r.signal);
    REQUIRE(r.warning);
    CHECK(*r.warning == "captcha-missing");

    const std::vector<CaptchaScore> edge{{"a", Unit(0.7)}};
    CHECK_FALSE(captcha_policy(edge, p).signal);
}

TEST_CASE("captcha challenge failures") {
    const std::vector<CaptchaScore> pass{{"v2_start", Unit(1.0)}};
    CHECK_FALSE(captcha_challenge_policy(pass));
    const std::vector<CaptchaScore> fail{{"v2_start", Unit(1.0)}, {"v2_middle", Unit(0.0)}};
    const auto s = captcha_challenge_policy(fail);
    REQUIRE(s);
    CHECK(s->severity.value() == 1.0);
}

TEST_CASE("score_session examples") {
    const ScoringPolicy p;
    auto a = score_session({}, p);
    CHECK(a.score.value() == 0.0);
    CHECK(a.decision == Decision::pass);
    CHECK(a.variant.unknown == 1.0);

    a = score_session({sig("honeypot", 1.0)}, p);
    CHECK(a.score.value() == 1.0);
    CHECK(a.decision == Decision::flag);

    a = score_session({sig("honeypot", 1.0), sig("behavior", 1.0)}, p);
    CHECK(a.score.value() == 1.0);
    CHECK(a.decision == Decision::exclude);
    CHECK(a.families_triggered == std::set<std::string>{"behavior", "honeypot"});

    // Lowest captcha 0.2 alone: 0.8 * 0.714 = 0.571, a flag.
    const std::vector<CaptchaScore> low{{"v3", Unit(0.2)}};
    const auto c = captcha_policy(low, p, "s");
    a = score_session({*c.signal}, p);
    CHECK(a.score.value() == doctest::Approx(0.8 * 5.0 / 7.0));
    CHECK(a.decision == Decision::flag);

    CHECK_THROWS_AS(score_session({DetectionSignal{"astrology.stars", "s", Unit(1.0), VariantHint::unknown, {}}}, p),
                    ConfigError);
}

TEST_CASE("family max, not sum") {
    const ScoringPolicy p;
    const auto a = score_session({sig("behavior", 0.4), sig("behavior", 0.4), sig("behavior", 0.4)}, p);
    CHECK(a.score.value() == doctest::Approx(0.7 * 0.4));
    CHECK(a.family_severity.at("behavior") == doctest::Approx(0.4));
}

TEST_CASE("attribute_variant examples") {
    std::vector<DetectionSignal> hp{sig("honeypot", 1.0, VariantHint::full_delegation),
                                    sig("honeypot", 1.0, VariantHint::full_delegation)};
    auto v = attribute_variant(hp);
    CHECK(v.full_delegation == 1.0);
    CHECK(v.partial_mediation == 0.0);
    CHECK(v.unknown == 0.0);

    std::vector<DetectionSignal> mix{sig("behavior", 0.4, VariantHint::partial_mediation),
                                     sig("behavior", 1.0, VariantHint::full_delegation)};
    v = attribute_variant(mix);
    CHECK(v.full_delegation == doctest::Approx(1.0 / 1.4));
    CHECK(v.partial_mediation == doctest::Approx(0.4 / 1.4));

    v = attribute_variant(std::vector<DetectionSignal>{});
    CHECK(v.unknown == 1.0);
    CHECK(v.full_delegation == 0.0);
}

TEST_CASE("property: exhaustive grid over all families") {
    const ScoringPolicy p;
    const auto& families = detector_families();
    int total = 1;
    for (std::size_t i = 0; i < families.size(); ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
        const auto signals = grid_signals(families, code);
        const auto a = score_session(signals, p);
        CAPTURE(code);
        CHECK(a.score.value() == doctest::Approx(oracle_score(signals, p)).epsilon(1e-12));
        CHECK(a.score.value() >= 0.0);
        CHECK(a.score.value() <= 1.0);
        int strong = 0;
        for (const auto& [f, s] : a.family_severity) strong += s >= 0.5 ? 1 : 0;
        if (a.decision == Decision::exclude) {
            CHECK(a.score.value() >= p.theta_exclude);
            CHECK(strong >= 2);
        }
        if (a.decision == Decision::flag) CHECK(a.score.value() >= p.theta_flag);
        if (a.decision == Decision::pass) CHECK(a.score.value() < p.theta_flag);
        if (a.families_triggered.size() <= 1) CHECK(a.decision != Decision::exclude);

        // Adding any one more signal never lowers the score.
        for (const auto& f : families) {
            for (double extra : {0.5, 1.0}) {
                auto more = signals;
                more.push_back(sig(f, extra));
                CHECK(score_session(more, p).score.value() >= a.score.value());
            }
        }
    }
}

TEST_CASE("property: single-family inputs never exclude") {
    const ScoringPolicy p;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& f : detector_families()) {
        for (int i = 0; i < 200; ++i) {
            std::vector<DetectionSignal> s;
            for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) s.push_back(sig(f, u(rng)));
            s.push_back(sig(f, 1.0));
            CHECK(score_session(s, p).decision != Decision::exclude);
        }
    }
}

TEST_CASE("property: raising a severity never lowers the score") {
    const ScoringPolicy p;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& fams = detector_families();
    for (int i = 0; i < 2000; ++i) {
        std::vector<DetectionSignal> s;
        for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) s.push_back(sig(fams[rng() % fams.size()], u(rng)));
        const double before = score_session(s, p).score.value();
        auto& target = s[rng() % s.size()];
        target.severity = Unit(std::min(1.0, target.severity.value() + u(rng) * (1.0 - target.severity.value())));
        CHECK(score_session(s, p).score.value() >= before);
    }
}

TEST_CASE("property: assessments do not depend on signal order") {
    const ScoringPolicy p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& fams = detector_families();
    const VariantHint hints[] = {VariantHint::partial_mediation, VariantHint::full_delegation, VariantHint::unknown};
    for (int i = 0; i < 500; ++i) {
        std::vector<DetectionSignal> s;
        for (int k = 0; k < 2 + static_cast<int>(rng() % 6); ++k) {
            auto x = sig(fams[rng() % fams.size()], u(rng), hints[rng() % 3]);
            x.detector_id += std::to_string(k);
            s.push_back(x);
        }
        const auto a = score_session(s, p, "s");
        std::shuffle(s.begin(), s.end(), rng);
        CHECK(score_session(s, p, "s") == a);
    }
}

TEST_CASE("weights and thresholds come from the policy") {
    ScoringPolicy p;
    p.weights["honeypot"] = 0.5;
    CHECK(score_session({sig("honeypot", 1.0)}, p).score.value() == doctest::Approx(0.5));
    p.theta_flag = 0.6;
    CHECK(score_session({sig("honeypot", 1.0)}, p).decision == Decision::pass);
    p.min_families_for_exclude = 3;
    CHECK(score_session({sig("honeypot", 1.0), sig("behavior", 1.0), sig("text", 1.0)}, p).decision == Decision::exclude);
    CHECK(score_session({sig("behavior", 1.0), sig("text", 1.0)}, p).decision == Decision::flag);
}

TEST_CASE("default weights") {
    const ScoringPolicy p;
    CHECK(p.weights.at("honeypot") == 1.0);
    CHECK(p.weights.at("behavior") == 0.7);
    CHECK(p.weights.at("text") == 0.8);
    CHECK(p.weights.at("comprehension") == 0.6);
    CHECK(p.weights.at("captcha") == 0.8);
    CHECK(p.weights.at("external") == 0.5);
    CHECK(p.captcha_threshold == 0.7);
    CHECK(p.min_families_for_exclude == 2);
}

TEST_CASE("assessment JSON round-trips") {
    const ScoringPolicy p;
    auto a = score_session({sig("honeypot", 1.0, VariantHint::full_delegation), sig("behavior", 0.4, VariantHint::partial_mediation)}, p, "s");
    a.warnings.push_back("captcha-missing");
    const auto j = assessment_to_json(a);
    CHECK(j.at("decision") == "flag");
    CHECK(j.at("families").at("honeypot") == 1.0);
    CHECK(assessment_from_json(nlohmann::json::parse(j.dump())) == a);
}
