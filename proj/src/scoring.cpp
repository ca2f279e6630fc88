#include "sentinel/scoring.hpp"

#include <algorithm>

namespace sentinel::scoring {

CaptchaResult captcha_policy(std::span<const CaptchaScore> scores, const ScoringPolicy& policy,
                             const std::string& session_id) {
    CaptchaResult r;
    if (scores.empty()) {
        r.warning = "captcha-missing";
        return r;
    }
    const auto lowest = std::min_element(scores.begin(), scores.end(),
                                         [](const CaptchaScore& a, const CaptchaScore& b) {
                                             return a.score.value() < b.score.value();
                                         });
    const double m = lowest->score.value();
    const double threshold = policy.captcha_threshold;
    if (!(m < threshold)) return r;
    r.signal = DetectionSignal{"captcha.score", session_id, Unit::clamped((threshold - m) / threshold),
                               VariantHint::full_delegation,
                               {{"checkpoint_id", lowest->checkpoint_id},
                                {"min_score", std::to_string(m)}}};
    return r;
}

std::optional<DetectionSignal> captcha_challenge_policy(std::span<const CaptchaScore> challenges,
                                                        const std::string& session_id) {
    for (const auto& c : challenges) {
        if (c.score.value() < 0.5) {
            return DetectionSignal{"captcha.challenge", session_id, Unit(1.0),
                                   VariantHint::full_delegation,
                                   {{"checkpoint_id", c.checkpoint_id}}};
        }
    }
    return std::nullopt;
}

VariantDistribution attribute_variant(std::span<const DetectionSignal> signals) {
    double partial = 0.0, full = 0.0, unknown = 0.0;
    for (const auto& s : signals) {
        switch (s.variant_hint) {
            case VariantHint::partial_mediation: partial += s.severity; break;
            case VariantHint::full_delegation: full += s.severity; break;
            case VariantHint::unknown: unknown += s.severity; break;
        }
    }
    const double total = partial + full + unknown;
    if (total <= 0.0) return {};
    return {partial / total, full / total, unknown / total};
}

PollutionAssessment score_session(std::vector<DetectionSignal> signals, const ScoringPolicy& policy,
                                  const std::string& session_id) {
    PollutionAssessment a;
    a.session_id = session_id;
    const auto& families = detector_families();
    for (const auto& s : signals) {
        const auto fam = family_of(s.detector_id);
        if (std::find(families.begin(), families.end(), fam) == families.end()) {
            throw ConfigError("signal from unregistered detector family '" + s.detector_id + "'");
        }
        auto& sd = a.family_severity[fam];
        sd = std::max(sd, s.severity.value());
        a.families_triggered.insert(fam);
    }

    // Iterating the ordered map keeps the product order, and so the score bits,
    // independent of signal order.
    double survive = 1.0;
    int strong_families = 0;
    for (const auto& [fam, sd] : a.family_severity) {
        auto w = policy.weights.find(fam);
        const double weight = w == policy.weights.end() ? 0.0 : w->second;
        survive *= 1.0 - weight * sd;
        if (sd >= 0.5 && weight > 0.0) ++strong_families;
    }
    a.score = Unit::clamped(1.0 - survive);

    if (a.score.value() >= policy.theta_exclude && strong_families >= policy.min_families_for_exclude) {
        a.decision = Decision::exclude;
    } else if (a.score.value() >= policy.theta_flag) {
        a.decision = Decision::flag;
    } else {
        a.decision = Decision::pass;
    }

    std::sort(signals.begin(), signals.end());
    a.variant = attribute_variant(signals);
    a.signals = std::move(signals);
    return a;
}

nlohmann::ordered_json signal_to_json(const DetectionSignal& s) {
    using oj = nlohmann::ordered_json;
    oj ev = oj::array();
    for (const auto& [k, v] : s.evidence) ev.push_back(oj::array({k, v}));
    oj js;
    js["detector_id"] = s.detector_id;
    js["session_id"] = s.session_id;
    js["severity"] = s.severity.value();
    js["variant_hint"] = to_string(s.variant_hint);
    js["evidence"] = std::move(ev);
    return js;
}

nlohmann::ordered_json assessment_to_json(const PollutionAssessment& a) {
    using oj = nlohmann::ordered_json;
    oj fam = oj::object();
    for (const auto& [k, v] : a.family_severity) fam[k] = v;
    oj signals = oj::array();
    for (const auto& s : a.signals) signals.push_back(signal_to_json(s));
    oj j;
    j["session_id"] = a.session_id;
    j["score"] = a.score.value();
    j["decision"] = to_string(a.decision);
    j["families"] = std::move(fam);
    j["families_triggered"] = a.families_triggered;
    j["variant"] = {{"partial_mediation", a.variant.partial_mediation},
                    {"full_delegation", a.variant.full_delegation},
                    {"unknown", a.variant.unknown}};
    j["signals"] = std::move(signals);
    j["warnings"] = a.warnings;
    return j;
}

PollutionAssessment assessment_from_json(const nlohmann::json& j) {
    PollutionAssessment a;
    a.session_id = j.at("session_id").get<std::string>();
    a.score = Unit(j.at("score").get<double>());
    auto d = parse_decision(j.at("decision").get<std::string>());
    if (!d) throw std::invalid_argument("unknown decision");
    a.decision = *d;
    for (const auto& [k, v] : j.at("families").items()) a.family_severity[k] = v.get<double>();
    a.families_triggered = j.at("families_triggered").get<std::set<std::string>>();
    const auto& v = j.at("variant");
    a.variant = {v.at("partial_mediation").get<double>(), v.at("full_delegation").get<double>(),
                 v.at("unknown").get<double>()};
    for (const auto& js : j.at("signals")) {
        DetectionSignal s;
        s.detector_id = js.at("detector_id").get<std::string>();
        s.session_id = js.at("session_id").get<std::string>();
        s.severity = Unit(js.at("severity").get<double>());
        auto hint = parse_variant_hint(js.at("variant_hint").get<std::string>());
        if (!hint) throw std::invalid_argument("unknown variant hint");
        s.variant_hint = *hint;
        for (const auto& e : js.at("evidence")) {
            s.evidence.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
        a.signals.push_back(std::move(s));
    }
    a.warnings = j.at("warnings").get<std::vector<std::string>>();
    return a;
}

}  // namespace sentinel::scoring
