#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>

#include "sentinel/behavior.hpp"
#include "sentinel/phrase_match.hpp"
#include "sentinel/screening.hpp"
#include "sentinel/unicode.hpp"

namespace sentinel::screening {

bool is_hedge_word(std::string_view word) {
    static const std::set<std::string, std::less<>> hedges{
        "perhaps",   "maybe",     "might",       "may",        "could",      "possibly",
        "probably",  "likely",    "generally",   "typically",  "usually",    "often",
        "somewhat",  "arguably",  "potentially", "seems",      "seem",       "appears",
        "appear",    "suggests",  "suggest",     "relatively", "largely",    "overall",
        "ultimately", "essentially", "various", "certain",    "somehow",    "fairly"};
    return hedges.count(word) != 0;
}

StylometryResult stylometric_flags(std::string_view raw, const TextThresholds& t,
                                   const std::string& session_id) {
    StylometryResult r;
    const std::string norm = text::normalize_text(raw);
    const auto tokens = text::tokenize(norm);
    r.profile.word_count = tokens.size();

    for (const auto& p : t.marker_patterns) {
        for (const auto& m : text::PhrasePattern(p).find_all(tokens)) {
            r.profile.marker_phrase_hits.push_back({p, m.begin, m.end});
        }
    }

    if (tokens.size() >= t.min_words) {
        std::size_t hedges = 0;
        std::set<std::string> types;
        for (const auto& tok : tokens) {
            if (is_hedge_word(tok.word)) ++hedges;
            types.insert(tok.word);
        }
        const double words = static_cast<double>(tokens.size());
        r.profile.hedge_density = 100.0 * static_cast<double>(hedges) / words;
        r.profile.type_token_ratio = static_cast<double>(types.size()) / words;

        std::vector<double> lengths;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= norm.size(); ++i) {
            if (i == norm.size() || norm[i] == '.' || norm[i] == '!' || norm[i] == '?') {
                const auto n = text::tokenize(std::string_view(norm).substr(start, i - start)).size();
                if (n > 0) lengths.push_back(static_cast<double>(n));
                start = i + 1;
            }
        }
        double mean = 0.0;
        for (double l : lengths) mean += l;
        mean /= static_cast<double>(lengths.size());
        r.profile.mean_sentence_len = mean;
        r.profile.sentence_len_cv = behavior::coefficient_of_variation(lengths);
    }

    if (!r.profile.marker_phrase_hits.empty()) {
        Evidence ev;
        for (const auto& h : r.profile.marker_phrase_hits) {
            ev.emplace_back("marker", h.pattern_id + " @" + std::to_string(h.begin) + ":" +
                                          std::to_string(h.end));
        }
        r.signal = DetectionSignal{"text.marker", session_id, Unit(0.9),
                                   VariantHint::full_delegation, std::move(ev)};
    } else if (r.profile.sentence_len_cv && r.profile.hedge_density &&
               *r.profile.sentence_len_cv < t.uniformity_cv &&
               *r.profile.hedge_density > t.hedge_density) {
        r.signal = DetectionSignal{
            "text.uniformity", session_id, Unit(0.5), VariantHint::partial_mediation,
            {{"sentence_len_cv", std::to_string(*r.profile.sentence_len_cv)},
             {"hedge_density", std::to_string(*r.profile.hedge_density)}}};
    }
    return r;
}

std::string text_hash(std::string_view raw) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text::normalize_text(raw)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MockAiTextDetector::MockAiTextDetector(std::string name, std::string version,
                                       double default_probability)
    : name_(std::move(name)), version_(std::move(version)), default_probability_(default_probability) {}

void MockAiTextDetector::set_probability(std::string_view text, double p) {
    entries_[text_hash(text)] = {p, {}};
}

void MockAiTextDetector::set_failure(std::string_view text, std::string failure) {
    entries_[text_hash(text)] = {std::nullopt, std::move(failure)};
}

MockAiTextDetector MockAiTextDetector::from_json(std::string_view json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        MockAiTextDetector m(j.value("detector_name", std::string("mock-detector")),
                             j.value("version", std::string("1")),
                             j.value("default_probability", 0.0));
        const auto entries = j.value("entries", nlohmann::json::object());
        for (const auto& [hash, v] : entries.items()) {
            if (v.is_number()) {
                m.entries_[hash] = {v.get<double>(), {}};
            } else {
                m.entries_[hash] = {std::nullopt, v.get<std::string>()};
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("mock detector fixture: ") + e.what());
    }
}

AdapterResponse MockAiTextDetector::detect(const AdapterRequest& request) const {
    auto it = entries_.find(text_hash(request.text));
    double p = default_probability_;
    if (it != entries_.end()) {
        if (!it->second.probability) {
            throw AdapterError(name_ + ": " + (it->second.failure.empty() ? "failure" : it->second.failure));
        }
        p = *it->second.probability;
    }
    return {p, name_, version_};
}

ExternalResult external_detector(std::string_view text, const AiTextDetector& adapter,
                                 double threshold, const std::string& session_id) {
    ExternalResult r;
    AdapterResponse resp;
    try {
        resp = adapter.detect({std::string(text)});
    } catch (const std::exception& e) {
        r.warning = std::string("external detector unavailable: ") + e.what();
        return r;
    }
    if (!(resp.probability >= 0.0 && resp.probability <= 1.0)) {
        r.warning = "external detector " + resp.detector_name + " returned probability outside [0,1]";
        return r;
    }
    r.probability = resp.probability;
    if (resp.probability >= threshold) {
        r.signal = DetectionSignal{"external.ai_text", session_id, Unit(resp.probability),
                                   VariantHint::unknown,
                                   {{"detector", resp.detector_name}, {"version", resp.version}}};
    }
    return r;
}

}  // namespace sentinel::screening
