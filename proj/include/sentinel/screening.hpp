#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/policy.hpp"
#include "sentinel/types.hpp"

namespace sentinel::screening {

// ---- similarity --------------------------------------------------------------

/// Plain two-row dynamic-programming edit distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Edit distance if it is at most `max_distance`, else nullopt. Banded, with
/// early exit once every cell of a row exceeds the bound.
std::optional<std::size_t> bounded_levenshtein(std::u32string_view a, std::u32string_view b,
                                               std::size_t max_distance);

/// 1 - lev(a,b)/max(|a|,|b|) over code points of the first `max_chars` of
/// each (already normalized) string. Two empty strings are identical.
double pairwise_similarity(std::string_view a, std::string_view b, std::size_t max_chars = 2000);

struct SimilarityPair {
    std::string session_a;
    std::string session_b;
    std::string item_id;
    double similarity = 0.0;
};

// ---- duplicate clusters ------------------------------------------------------

struct ResponseEntry {
    std::string session_id;
    std::string item_id;
    std::string text;
};

struct DuplicateCluster {
    std::string item_id;
    std::vector<std::string> members;  // session ids, sorted; one per clustered response
    std::size_t distinct_sessions = 0;
};

struct DuplicateResult {
    std::vector<DuplicateCluster> clusters;
    std::vector<DetectionSignal> signals;
    std::vector<SimilarityPair> pairs;  // every linked pair, canonical order
};

/// Per item, single-linkage clusters over pairs with similarity >= tau.
/// Clusters spanning at least two sessions produce one signal per session.
DuplicateResult duplicate_clusters(std::span<const ResponseEntry> responses, double tau = 0.9,
                                   std::size_t max_chars = 2000);

// ---- stylometry --------------------------------------------------------------

struct MarkerHit {
    std::string pattern_id;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct StylometricProfile {
    std::vector<MarkerHit> marker_phrase_hits;
    std::size_t word_count = 0;
    // Density metrics, present only at or above the word floor.
    std::optional<double> hedge_density;  // hedging tokens per 100 words
    std::optional<double> mean_sentence_len;
    std::optional<double> sentence_len_cv;
    std::optional<double> type_token_ratio;
};

struct StylometryResult {
    StylometricProfile profile;
    std::optional<DetectionSignal> signal;
};

bool is_hedge_word(std::string_view word);

/// `text` is normalized first, so raw responses are fine.
StylometryResult stylometric_flags(std::string_view text, const TextThresholds& thresholds,
                                   const std::string& session_id = {});

// ---- external AI-text detectors ----------------------------------------------

struct AdapterRequest {
    std::string text;
};

struct AdapterResponse {
    double probability = 0.0;
    std::string detector_name;
    std::string version;
};

/// Timeout or protocol failure reported by an adapter.
class AdapterError : public Error {
public:
    using Error::Error;
};

class AiTextDetector {
public:
    virtual ~AiTextDetector() = default;
    virtual AdapterResponse detect(const AdapterRequest& request) const = 0;
};

/// FNV-1a 64 of the normalized text, as 16 hex digits. Fixture table key.
std::string text_hash(std::string_view text);

/// Replays a fixture table keyed by text_hash. Entries hold a probability or
/// one of the failure markers "timeout" / "protocol_error".
class MockAiTextDetector final : public AiTextDetector {
public:
    struct Entry {
        std::optional<double> probability;
        std::string failure;
    };

    MockAiTextDetector(std::string name = "mock-detector", std::string version = "1",
                       double default_probability = 0.0);

    void set_probability(std::string_view text, double p);
    void set_failure(std::string_view text, std::string failure);

    /// {"detector_name","version","default_probability","entries":{hash: p|"timeout"}}
    static MockAiTextDetector from_json(std::string_view json_text);

    AdapterResponse detect(const AdapterRequest& request) const override;

private:
    std::string name_;
    std::string version_;
    double default_probability_;
    std::map<std::string, Entry> entries_;
};

struct ExternalResult {
    std::optional<double> probability;
    std::optional<DetectionSignal> signal;
    std::optional<std::string> warning;
};

/// Never throws for adapter failures: they degrade to a warning and no signal.
ExternalResult external_detector(std::string_view text, const AiTextDetector& adapter,
                                 double threshold = 0.8, const std::string& session_id = {});

}  // namespace sentinel::screening
