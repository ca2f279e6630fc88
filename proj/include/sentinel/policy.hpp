#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace sentinel {

/// How detector families combine into a session decision.
struct ScoringPolicy {
    std::map<std::string, double> weights{{"honeypot", 1.0},      {"behavior", 0.7},
                                          {"text", 0.8},          {"comprehension", 0.6},
                                          {"captcha", 0.8},       {"external", 0.5}};
    std::set<std::string> enabled{"honeypot", "behavior", "text", "comprehension", "captcha",
                                  "external"};
    double theta_flag = 0.5;
    double theta_exclude = 0.9;
    double captcha_threshold = 0.7;
    int min_families_for_exclude = 2;

    [[nodiscard]] bool is_enabled(const std::string& family) const {
        return enabled.count(family) != 0;
    }
    /// Throws ConfigError when a weight or threshold leaves [0,1], theta_flag >
    /// theta_exclude, or a registered family has no weight.
    void validate() const;
};

struct BehaviorThresholds {
    double cv_threshold = 0.05;
    int min_latencies = 20;
    int min_mouse_samples = 30;
    double straight_fraction = 0.95;
    double collinear_area_px2 = 0.5;
    int min_response_chars = 40;
    double keystroke_ratio = 0.5;
    int min_focus_shifts = 3;
    int focus_hidden_ms = 1000;
};

struct TextThresholds {
    double duplicate_tau = 0.9;
    std::size_t max_compare_chars = 2000;
    std::size_t min_words = 30;
    double uniformity_cv = 0.15;
    double hedge_density = 8.0;
    double external_threshold = 0.8;
    std::vector<std::string> marker_patterns{
        "as an ai",
        "as an ai language model",
        "as a language model",
        "i don't experience * in the same way humans do",
        "i do not experience * in the same way humans do",
        "i don't have personal *",
        "i do not have personal *",
        "certainly! here is",
        "certainly! here's",
        "sure! here is",
        "here is a summary of the instructions",
    };
};

struct ComprehensionPolicy {
    int min_prototypical = 2;
    bool allow_single_item = false;
};

}  // namespace sentinel
