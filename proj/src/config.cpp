#include "sentinel/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sentinel/comprehension.hpp"
#include "sentinel/honeypot.hpp"

namespace sentinel {

using nlohmann::json;

std::string_view to_string(ItemKind k) {
    switch (k) {
        case ItemKind::open_text: return "open_text";
        case ItemKind::choice: return "choice";
        case ItemKind::check: return "check";
    }
    return "open_text";
}

void ScoringPolicy::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (const auto& f : detector_families()) {
        auto it = weights.find(f);
        if (it == weights.end()) throw ConfigError("no weight for detector family '" + f + "'");
    }
    for (const auto& [f, w] : weights) {
        if (!in_unit(w)) throw ConfigError("weight of '" + f + "' outside [0,1]");
        const auto& fams = detector_families();
        if (std::find(fams.begin(), fams.end(), f) == fams.end()) {
            throw ConfigError("unregistered detector family '" + f + "'");
        }
    }
    for (const auto& f : enabled) {
        if (weights.count(f) == 0) throw ConfigError("enabled family '" + f + "' is unregistered");
    }
    if (!in_unit(theta_flag) || !in_unit(theta_exclude) || !in_unit(captcha_threshold)) {
        throw ConfigError("thresholds must lie in [0,1]");
    }
    if (theta_flag > theta_exclude) throw ConfigError("theta_flag exceeds theta_exclude");
    if (min_families_for_exclude < 1) throw ConfigError("min_families_for_exclude must be >= 1");
}

const ItemDecl* StudyConfig::find_item(std::string_view item_id) const {
    for (const auto& i : items) {
        if (i.item_id == item_id) return &i;
    }
    return nullptr;
}

const CheckItem* StudyConfig::find_check_item(std::string_view item_id) const {
    for (const auto& i : check_items) {
        if (i.item_id == item_id) return &i;
    }
    return nullptr;
}

std::optional<CaptchaKind> StudyConfig::checkpoint_kind(std::string_view checkpoint_id) const {
    for (const auto& c : captcha_checkpoints) {
        if (c.checkpoint_id == checkpoint_id) return c.kind;
    }
    return std::nullopt;
}

bool StudyConfig::is_open_text(std::string_view item_id) const {
    const auto* i = find_item(item_id);
    return i != nullptr && i->kind == ItemKind::open_text;
}

const TrapSpec* StudyConfig::find_trap(std::string_view trap_id) const {
    for (const auto& t : traps) {
        if (t.trap_id == trap_id) return &t;
    }
    return nullptr;
}

std::string default_study_notice() {
    return "This study is about how people think and decide. We are interested in your own "
           "answers, in your own words. Please do not use AI assistants, chatbots or browser "
           "agents to complete any part of it.";
}

std::string default_affirmation_text() {
    return "I confirm that the answers I give in this study are my own and are written without "
           "help from AI tools.";
}

StudyConfig default_study_config(std::string study_id) {
    StudyConfig cfg;
    cfg.study_id = std::move(study_id);
    cfg.check_items = comprehension::builtin_items();
    cfg.items = {
        {"q_decision", ItemKind::open_text,
         "Describe a recent situation in which you had to make a difficult decision. What did "
         "you weigh up, and how did you decide in the end?"},
        {"q_neighbourhood", ItemKind::open_text,
         "In a few sentences, explain what you think makes a neighbourhood a good place to live."},
        {"q_age_band", ItemKind::choice, "Which age band do you belong to?"},
    };
    for (const auto& c : cfg.check_items) {
        cfg.items.push_back({c.item_id, ItemKind::check, c.prompt_text});
    }
    cfg.captcha_checkpoints = {{"v2_start", CaptchaKind::challenge},
                               {"v2_middle", CaptchaKind::challenge},
                               {"v3_score", CaptchaKind::score}};
    cfg.norms = {default_study_notice(), default_affirmation_text()};
    finalize_study_config(cfg);
    return cfg;
}

void finalize_study_config(StudyConfig& cfg) {
    if (cfg.study_id.empty()) throw ConfigError("study_id is required");
    cfg.policy.validate();
    std::set<std::string> ids;
    for (const auto& i : cfg.items) {
        if (i.item_id.empty()) throw ConfigError("item without item_id");
        if (!ids.insert(i.item_id).second) throw ConfigError("duplicate item_id " + i.item_id);
        if (i.kind == ItemKind::check && cfg.find_check_item(i.item_id) == nullptr) {
            throw ConfigError("check item " + i.item_id + " is missing from the item bank");
        }
    }
    for (const auto& c : cfg.check_items) comprehension::validate_item(c);
    std::set<std::string> checkpoints;
    for (const auto& c : cfg.captcha_checkpoints) {
        if (!checkpoints.insert(c.checkpoint_id).second) {
            throw ConfigError("duplicate captcha checkpoint " + c.checkpoint_id);
        }
    }
    if (cfg.text.duplicate_tau <= 0.0 || cfg.text.duplicate_tau > 1.0) {
        throw ConfigError("duplicate_tau must lie in (0,1]");
    }
    if (cfg.text.external_threshold < 0.0 || cfg.text.external_threshold > 1.0) {
        throw ConfigError("external_threshold must lie in [0,1]");
    }
    cfg.traps = honeypot::generate_traps(cfg, cfg.trap_settings.seed);
}

namespace {

ItemKind parse_item_kind(const std::string& s) {
    if (s == "open_text") return ItemKind::open_text;
    if (s == "choice") return ItemKind::choice;
    if (s == "check") return ItemKind::check;
    throw ConfigError("unknown item kind '" + s + "'");
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

StudyConfig parse_study_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    StudyConfig cfg;
    try {
        const json j = json::parse(json_text);
        cfg.study_id = j.at("study_id").get<std::string>();
        for (const auto& it : j.at("items")) {
            cfg.items.push_back({it.at("item_id").get<std::string>(),
                                 parse_item_kind(it.value("kind", std::string("open_text"))),
                                 it.value("prompt", std::string())});
        }
        if (j.contains("traps")) {
            const auto& t = j.at("traps");
            read_opt(t, "keyword", cfg.trap_settings.keyword);
            read_opt(t, "seed", cfg.trap_settings.seed);
        }
        if (j.contains("policy")) {
            const auto& p = j.at("policy");
            if (p.contains("weights")) {
                for (const auto& [k, v] : p.at("weights").items()) cfg.policy.weights[k] = v.get<double>();
            }
            if (p.contains("enabled")) cfg.policy.enabled = p.at("enabled").get<std::set<std::string>>();
            read_opt(p, "theta_flag", cfg.policy.theta_flag);
            read_opt(p, "theta_exclude", cfg.policy.theta_exclude);
            read_opt(p, "captcha_threshold", cfg.policy.captcha_threshold);
            read_opt(p, "min_families_for_exclude", cfg.policy.min_families_for_exclude);
        }
        if (j.contains("behavior")) {
            const auto& b = j.at("behavior");
            auto& o = cfg.behavior;
            read_opt(b, "cv_threshold", o.cv_threshold);
            read_opt(b, "min_latencies", o.min_latencies);
            read_opt(b, "min_mouse_samples", o.min_mouse_samples);
            read_opt(b, "straight_fraction", o.straight_fraction);
            read_opt(b, "collinear_area_px2", o.collinear_area_px2);
            read_opt(b, "min_response_chars", o.min_response_chars);
            read_opt(b, "keystroke_ratio", o.keystroke_ratio);
            read_opt(b, "min_focus_shifts", o.min_focus_shifts);
            read_opt(b, "focus_hidden_ms", o.focus_hidden_ms);
        }
        if (j.contains("text")) {
            const auto& t = j.at("text");
            auto& o = cfg.text;
            read_opt(t, "duplicate_tau", o.duplicate_tau);
            read_opt(t, "max_compare_chars", o.max_compare_chars);
            read_opt(t, "min_words", o.min_words);
            read_opt(t, "uniformity_cv", o.uniformity_cv);
            read_opt(t, "hedge_density", o.hedge_density);
            read_opt(t, "external_threshold", o.external_threshold);
            read_opt(t, "marker_patterns", o.marker_patterns);
        }
        if (j.contains("comprehension")) {
            const auto& c = j.at("comprehension");
            read_opt(c, "min_prototypical", cfg.comprehension.min_prototypical);
            read_opt(c, "allow_single_item", cfg.comprehension.allow_single_item);
        }
        if (j.contains("check_items")) {
            cfg.check_items = comprehension::parse_item_bank(j.at("check_items").dump());
        } else if (j.contains("item_bank")) {
            std::filesystem::path bank = j.at("item_bank").get<std::string>();
            if (bank.is_relative()) bank = base_dir / bank;
            cfg.check_items = comprehension::parse_item_bank(read_file(bank));
        } else {
            cfg.check_items = comprehension::builtin_items();
        }
        for (const auto& c : j.value("captcha_checkpoints", json::array())) {
            const auto kind = c.value("kind", std::string("score"));
            if (kind != "challenge" && kind != "score") {
                throw ConfigError("unknown captcha checkpoint kind '" + kind + "'");
            }
            cfg.captcha_checkpoints.push_back(
                {c.at("checkpoint_id").get<std::string>(),
                 kind == "challenge" ? CaptchaKind::challenge : CaptchaKind::score});
        }
        cfg.norms = {default_study_notice(), default_affirmation_text()};
        if (j.contains("norms")) {
            read_opt(j.at("norms"), "notice", cfg.norms.notice);
            read_opt(j.at("norms"), "affirmation", cfg.norms.affirmation);
        }
        read_opt(j, "retain_clipboard_text", cfg.retain_clipboard_text);
        read_opt(j, "max_response_chars", cfg.max_response_chars);
        read_opt(j, "access_token", cfg.access_token);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("study config: ") + e.what());
    }
    finalize_study_config(cfg);
    return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
    return parse_study_config(read_file(path), path.parent_path());
}

std::string dump_study_config(const StudyConfig& cfg) {
    json items = json::array();
    for (const auto& i : cfg.items) {
        items.push_back({{"item_id", i.item_id}, {"kind", to_string(i.kind)}, {"prompt", i.prompt}});
    }
    json checkpoints = json::array();
    for (const auto& c : cfg.captcha_checkpoints) {
        checkpoints.push_back({{"checkpoint_id", c.checkpoint_id},
                               {"kind", c.kind == CaptchaKind::challenge ? "challenge" : "score"}});
    }
    const auto& b = cfg.behavior;
    const auto& t = cfg.text;
    json j{
        {"study_id", cfg.study_id},
        {"items", items},
        {"traps", {{"keyword", cfg.trap_settings.keyword}, {"seed", cfg.trap_settings.seed}}},
        {"policy",
         {{"weights", cfg.policy.weights},
          {"enabled", cfg.policy.enabled},
          {"theta_flag", cfg.policy.theta_flag},
          {"theta_exclude", cfg.policy.theta_exclude},
          {"captcha_threshold", cfg.policy.captcha_threshold},
          {"min_families_for_exclude", cfg.policy.min_families_for_exclude}}},
        {"behavior",
         {{"cv_threshold", b.cv_threshold},
          {"min_latencies", b.min_latencies},
          {"min_mouse_samples", b.min_mouse_samples},
          {"straight_fraction", b.straight_fraction},
          {"collinear_area_px2", b.collinear_area_px2},
          {"min_response_chars", b.min_response_chars},
          {"keystroke_ratio", b.keystroke_ratio},
          {"min_focus_shifts", b.min_focus_shifts},
          {"focus_hidden_ms", b.focus_hidden_ms}}},
        {"text",
         {{"duplicate_tau", t.duplicate_tau},
          {"max_compare_chars", t.max_compare_chars},
          {"min_words", t.min_words},
          {"uniformity_cv", t.uniformity_cv},
          {"hedge_density", t.hedge_density},
          {"external_threshold", t.external_threshold},
          {"marker_patterns", t.marker_patterns}}},
        {"comprehension",
         {{"min_prototypical", cfg.comprehension.min_prototypical},
          {"allow_single_item", cfg.comprehension.allow_single_item}}},
        {"check_items", json::parse(comprehension::dump_item_bank(cfg.check_items))},
        {"captcha_checkpoints", checkpoints},
        {"norms", {{"notice", cfg.norms.notice}, {"affirmation", cfg.norms.affirmation}}},
        {"retain_clipboard_text", cfg.retain_clipboard_text},
        {"max_response_chars", cfg.max_response_chars},
    };
    if (!cfg.access_token.empty()) j["access_token"] = cfg.access_token;
    return j.dump(2) + "\n";
}

}  // namespace sentinel
