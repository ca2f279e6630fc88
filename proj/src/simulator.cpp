#include "sentinel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <random>
#include <thread>

#include "sentinel/unicode.hpp"
#include "sim_text.hpp"

namespace sentinel::sim {

using detail::pick;
using detail::unit;

std::string_view to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::human: return "human";
        case ProfileKind::spillover_human: return "spillover_human";
        case ProfileKind::partial_mediation: return "partial_mediation";
        case ProfileKind::full_delegation: return "full_delegation";
        case ProfileKind::honeypot_aware_delegation: return "honeypot_aware_delegation";
    }
    return "human";
}

std::optional<ProfileKind> parse_profile_kind(std::string_view s) {
    for (auto k : {ProfileKind::human, ProfileKind::spillover_human, ProfileKind::partial_mediation,
                   ProfileKind::full_delegation, ProfileKind::honeypot_aware_delegation}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

bool is_polluted(ProfileKind k) {
    return k == ProfileKind::partial_mediation || k == ProfileKind::full_delegation ||
           k == ProfileKind::honeypot_aware_delegation;
}

namespace {

bool is_delegation(ProfileKind k) {
    return k == ProfileKind::full_delegation || k == ProfileKind::honeypot_aware_delegation;
}

}  // namespace

AgentProfile AgentProfile::defaults(ProfileKind kind) {
    AgentProfile p;
    p.kind = kind;
    switch (kind) {
        case ProfileKind::human: break;
        case ProfileKind::spillover_human:
            p.typo_rate = 0.08;
            p.response_style = ResponseStyle::spillover;
            p.filler_rate = 0.08;
            break;
        case ProfileKind::partial_mediation:
            p.paste_probability = 1.0;
            p.focus_shifts_min = 2;
            p.focus_shifts_max = 4;
            p.stray_focus_shift_probability = 0.0;
            p.response_style = ResponseStyle::polished;
            break;
        case ProfileKind::full_delegation:
        case ProfileKind::honeypot_aware_delegation:
            p.constant_timing = true;
            p.backspace_rate = 0.0;
            p.straight_mouse = true;
            p.mouse_waypoints = 0;
            p.mouse_jitter_px = 0.0;
            p.stray_focus_shift_probability = 0.0;
            p.response_style = ResponseStyle::agent;
            p.marker_probability = 0.3;
            p.prototypical_answer_rate = 1.0;
            p.indeterminate_answer_rate = 0.0;
            p.sees_hidden_content = true;
            p.follows_hidden_instructions = kind == ProfileKind::full_delegation;
            p.touches_hidden_checkbox = kind == ProfileKind::full_delegation;
            p.captcha_score_min = 0.3;
            p.captcha_score_max = 0.95;
            break;
    }
    return p;
}

void AgentProfile::validate() const {
    auto prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError(std::string("profile ") + name + " must lie in [0,1]");
        }
    };
    prob(backspace_rate, "backspace_rate");
    prob(typo_rate, "typo_rate");
    prob(paste_probability, "paste_probability");
    prob(paste_fraction_min, "paste_fraction_min");
    prob(stray_focus_shift_probability, "stray_focus_shift_probability");
    prob(filler_rate, "filler_rate");
    prob(marker_probability, "marker_probability");
    prob(prototypical_answer_rate, "prototypical_answer_rate");
    prob(indeterminate_answer_rate, "indeterminate_answer_rate");
    prob(captcha_score_min, "captcha_score_min");
    prob(captcha_score_max, "captcha_score_max");
    if (prototypical_answer_rate + indeterminate_answer_rate > 1.0) {
        throw ConfigError("profile answer rates sum above 1");
    }
    if (captcha_score_min > captcha_score_max) throw ConfigError("profile captcha range is empty");
    if (focus_shifts_min < 0 || focus_shifts_min > focus_shifts_max) {
        throw ConfigError("profile focus shift range is invalid");
    }
    if (mouse_waypoints < 0 || !(mouse_jitter_px >= 0.0)) throw ConfigError("profile mouse model is invalid");
    if (!(constant_interkey_ms > 0.0) || !(constant_dwell_ms > 0.0) || !(interkey_log_sigma >= 0.0) ||
        !(dwell_log_sigma >= 0.0)) {
        throw ConfigError("profile timing parameters are invalid");
    }
    if (is_delegation(kind) && !sees_hidden_content) {
        throw ConfigError("delegation profiles see hidden content");
    }
    if (kind == ProfileKind::honeypot_aware_delegation &&
        (follows_hidden_instructions || touches_hidden_checkbox)) {
        throw ConfigError("honeypot-aware profiles ignore hidden instructions");
    }
    if (!sees_hidden_content && (follows_hidden_instructions || touches_hidden_checkbox)) {
        throw ConfigError("profile cannot act on hidden content it does not see");
    }
}

namespace {

constexpr double kFieldX = 420.0;
constexpr double kFirstFieldY = 180.0;
constexpr double kFieldSpacing = 140.0;
constexpr double kCheckboxX = 24.0;
constexpr double kCheckboxY = 60.0;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

Point field_center(std::size_t index) {
    return {kFieldX, kFirstFieldY + kFieldSpacing * static_cast<double>(index)};
}

double gauss(std::mt19937_64& rng) {
    // Box-Muller over the portable uniform source.
    const double u1 = 1.0 - unit(rng);
    const double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t uniform_ms(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(pick(rng, static_cast<std::size_t>(hi - lo + 1)));
}

double round_to(double v, double step) { return std::round(v / step) * step; }

/// Collects events in time order; seq follows (t, insertion order).
class Timeline {
public:
    void add(std::int64_t t, EventKind kind, Payload payload) {
        events_.push_back({0, t, kind, std::move(payload)});
    }

    std::vector<TelemetryEvent> finish() {
        std::stable_sort(events_.begin(), events_.end(),
                         [](const TelemetryEvent& a, const TelemetryEvent& b) { return a.t_ms < b.t_ms; });
        for (std::size_t i = 0; i < events_.size(); ++i) events_[i].seq = static_cast<std::int64_t>(i + 1);
        return std::move(events_);
    }

private:
    std::vector<TelemetryEvent> events_;
};

class SessionBuilder {
public:
    SessionBuilder(const AgentProfile& p, const StudyConfig& c, std::uint64_t seed, const Plant& plant)
        : profile_(p), config_(c), plant_(plant), rng_(seed) {}

    std::vector<TelemetryEvent> run() {
        if (is_delegation(profile_.kind)) {
            run_delegation();
        } else {
            run_human_like();
        }
        return timeline_.finish();
    }

private:
    const AgentProfile& profile_;
    const StudyConfig& config_;
    const Plant& plant_;
    std::mt19937_64 rng_;
    Timeline timeline_;
    std::int64_t t_ = 0;
    Point mouse_{640.0, 40.0};

    // ---- shared pieces ----

    std::vector<const CaptchaCheckpoint*> checkpoints(CaptchaKind kind) const {
        std::vector<const CaptchaCheckpoint*> out;
        for (const auto& c : config_.captcha_checkpoints) {
            if (c.kind == kind) out.push_back(&c);
        }
        return out;
    }

    /// Index of the item before which each challenge checkpoint is shown.
    std::vector<std::size_t> challenge_slots(std::size_t n_challenges) const {
        std::vector<std::size_t> slots;
        for (std::size_t i = 0; i < n_challenges; ++i) slots.push_back(i * config_.items.size() / n_challenges);
        return slots;
    }

    /// Returns false when the participant failed the challenge and stopped.
    bool challenge(const CaptchaCheckpoint& c, bool first) {
        const bool fail = first && plant_.challenge_failure;
        timeline_.add(t_, EventKind::captcha_score, CaptchaPayload{c.checkpoint_id, Unit(fail ? 0.0 : 1.0)});
        return !fail;
    }

    void score_checkpoints() {
        for (const auto* c : checkpoints(CaptchaKind::score)) {
            double s = 0.0;
            if (plant_.captcha_score) {
                s = *plant_.captcha_score;
            } else {
                const double span = profile_.captcha_score_max - profile_.captcha_score_min;
                const double step = is_delegation(profile_.kind) ? 0.05 : 0.1;
                s = profile_.captcha_score_min + round_to(span * unit(rng_), step);
                s = std::clamp(round_to(s, 0.01), profile_.captcha_score_min, profile_.captcha_score_max);
            }
            t_ += uniform_ms(rng_, 300, 900);
            timeline_.add(t_, EventKind::captcha_score, CaptchaPayload{c->checkpoint_id, Unit(s)});
        }
    }

    void submit(const std::string& item_id, std::string text, InputMode mode) {
        timeline_.add(t_, EventKind::response_submit, ResponsePayload{item_id, std::move(text), mode});
    }

    std::string check_text(const std::string& item_id) {
        const double u = unit(rng_);
        auto kind = detail::CheckAnswer::human;
        if (u < profile_.prototypical_answer_rate) {
            kind = detail::CheckAnswer::prototypical;
        } else if (u < profile_.prototypical_answer_rate + profile_.indeterminate_answer_rate) {
            kind = detail::CheckAnswer::indeterminate;
        }
        return detail::check_answer(item_id, kind, rng_);
    }

    const TrapSpec* text_trap_for(const std::string& item_id) const {
        for (const auto& t : config_.traps) {
            if (is_text_technique(t.technique) && t.target_item_id == item_id) return &t;
        }
        return nullptr;
    }

    const TrapSpec* checkbox_trap() const {
        for (const auto& t : config_.traps) {
            if (t.technique == TrapTechnique::hidden_checkbox) return &t;
        }
        return nullptr;
    }

    // ---- human-like participants ----

    std::int64_t human_interkey() {
        const double v = std::exp(profile_.interkey_log_mu + profile_.interkey_log_sigma * gauss(rng_));
        return std::max<std::int64_t>(15, std::llround(v));
    }

    std::int64_t human_dwell() {
        const double v = std::exp(profile_.dwell_log_mu + profile_.dwell_log_sigma * gauss(rng_));
        return std::max<std::int64_t>(10, std::llround(v));
    }

    void key(const std::string& label) {
        timeline_.add(t_, EventKind::key_down, KeyPayload{label});
        timeline_.add(t_ + human_dwell(), EventKind::key_up, KeyPayload{label});
        t_ += human_interkey();
    }

    void type_like_human(std::string_view text) {
        static const std::string kLetters = "abcdefghijklmnopqrstuvwxyz";
        for (char32_t c : text::to_u32(text)) {
            const std::string label = text::to_utf8(std::u32string(1, c));
            if (profile_.typo_rate > 0.0 && unit(rng_) < profile_.typo_rate) {
                key(std::string(1, kLetters[pick(rng_, kLetters.size())]));
                key("Backspace");
            }
            key(label);
            if (profile_.backspace_rate > 0.0 && unit(rng_) < profile_.backspace_rate) {
                key("Backspace");
                key(label);
            }
            if (c == U'.' || c == U'?' || c == U'!') t_ += uniform_ms(rng_, 300, 1500);
        }
    }

    void curved_move(Point to) {
        std::vector<Point> path{mouse_};
        for (int w = 0; w < profile_.mouse_waypoints; ++w) {
            const double f = static_cast<double>(w + 1) / (profile_.mouse_waypoints + 1);
            path.push_back({mouse_.x + (to.x - mouse_.x) * f + 60.0 * gauss(rng_),
                            mouse_.y + (to.y - mouse_.y) * f + 60.0 * gauss(rng_)});
        }
        path.push_back(to);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const Point a = path[i];
            const Point b = path[i + 1];
            const double dist = std::hypot(b.x - a.x, b.y - a.y);
            const int steps = std::max(4, static_cast<int>(dist / 12.0));
            for (int s = 1; s <= steps; ++s) {
                const double f = static_cast<double>(s) / steps;
                t_ += 50;
                timeline_.add(t_, EventKind::mouse_move,
                              MousePayload{round_to(a.x + (b.x - a.x) * f + profile_.mouse_jitter_px * gauss(rng_), 0.1),
                                           round_to(a.y + (b.y - a.y) * f + profile_.mouse_jitter_px * gauss(rng_), 0.1)});
            }
        }
        mouse_ = to;
    }

    void focus_shift(std::int64_t hidden_lo, std::int64_t hidden_hi) {
        timeline_.add(t_, EventKind::visibility, VisibilityPayload{true});
        t_ += uniform_ms(rng_, hidden_lo, hidden_hi);
        timeline_.add(t_, EventKind::visibility, VisibilityPayload{false});
        t_ += uniform_ms(rng_, 200, 800);
    }

    void open_text_item(const ItemDecl& item, std::size_t topic, bool first_open) {
        std::string text = detail::open_text_answer(profile_.response_style, topic, profile_.filler_rate, rng_);
        if (plant_.keyword && first_open) {
            text += ' ';
            text += detail::keyword_sentence(config_.trap_settings.keyword, rng_);
        }
        if (first_open) {
            for (int i = 0; i < plant_.blocked_pastes; ++i) {
                timeline_.add(t_, EventKind::clipboard,
                              ClipboardPayload{ClipboardAction::paste,
                                               static_cast<std::int64_t>(text::codepoint_count(text)),
                                               std::nullopt, true});
                t_ += uniform_ms(rng_, 500, 2500);
            }
        }

        const bool paste = profile_.paste_probability > 0.0 && unit(rng_) < profile_.paste_probability;
        if (!paste) {
            if (unit(rng_) < profile_.stray_focus_shift_probability) focus_shift(1500, 8000);
            type_like_human(text);
        } else {
            const int shifts = profile_.focus_shifts_min +
                               static_cast<int>(pick(rng_, static_cast<std::size_t>(
                                                               profile_.focus_shifts_max - profile_.focus_shifts_min + 1)));
            for (int i = 0; i < shifts; ++i) focus_shift(5000, 30000);
            const auto cps = text::to_u32(text);
            const double typed_share = (1.0 - profile_.paste_fraction_min) * unit(rng_);
            const auto prefix = static_cast<std::size_t>(std::floor(typed_share * static_cast<double>(cps.size())));
            type_like_human(text::to_utf8(std::u32string_view(cps).substr(0, prefix)));
            const std::string pasted = text::to_utf8(std::u32string_view(cps).substr(prefix));
            std::optional<std::string> kept;
            if (config_.retain_clipboard_text) kept = text::to_utf8(std::u32string_view(cps).substr(prefix, 1000));
            timeline_.add(t_, EventKind::clipboard,
                          ClipboardPayload{ClipboardAction::paste,
                                           static_cast<std::int64_t>(cps.size() - prefix), kept, false});
            t_ += uniform_ms(rng_, 1000, 4000);
        }
        t_ += uniform_ms(rng_, 300, 1200);
        submit(item.item_id, std::move(text), InputMode::typed);
    }

    void run_human_like() {
        t_ = uniform_ms(rng_, 2000, 6000);
        timeline_.add(t_, EventKind::affirmation, AffirmationPayload{true});
        const auto challenges = checkpoints(CaptchaKind::challenge);
        const auto slots = challenge_slots(challenges.size());
        std::size_t next_challenge = 0;
        std::size_t topic = 0;
        for (std::size_t i = 0; i < config_.items.size(); ++i) {
            while (next_challenge < challenges.size() && slots[next_challenge] == i) {
                t_ += uniform_ms(rng_, 1000, 3000);
                if (!challenge(*challenges[next_challenge], next_challenge == 0)) return;
                ++next_challenge;
            }
            const auto& item = config_.items[i];
            curved_move(field_center(i));
            t_ += uniform_ms(rng_, 500, 2500);
            switch (item.kind) {
                case ItemKind::open_text:
                    open_text_item(item, topic, topic == 0);
                    ++topic;
                    break;
                case ItemKind::check: {
                    const auto answer = check_text(item.item_id);
                    type_like_human(answer);
                    t_ += uniform_ms(rng_, 300, 1200);
                    submit(item.item_id, answer, InputMode::typed);
                    break;
                }
                case ItemKind::choice:
                    t_ += uniform_ms(rng_, 200, 800);
                    submit(item.item_id, detail::choice_answer(rng_), InputMode::choice);
                    break;
            }
        }
        score_checkpoints();
    }

    // ---- delegated agents ----

    void straight_move(Point to) {
        const double dist = std::hypot(to.x - mouse_.x, to.y - mouse_.y);
        const int steps = std::max(40, static_cast<int>(dist / 6.0));
        const Point from = mouse_;
        for (int s = 1; s <= steps; ++s) {
            const double f = static_cast<double>(s) / steps;
            t_ += 10;
            timeline_.add(t_, EventKind::mouse_move,
                          MousePayload{from.x + (to.x - from.x) * f, from.y + (to.y - from.y) * f});
        }
        mouse_ = to;
    }

    void run_delegation() {
        t_ = uniform_ms(rng_, 300, 800);
        timeline_.add(t_, EventKind::affirmation, AffirmationPayload{true});
        const auto challenges = checkpoints(CaptchaKind::challenge);
        const auto slots = challenge_slots(challenges.size());
        std::size_t next_challenge = 0;
        auto challenges_before = [&](std::size_t i) {
            while (next_challenge < challenges.size() && slots[next_challenge] == i) {
                t_ += 30;
                if (!challenge(*challenges[next_challenge], next_challenge == 0)) return false;
                ++next_challenge;
            }
            return true;
        };
        if (!challenges_before(0)) return;

        // One straight sweep over every field, plus the hidden checkbox for agents that act on it.
        const auto* box = checkbox_trap();
        if (profile_.touches_hidden_checkbox && box != nullptr) {
            straight_move({kCheckboxX, kCheckboxY});
            t_ += 10;
            timeline_.add(t_, EventKind::trap_interaction, TrapPayload{box->trap_id});
        }
        for (std::size_t i = 0; i < config_.items.size(); ++i) straight_move(field_center(i));

        std::vector<std::size_t> open_items;
        for (std::size_t i = 0; i < config_.items.size(); ++i) {
            if (config_.items[i].kind == ItemKind::open_text) open_items.push_back(i);
        }
        std::optional<std::size_t> marker_item;
        if (!open_items.empty() && unit(rng_) < profile_.marker_probability) {
            marker_item = open_items[pick(rng_, open_items.size())];
        }

        const auto interkey = std::llround(profile_.constant_interkey_ms);
        const auto dwell = std::llround(profile_.constant_dwell_ms);
        std::int64_t next_key = t_ + interkey;
        std::size_t topic = 0;
        for (std::size_t i = 0; i < config_.items.size(); ++i) {
            if (i > 0) {
                t_ = next_key - interkey + 30;
                if (!challenges_before(i)) return;
            }
            const auto& item = config_.items[i];
            std::string text;
            InputMode mode = InputMode::typed;
            switch (item.kind) {
                case ItemKind::open_text: {
                    text = detail::open_text_answer(profile_.response_style, topic++, 0.0, rng_);
                    if (marker_item == i) text = detail::marker_opening(rng_) + " " + text;
                    const auto* trap = text_trap_for(item.item_id);
                    if (profile_.follows_hidden_instructions && trap != nullptr) {
                        text += ' ';
                        text += detail::keyword_sentence(trap->keyword, rng_);
                    }
                    break;
                }
                case ItemKind::check: text = check_text(item.item_id); break;
                case ItemKind::choice:
                    text = detail::choice_answer(rng_);
                    mode = InputMode::choice;
                    break;
            }
            std::int64_t last_down = next_key - interkey;
            if (mode == InputMode::typed) {
                for (char32_t c : text::to_u32(text)) {
                    const std::string label = text::to_utf8(std::u32string(1, c));
                    timeline_.add(next_key, EventKind::key_down, KeyPayload{label});
                    timeline_.add(next_key + dwell, EventKind::key_up, KeyPayload{label});
                    last_down = next_key;
                    next_key += interkey;
                }
            }
            t_ = last_down + 25;
            submit(item.item_id, std::move(text), mode);
        }
        score_checkpoints();
    }
};

std::uint64_t mix_seed(std::uint64_t seed) {
    // splitmix64 finalizer so neighbouring seeds give unrelated streams.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

LabeledSession simulate_session(const AgentProfile& profile, const StudyConfig& config,
                                std::uint64_t seed, const Plant& plant) {
    profile.validate();
    LabeledSession out;
    out.ground_truth = profile.kind;
    auto& s = out.session;
    s.session_id = "sim-" + std::string(to_string(profile.kind)) + "-" + std::to_string(seed);
    s.study_id = config.study_id;
    s.created_at = 1750000000000LL + static_cast<std::int64_t>(seed % 1000000000ULL) * 1000;
    s.client_meta = {{"user_agent", is_delegation(profile.kind) ? "Mozilla/5.0 (X11; Linux x86_64) HeadlessChrome/126.0"
                                                                : "Mozilla/5.0 (Windows NT 10.0; Win64; x64) Firefox/127.0"},
                     {"viewport", "1280x800"}};
    SessionBuilder builder(profile, config, mix_seed(seed), plant);
    s.events = builder.run();
    return out;
}

std::vector<LabeledSession> generate_corpus(const std::map<ProfileKind, int>& mix,
                                            const StudyConfig& config, std::uint64_t seed) {
    std::vector<AgentProfile> profiles;
    for (const auto& [kind, count] : mix) {
        if (count < 0) throw ConfigError("negative session count for " + std::string(to_string(kind)));
        for (int i = 0; i < count; ++i) profiles.push_back(AgentProfile::defaults(kind));
    }
    std::vector<LabeledSession> out(profiles.size());
    parallel_for(profiles.size(), [&](std::size_t i) {
        out[i] = simulate_session(profiles[i], config, seed + i);
    });
    return out;
}

std::vector<LabeledSession> generate_incidence_corpus(const IncidencePlan& plan,
                                                      const StudyConfig& config, std::uint64_t seed) {
    const int overlap = plan.keyword_with_low_captcha;
    const int needed = plan.keyword + (plan.low_captcha - overlap) + plan.captcha_failures + plan.paste_attempts;
    if (plan.sessions <= 0 || overlap < 0 || overlap > std::min(plan.keyword, plan.low_captcha) ||
        needed > plan.sessions || plan.keyword < 0 || plan.low_captcha < 0 || plan.captcha_failures < 0 ||
        plan.paste_attempts < 0) {
        throw ConfigError("incidence plan does not fit the session count");
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(plan.sessions));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(seed ^ 0x1ace5eedULL));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[pick(rng, i)]);

    std::vector<Plant> plants(order.size());
    std::size_t next = 0;
    for (int i = 0; i < plan.keyword; ++i) plants[order[next++]].keyword = true;
    std::vector<std::size_t> low;
    for (int i = 0; i < overlap; ++i) low.push_back(order[static_cast<std::size_t>(i)]);
    for (int i = overlap; i < plan.low_captcha; ++i) low.push_back(order[next++]);
    static const double kLowScores[] = {0.3, 0.4, 0.5, 0.6};
    for (std::size_t i = 0; i < low.size(); ++i) {
        plants[low[i]].captcha_score = i == 0 ? plan.lowest_captcha : kLowScores[pick(rng, 4)];
    }
    for (int i = 0; i < plan.captcha_failures; ++i) plants[order[next++]].challenge_failure = true;
    for (int i = 0; i < plan.paste_attempts; ++i) plants[order[next++]].blocked_pastes = 1;

    const auto human = AgentProfile::defaults(ProfileKind::human);
    std::vector<LabeledSession> out(order.size());
    parallel_for(order.size(), [&](std::size_t i) {
        out[i] = simulate_session(human, config, seed + i, plants[i]);
    });
    return out;
}

// ---- metrics ----------------------------------------------------------------

namespace {

std::optional<double> ratio(int num, int den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

void tally(BinaryMetrics& m, bool truth, bool predicted) {
    if (truth && predicted) ++m.tp;
    else if (truth) ++m.fn;
    else if (predicted) ++m.fp;
    else ++m.tn;
}

nlohmann::ordered_json optional_json(std::optional<double> v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json binary_json(const BinaryMetrics& m) {
    return {{"tp", m.tp},
            {"fp", m.fp},
            {"tn", m.tn},
            {"fn", m.fn},
            {"precision", optional_json(m.precision())},
            {"recall", optional_json(m.recall())},
            {"false_positive_rate", optional_json(m.false_positive_rate())}};
}

}  // namespace

std::optional<double> BinaryMetrics::precision() const { return ratio(tp, tp + fp); }
std::optional<double> BinaryMetrics::recall() const { return ratio(tp, tp + fn); }
std::optional<double> BinaryMetrics::false_positive_rate() const { return ratio(fp, fp + tn); }

double LabelStats::positive_rate() const {
    return sessions == 0 ? 0.0 : static_cast<double>(flagged_or_excluded) / sessions;
}

double LabelStats::family_rate(const std::string& family) const {
    auto it = family_hits.find(family);
    if (sessions == 0 || it == family_hits.end()) return 0.0;
    return static_cast<double>(it->second) / sessions;
}

MetricsReport evaluate_detectors(std::span<const LabeledSession> corpus, const StudyConfig& config,
                                 const pipeline::PipelineOptions& options) {
    if (corpus.empty()) throw ConfigError("cannot evaluate an empty corpus");
    std::vector<SessionRecord> sessions;
    sessions.reserve(corpus.size());
    for (const auto& l : corpus) sessions.push_back(l.session);

    const auto dups = pipeline::study_duplicates(sessions, config);
    std::vector<PollutionAssessment> assessments(sessions.size());
    parallel_for(sessions.size(), [&](std::size_t i) {
        assessments[i] = pipeline::assess_session(sessions[i], config, &dups, options);
    });

    MetricsReport r;
    for (const auto& f : detector_families()) r.families[f];
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const bool truth = is_polluted(corpus[i].ground_truth);
        const auto& a = assessments[i];
        std::set<std::string> fired;
        for (const auto& s : a.signals) fired.insert(family_of(s.detector_id));
        for (auto& [family, m] : r.families) tally(m, truth, fired.count(family) != 0);
        const bool positive = a.decision != Decision::pass;
        tally(r.combined, truth, positive);
        auto& stats = r.by_label[corpus[i].ground_truth];
        ++stats.sessions;
        if (positive) ++stats.flagged_or_excluded;
        if (a.decision == Decision::exclude) ++stats.excluded;
        for (const auto& f : fired) ++stats.family_hits[f];
    }
    return r;
}

nlohmann::ordered_json metrics_to_json(const MetricsReport& m) {
    nlohmann::ordered_json j;
    j["combined"] = binary_json(m.combined);
    nlohmann::ordered_json families = nlohmann::ordered_json::object();
    for (const auto& [f, b] : m.families) families[f] = binary_json(b);
    j["families"] = std::move(families);
    nlohmann::ordered_json labels = nlohmann::ordered_json::object();
    for (const auto& [kind, s] : m.by_label) {
        nlohmann::ordered_json hits = nlohmann::ordered_json::object();
        for (const auto& [f, n] : s.family_hits) hits[f] = n;
        labels[std::string(to_string(kind))] = {{"sessions", s.sessions},
                                                {"flagged_or_excluded", s.flagged_or_excluded},
                                                {"excluded", s.excluded},
                                                {"positive_rate", s.positive_rate()},
                                                {"family_hits", std::move(hits)}};
    }
    j["by_label"] = std::move(labels);
    return j;
}

nlohmann::ordered_json labels_to_json(std::span<const LabeledSession> corpus) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& l : corpus) j[l.session.session_id] = std::string(to_string(l.ground_truth));
    return j;
}

}  // namespace sentinel::sim
