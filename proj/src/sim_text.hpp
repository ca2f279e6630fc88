#pragma once

// Bundled response templates for the simulator. Internal to the library.

#include <random>
#include <string>

#include "sentinel/simulator.hpp"

namespace sentinel::sim::detail {

/// Open-text answer for the `topic`-th open-text item.
std::string open_text_answer(ResponseStyle style, std::size_t topic, double filler_rate,
                             std::mt19937_64& rng);

/// Answer to a comprehension item; `kind` selects the register.
enum class CheckAnswer { human, prototypical, indeterminate };
std::string check_answer(const std::string& item_id, CheckAnswer kind, std::mt19937_64& rng);

std::string choice_answer(std::mt19937_64& rng);

/// Sentence that complies with the hidden trap instruction.
std::string keyword_sentence(const std::string& keyword, std::mt19937_64& rng);

/// Opening that betrays machine authorship.
std::string marker_opening(std::mt19937_64& rng);

/// Uniform index in [0, n) from raw engine output (portable across libstdc++
/// and libc++, unlike std::uniform_int_distribution).
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

/// Uniform real in [0, 1) from the top 53 bits.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace sentinel::sim::detail
