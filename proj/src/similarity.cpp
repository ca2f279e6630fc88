#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "sentinel/screening.hpp"
#include "sentinel/unicode.hpp"

namespace sentinel::screening {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::optional<std::size_t> bounded_levenshtein(std::u32string_view a, std::u32string_view b,
                                               std::size_t k) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if ((n > m ? n - m : m - n) > k) return std::nullopt;
    if (n == 0 || m == 0) return std::max(n, m);

    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
    std::vector<std::size_t> prev(m + 1, kInf);
    std::vector<std::size_t> cur(m + 1, kInf);
    for (std::size_t j = 0; j <= std::min(m, k); ++j) prev[j] = j;

    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t lo = i > k ? i - k : 0;
        const std::size_t hi = std::min(m, i + k);
        std::fill(cur.begin(), cur.end(), kInf);
        std::size_t row_min = kInf;
        if (lo == 0) {
            cur[0] = i;
            row_min = i;
        }
        for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
            row_min = std::min(row_min, cur[j]);
        }
        if (row_min > k) return std::nullopt;
        std::swap(prev, cur);
    }
    if (prev[m] > k) return std::nullopt;
    return prev[m];
}

namespace {

std::u32string prepared(std::string_view s, std::size_t max_chars) {
    auto u = text::to_u32(s);
    if (u.size() > max_chars) u.resize(max_chars);
    return u;
}

double similarity_from_distance(std::size_t d, std::size_t longest) {
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

}  // namespace

double pairwise_similarity(std::string_view a, std::string_view b, std::size_t max_chars) {
    const auto ua = prepared(a, max_chars);
    const auto ub = prepared(b, max_chars);
    return similarity_from_distance(levenshtein(ua, ub), std::max(ua.size(), ub.size()));
}

namespace {

struct Prepared {
    std::size_t index;  // into responses
    std::u32string text;
    std::vector<std::uint64_t> bigrams;  // sorted
};

std::vector<std::uint64_t> bigrams_of(const std::u32string& s) {
    std::vector<std::uint64_t> out;
    if (s.size() < 2) return out;
    out.reserve(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        out.push_back((static_cast<std::uint64_t>(s[i]) << 32) | s[i + 1]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t common_count(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::size_t i = 0, j = 0, n = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

/// Exact test of similarity >= tau. Length and bigram filters only discard
/// pairs whose distance provably exceeds the admissible bound.
std::optional<double> linked_similarity(const Prepared& a, const Prepared& b, double tau) {
    const std::size_t longest = std::max(a.text.size(), b.text.size());
    if (longest == 0) return 1.0;
    const auto k = static_cast<std::size_t>((1.0 - tau) * static_cast<double>(longest)) + 1;
    const std::size_t shortest = std::min(a.text.size(), b.text.size());
    if (longest - shortest > k) return std::nullopt;
    // Each edit destroys at most two bigrams.
    if (shortest >= 2 && longest - 1 > 2 * k) {
        if (common_count(a.bigrams, b.bigrams) + 2 * k < longest - 1) return std::nullopt;
    }
    const auto d = bounded_levenshtein(a.text, b.text, k);
    if (!d) return std::nullopt;
    const double sim = similarity_from_distance(*d, longest);
    if (sim >= tau) return sim;
    return std::nullopt;
}

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

DuplicateResult duplicate_clusters(std::span<const ResponseEntry> responses, double tau,
                                   std::size_t max_chars) {
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0,1]");
    DuplicateResult result;

    std::map<std::string, std::vector<Prepared>> by_item;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        auto t = prepared(text::normalize_text(responses[i].text), max_chars);
        auto bg = bigrams_of(t);
        by_item[responses[i].item_id].push_back({i, std::move(t), std::move(bg)});
    }

    for (auto& [item_id, entries] : by_item) {
        // Canonical order independent of input order.
        std::sort(entries.begin(), entries.end(), [&](const Prepared& x, const Prepared& y) {
            const auto& rx = responses[x.index];
            const auto& ry = responses[y.index];
            return std::tie(rx.session_id, x.text, x.index) < std::tie(ry.session_id, y.text, y.index);
        });
        DisjointSet dsu(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (std::size_t j = i + 1; j < entries.size(); ++j) {
                const auto sim = linked_similarity(entries[i], entries[j], tau);
                if (!sim) continue;
                dsu.unite(i, j);
                const auto& sa = responses[entries[i].index].session_id;
                const auto& sb = responses[entries[j].index].session_id;
                if (sa != sb) {
                    result.pairs.push_back(
                        {std::min(sa, sb), std::max(sa, sb), item_id, *sim});
                }
            }
        }
        std::map<std::size_t, std::vector<std::string>> groups;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            groups[dsu.find(i)].push_back(responses[entries[i].index].session_id);
        }
        for (auto& [root, members] : groups) {
            std::sort(members.begin(), members.end());
            std::vector<std::string> distinct = members;
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            if (members.size() < 2 || distinct.size() < 2) continue;
            const double severity = std::min(1.0, 0.5 + 0.1 * static_cast<double>(members.size() - 2));
            for (const auto& sid : distinct) {
                result.signals.push_back({"text.duplicate",
                                          sid,
                                          Unit::clamped(severity),
                                          VariantHint::unknown,
                                          {{"item_id", item_id},
                                           {"cluster_size", std::to_string(members.size())},
                                           {"cluster_sessions", std::to_string(distinct.size())}}});
            }
            result.clusters.push_back({item_id, std::move(members), distinct.size()});
        }
    }
    std::sort(result.clusters.begin(), result.clusters.end(),
              [](const DuplicateCluster& a, const DuplicateCluster& b) {
                  return std::tie(a.item_id, a.members) < std::tie(b.item_id, b.members);
              });
    std::sort(result.signals.begin(), result.signals.end(),
              [](const DetectionSignal& a, const DetectionSignal& b) {
                  return std::tie(a.session_id, a.evidence) < std::tie(b.session_id, b.evidence);
              });
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const SimilarityPair& a, const SimilarityPair& b) {
                  return std::tie(a.item_id, a.session_a, a.session_b, a.similarity) <
                         std::tie(b.item_id, b.session_a, b.session_b, b.similarity);
              });
    return result;
}

}  // namespace sentinel::screening
