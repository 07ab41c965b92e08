#include "gtrx/fuzzy.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gtrx/text.hpp"

namespace gtrx::linking {

namespace {

/// Per-character occurrence bitmasks of the pattern, 64 positions per word.
class PatternMasks {
public:
    explicit PatternMasks(std::u32string_view pattern) : words_((pattern.size() + 63) / 64) {
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            auto& mask = slot(pattern[i]);
            mask[i / 64] |= std::uint64_t{1} << (i % 64);
        }
    }

    const std::vector<std::uint64_t>* get(char32_t c) const {
        if (c < 128) return ascii_[c].empty() ? nullptr : &ascii_[c];
        const auto it = other_.find(c);
        return it == other_.end() ? nullptr : &it->second;
    }

    std::size_t words() const { return words_; }

private:
    std::vector<std::uint64_t>& slot(char32_t c) {
        auto& v = c < 128 ? ascii_[c] : other_[c];
        if (v.empty()) v.assign(words_, 0);
        return v;
    }

    std::size_t words_;
    std::array<std::vector<std::uint64_t>, 128> ascii_;
    std::unordered_map<char32_t, std::vector<std::uint64_t>> other_;
};

}  // namespace

std::string normalize_for_matching(std::string_view s) {
    return text::to_lower_ascii(text::normalize_space(s));
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    if (a.empty()) return 0;

    const PatternMasks masks(a);
    const std::size_t words = masks.words();
    std::vector<std::uint64_t> s(words, ~std::uint64_t{0});

    // S' = (S + (S & M)) | (S & ~M), with the addition carried across words
    for (char32_t c : b) {
        const auto* m = masks.get(c);
        if (!m) continue;
        std::uint64_t carry = 0;
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t u = s[w] & (*m)[w];
            const std::uint64_t sum1 = s[w] + u;
            const std::uint64_t c1 = sum1 < s[w] ? 1 : 0;
            const std::uint64_t sum = sum1 + carry;
            const std::uint64_t c2 = sum < sum1 ? 1 : 0;
            carry = c1 | c2;
            s[w] = sum | (s[w] & ~(*m)[w]);
        }
    }

    std::size_t lcs = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t zeros = ~s[w];
        const std::size_t bits_here = (w + 1 == words && a.size() % 64) ? a.size() % 64 : 64;
        if (bits_here < 64) zeros &= (std::uint64_t{1} << bits_here) - 1;
        lcs += static_cast<std::size_t>(__builtin_popcountll(zeros));
    }
    return lcs;
}

std::size_t indel_distance(std::u32string_view a, std::u32string_view b) {
    return a.size() + b.size() - 2 * lcs_length(a, b);
}

double fuzzy_ratio(std::string_view a, std::string_view b) {
    const std::u32string x = text::decode_utf8(normalize_for_matching(a));
    const std::u32string y = text::decode_utf8(normalize_for_matching(b));
    const std::size_t total = x.size() + y.size();
    if (total == 0) return 1.0;
    return 1.0 - static_cast<double>(indel_distance(x, y)) / static_cast<double>(total);
}

}  // namespace gtrx::linking
