#include <cctype>
#include <string>

#include "pstrat/descriptives.hpp"
#include "pstrat/errors.hpp"

namespace pstrat {

namespace {

bool is_space(char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; }
bool is_alnum(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0; }
bool is_terminator(char ch) { return ch == '.' || ch == '!' || ch == '?'; }
bool is_vowel(char ch) {
    switch (ch) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
        default: return false;
    }
}

template <typename F>
void for_each_token(std::string_view text, F&& f) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) f(text.substr(start, i - start));
    }
}

bool is_word(std::string_view token) {
    for (char ch : token) {
        if (is_alnum(ch)) return true;
    }
    return false;
}

}  // namespace

std::size_t syllable_count(std::string_view word) {
    std::string letters;
    for (char ch : word) {
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            letters.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    std::size_t runs = 0;
    bool in_run = false;
    for (char ch : letters) {
        const bool v = is_vowel(ch);
        if (v && !in_run) ++runs;
        in_run = v;
    }
    if (!letters.empty() && letters.back() == 'e' && runs > 1) --runs;
    return runs == 0 ? 1 : runs;
}

TextCounts count_text(std::string_view text) {
    TextCounts counts;
    bool open_sentence = false;
    for_each_token(text, [&](std::string_view token) {
        if (is_word(token)) {
            ++counts.words;
            counts.syllables += syllable_count(token);
            open_sentence = true;
        }
        // Tokens end at whitespace or end of text, so a terminator in last
        // position satisfies the "followed by whitespace/EOF" rule.
        if (is_terminator(token.back()) && open_sentence) {
            ++counts.sentences;
            open_sentence = false;
        }
    });
    if (open_sentence) ++counts.sentences;
    return counts;
}

std::size_t word_count(std::string_view text) {
    std::size_t n = 0;
    for_each_token(text, [&](std::string_view token) {
        if (is_word(token)) ++n;
    });
    return n;
}

double flesch_kincaid(std::string_view text) {
    const auto c = count_text(text);
    if (c.words == 0 || c.sentences == 0) throw ValidationError("flesch_kincaid: text has no words");
    const double words = static_cast<double>(c.words);
    return 0.39 * (words / static_cast<double>(c.sentences)) +
           11.8 * (static_cast<double>(c.syllables) / words) - 15.59;
}

}  // namespace pstrat
