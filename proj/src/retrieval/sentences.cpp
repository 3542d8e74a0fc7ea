#include "presuppose/retrieval/retrieval.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace presuppose::retrieval {

namespace {

const std::set<std::string, std::less<>>& abbreviations()
{
    static const std::set<std::string, std::less<>> kList = {
        "Mr.",   "Mrs.",  "Ms.",   "Dr.",   "Prof.", "Sr.",   "Jr.",   "St.",   "Mt.",   "Ft.",
        "Gen.",  "Col.",  "Lt.",   "Capt.", "Sgt.",  "Adm.",  "Gov.",  "Sen.",  "Rep.",  "Rev.",
        "Hon.",  "Pres.", "Inc.",  "Ltd.",  "Co.",   "Corp.", "Bros.", "No.",   "Nos.",  "Vol.",
        "Fig.",  "pp.",   "p.",    "ed.",   "eds.",  "vs.",   "etc.",  "e.g.",  "i.e.",  "cf.",
        "ca.",   "c.",    "approx.", "al.", "Jan.",  "Feb.",  "Mar.",  "Apr.",  "Jun.",  "Jul.",
        "Aug.",  "Sep.",  "Sept.", "Oct.",  "Nov.",  "Dec.",  "U.S.",  "U.K.",  "U.N.",  "U.S.A.",
        "E.U.",  "D.C.",  "a.m.",  "p.m.",  "A.D.",  "B.C.",  "Ph.D.", "M.D.",  "B.A.",  "M.A.",
        "Ave.",  "Blvd.", "Rd.",   "Dept.", "Univ.", "est.",  "Messrs.", "Mme.", "Mlle."};
    return kList;
}

bool is_upper_cp(char32_t cp)
{
    if (cp < 0x80)
        return std::isupper(static_cast<int>(cp)) != 0;
    return (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) || (cp >= 0x391 && cp <= 0x3A9) ||
           (cp >= 0x400 && cp <= 0x42F);
}

bool is_digit_cp(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_space_cp(char32_t cp)
{
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0xA0;
}

bool is_closer(char32_t cp)
{
    return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == 0x201D || cp == 0x2019;
}

bool is_opener(char32_t cp)
{
    return cp == '"' || cp == '\'' || cp == '(' || cp == '[' || cp == 0x201C || cp == 0x2018;
}

std::string encode(const std::vector<char32_t>& cps, std::size_t from, std::size_t to)
{
    std::string out;
    for (auto i = from; i < to; ++i)
        utf8_append(out, cps[i]);
    return out;
}

// The word ending at `end` (inclusive), without leading openers.
std::string word_before(const std::vector<char32_t>& cps, std::size_t block_start, std::size_t end)
{
    auto start = end;
    while (start > block_start && !is_space_cp(cps[start - 1]))
        --start;
    while (start < end && is_opener(cps[start]))
        ++start;
    return encode(cps, start, end + 1);
}

bool suppresses_break(const std::string& word)
{
    if (abbreviations().count(word) > 0)
        return true;
    // A single capital initial such as "J."
    return word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]));
}

void split_block(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end,
                 std::vector<std::string>& out)
{
    auto emit = [&](std::size_t from, std::size_t to) {
        const auto s = encode(cps, from, to);
        const auto t = trim(s);
        if (!t.empty())
            out.emplace_back(collapse_whitespace(t));
    };

    auto sentence_start = begin;
    for (auto i = begin; i < end; ++i) {
        const auto c = cps[i];
        if (c != '.' && c != '!' && c != '?')
            continue;
        auto j = i + 1;
        while (j < end && (is_closer(cps[j]) || cps[j] == '.' || cps[j] == '!' || cps[j] == '?'))
            ++j;
        if (j >= end || !is_space_cp(cps[j]))
            continue;
        auto m = j;
        while (m < end && is_space_cp(cps[m]))
            ++m;
        if (m >= end)
            continue;
        auto next = m;
        if (is_opener(cps[next]) && next + 1 < end)
            ++next;
        if (!is_upper_cp(cps[next]) && !is_digit_cp(cps[next]))
            continue;
        if (c == '.' && suppresses_break(word_before(cps, begin, i)))
            continue;
        emit(sentence_start, j);
        sentence_start = m;
        i = m - 1;
    }
    emit(sentence_start, end);
}

bool is_letter_cp(char32_t cp)
{
    if (cp < 0x80)
        return std::isalnum(static_cast<int>(cp)) != 0;
    if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7)
        return false;
    if ((cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) ||
        (cp >= 0xFE10 && cp <= 0xFE6F) || (cp >= 0xFF00 && cp <= 0xFF0F) ||
        (cp >= 0xE000 && cp <= 0xF8FF) || (cp >= 0x1F000 && cp <= 0x1FAFF) || cp == 0xFFFD)
        return false;
    return true;
}

char32_t to_lower_cp(char32_t cp)
{
    if (cp < 0x80)
        return static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
        return cp + 0x20;
    if (((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) && cp % 2 == 0)
        return cp + 1;
    if (cp >= 0x139 && cp <= 0x148 && cp % 2 == 1)
        return cp + 1;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2)
        return cp + 0x20;
    if (cp >= 0x410 && cp <= 0x42F)
        return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F)
        return cp + 0x50;
    return cp;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text)
{
    const auto cps = utf8_decode(text);
    std::vector<std::string> out;
    std::size_t block_start = 0;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (cps[i] != '\n') {
            ++i;
            continue;
        }
        // A line holding only whitespace ends the block.
        auto j = i + 1;
        while (j < cps.size() && cps[j] != '\n' && is_space_cp(cps[j]))
            ++j;
        if (j < cps.size() && cps[j] == '\n') {
            split_block(cps, block_start, i, out);
            block_start = j + 1;
            i = j + 1;
        } else {
            ++i;
        }
    }
    split_block(cps, block_start, cps.size(), out);
    return out;
}

std::vector<std::string> tokenize(std::string_view text)
{
    const auto cps = utf8_decode(text);
    std::vector<std::string> tokens;
    std::string current;
    auto is_apostrophe = [](char32_t cp) { return cp == '\'' || cp == 0x2019; };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const auto cp = cps[i];
        if (is_letter_cp(cp)) {
            utf8_append(current, to_lower_cp(cp));
            continue;
        }
        const bool has_prev = i > 0 && is_letter_cp(cps[i - 1]) && !current.empty();
        const bool has_next = i + 1 < cps.size() && is_letter_cp(cps[i + 1]);
        if (has_prev && has_next) {
            const bool digits = is_digit_cp(cps[i - 1]) && is_digit_cp(cps[i + 1]);
            if (is_apostrophe(cp) && !is_digit_cp(cps[i - 1]) && !is_digit_cp(cps[i + 1])) {
                current.push_back('\'');
                continue;
            }
            if ((cp == '.' || cp == ',') && digits) {
                current.push_back(static_cast<char>(cp));
                continue;
            }
        }
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace presuppose::retrieval
