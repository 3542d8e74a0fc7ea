#include "text_util.hpp"

#include <cctype>
#include <map>

namespace presuppose::retrieval {

std::vector<char32_t> utf8_decode(std::string_view text)
{
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        int extra = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            extra = 1;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            extra = 2;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            extra = 3;
            cp = b0 & 0x07;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + extra >= text.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            const auto b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

void utf8_append(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        utf8_append(out, 0xFFFD);
    }
}

std::string decode_entities(std::string_view text)
{
    static const std::map<std::string, char32_t, std::less<>> kNamed = {
        {"amp", '&'},        {"lt", '<'},         {"gt", '>'},         {"quot", '"'},
        {"apos", '\''},      {"nbsp", 0xA0},      {"ndash", 0x2013},   {"mdash", 0x2014},
        {"lsquo", 0x2018},   {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},
        {"hellip", 0x2026},  {"minus", 0x2212},   {"times", 0xD7},     {"deg", 0xB0},
        {"copy", 0xA9},      {"reg", 0xAE},       {"middot", 0xB7},    {"thinsp", 0x2009},
        {"ensp", 0x2002},    {"emsp", 0x2003},    {"shy", 0xAD},       {"eacute", 0xE9},
        {"egrave", 0xE8},    {"aacute", 0xE1},    {"iacute", 0xED},    {"oacute", 0xF3},
        {"uacute", 0xFA},    {"ntilde", 0xF1},    {"uuml", 0xFC},      {"ouml", 0xF6},
        {"auml", 0xE4},      {"ccedil", 0xE7},    {"pound", 0xA3},     {"euro", 0x20AC},
        {"sup2", 0xB2},      {"sup3", 0xB3},      {"frac12", 0xBD},    {"plusmn", 0xB1},
        {"zwj", 0x200D},     {"zwnj", 0x200C},    {"lrm", 0x200E},     {"rlm", 0x200F}};
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        const auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(text[i++]);
            continue;
        }
        const auto ref = text.substr(i + 1, semi - i - 1);
        char32_t cp = 0;
        bool ok = false;
        if (ref.size() >= 2 && ref[0] == '#') {
            const bool hex = ref[1] == 'x' || ref[1] == 'X';
            const auto digits = ref.substr(hex ? 2 : 1);
            ok = !digits.empty();
            for (char c : digits) {
                const auto uc = static_cast<unsigned char>(c);
                if (hex ? !std::isxdigit(uc) : !std::isdigit(uc)) {
                    ok = false;
                    break;
                }
                const int v = std::isdigit(uc) ? c - '0' : std::tolower(uc) - 'a' + 10;
                cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
                if (cp > 0x10FFFF) {
                    ok = false;
                    break;
                }
            }
            if (ok && (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)))
                cp = 0xFFFD;
        } else if (const auto it = kNamed.find(ref); it != kNamed.end()) {
            cp = it->second;
            ok = true;
        }
        if (!ok) {
            out.push_back(text[i++]);
            continue;
        }
        // Soft hyphens and directional marks carry no text.
        if (cp != 0xAD && cp != 0x200E && cp != 0x200F && cp != 0x200C && cp != 0x200D)
            utf8_append(out, cp);
        i = semi + 1;
    }
    return out;
}

std::string collapse_whitespace(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool pending = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        const bool nbsp = c == 0xC2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xA0;
        if (std::isspace(c) || nbsp) {
            pending = true;
            if (nbsp)
                ++i;
            continue;
        }
        if (pending && !out.empty())
            out.push_back(' ');
        pending = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

}  // namespace presuppose::retrieval
