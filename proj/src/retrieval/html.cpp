#include "presuppose/retrieval/retrieval.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <optional>

namespace presuppose::retrieval {

namespace {

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::string cls;
    std::string id;
    std::string role;
};

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_void(std::string_view name)
{
    static constexpr std::array<std::string_view, 14> kVoid = {
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "link", "meta", "param", "source", "track", "wbr"};
    return std::find(kVoid.begin(), kVoid.end(), name) != kVoid.end();
}

bool is_raw_text(std::string_view name)
{
    return name == "script" || name == "style" || name == "noscript" || name == "textarea" ||
           name == "template" || name == "title";
}

bool is_block(std::string_view name)
{
    static constexpr std::array<std::string_view, 26> kBlock = {
        "div", "section", "article", "main", "body", "html", "ul", "ol", "li", "dl",
        "dd", "dt", "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "pre",
        "center", "hr", "figure", "table", "header", "footer"};
    return std::find(kBlock.begin(), kBlock.end(), name) != kBlock.end();
}

bool has_class_token(std::string_view classes, std::string_view token)
{
    std::size_t i = 0;
    while (i < classes.size()) {
        while (i < classes.size() && std::isspace(static_cast<unsigned char>(classes[i])))
            ++i;
        auto j = i;
        while (j < classes.size() && !std::isspace(static_cast<unsigned char>(classes[j])))
            ++j;
        if (classes.substr(i, j - i) == token)
            return true;
        i = j;
    }
    return false;
}

// Elements whose whole subtree is dropped.
bool is_removed(const Tag& tag)
{
    static constexpr std::array<std::string_view, 20> kNames = {
        "script", "style", "noscript", "table", "nav", "header", "footer", "aside",
        "figure", "figcaption", "math", "head", "form", "button", "svg", "template",
        "textarea", "select", "iframe", "object"};
    if (std::find(kNames.begin(), kNames.end(), tag.name) != kNames.end())
        return true;
    static constexpr std::array<std::string_view, 26> kClasses = {
        "reference", "reflist", "references", "mw-references-wrap", "mw-editsection",
        "navbox", "vertical-navbox", "toc", "thumb", "infobox", "hatnote", "metadata",
        "noprint", "sidebar", "ambox", "catlinks", "printfooter", "mw-jump-link",
        "shortdescription", "mw-cite-backlink", "navigation-not-searchable", "mw-empty-elt",
        "gallery", "sistersitebox", "side-box", "mw-indicators"};
    for (auto cls : kClasses) {
        if (has_class_token(tag.cls, cls))
            return true;
    }
    static constexpr std::array<std::string_view, 10> kIds = {
        "toc", "catlinks", "mw-navigation", "footer", "siteSub", "contentSub",
        "jump-to-nav", "mw-head", "mw-panel", "References"};
    if (std::find(kIds.begin(), kIds.end(), tag.id) != kIds.end())
        return true;
    return tag.role == "navigation" || tag.role == "note";
}

class Scanner {
public:
    explicit Scanner(std::string_view html) : html_(html) {}

    bool done() const { return pos_ >= html_.size(); }

    // Advances over one item; exactly one of the out-params is filled.
    void next(std::optional<Tag>& tag, std::string& text)
    {
        tag.reset();
        text.clear();
        if (html_[pos_] != '<') {
            const auto end = html_.find('<', pos_);
            const auto stop = end == std::string_view::npos ? html_.size() : end;
            text.assign(html_.substr(pos_, stop - pos_));
            pos_ = stop;
            return;
        }
        if (html_.compare(pos_, 4, "<!--") == 0) {
            const auto end = html_.find("-->", pos_ + 4);
            pos_ = end == std::string_view::npos ? html_.size() : end + 3;
            return;
        }
        if (pos_ + 1 < html_.size() && (html_[pos_ + 1] == '!' || html_[pos_ + 1] == '?')) {
            const auto end = html_.find('>', pos_);
            pos_ = end == std::string_view::npos ? html_.size() : end + 1;
            return;
        }
        auto i = pos_ + 1;
        Tag t;
        if (i < html_.size() && html_[i] == '/') {
            t.closing = true;
            ++i;
        }
        if (i >= html_.size() || !std::isalpha(static_cast<unsigned char>(html_[i]))) {
            text = "<";
            ++pos_;
            return;
        }
        auto name_end = i;
        while (name_end < html_.size() &&
               (std::isalnum(static_cast<unsigned char>(html_[name_end])) || html_[name_end] == '-'))
            ++name_end;
        t.name = lower(html_.substr(i, name_end - i));
        i = name_end;
        parse_attributes(i, t);
        pos_ = i;
        if (!t.closing && !t.self_closing && is_raw_text(t.name))
            skip_raw_text(t.name);
        tag = std::move(t);
    }

private:
    void parse_attributes(std::size_t& i, Tag& t)
    {
        while (i < html_.size() && html_[i] != '>') {
            if (html_[i] == '/' && i + 1 < html_.size() && html_[i + 1] == '>') {
                t.self_closing = true;
                ++i;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(html_[i])) || html_[i] == '/') {
                ++i;
                continue;
            }
            auto name_end = i;
            while (name_end < html_.size() && html_[name_end] != '=' && html_[name_end] != '>' &&
                   !std::isspace(static_cast<unsigned char>(html_[name_end])))
                ++name_end;
            const auto attr = lower(html_.substr(i, name_end - i));
            i = name_end;
            while (i < html_.size() && std::isspace(static_cast<unsigned char>(html_[i])))
                ++i;
            std::string value;
            if (i < html_.size() && html_[i] == '=') {
                ++i;
                while (i < html_.size() && std::isspace(static_cast<unsigned char>(html_[i])))
                    ++i;
                if (i < html_.size() && (html_[i] == '"' || html_[i] == '\'')) {
                    const char quote = html_[i];
                    const auto end = html_.find(quote, i + 1);
                    const auto stop = end == std::string_view::npos ? html_.size() : end;
                    value.assign(html_.substr(i + 1, stop - i - 1));
                    i = stop == html_.size() ? stop : stop + 1;
                } else {
                    auto end = i;
                    while (end < html_.size() && html_[end] != '>' &&
                           !std::isspace(static_cast<unsigned char>(html_[end])))
                        ++end;
                    value.assign(html_.substr(i, end - i));
                    i = end;
                }
            }
            if (attr == "class")
                t.cls = value;
            else if (attr == "id")
                t.id = value;
            else if (attr == "role")
                t.role = value;
        }
        if (i < html_.size())
            ++i;  // '>'
    }

    void skip_raw_text(const std::string& name)
    {
        const auto closing = "</" + name;
        while (pos_ < html_.size()) {
            const auto lt = html_.find("</", pos_);
            if (lt == std::string_view::npos) {
                pos_ = html_.size();
                return;
            }
            if (lower(html_.substr(lt, closing.size())) == closing) {
                // Leave the end tag for the caller so skip bookkeeping stays
                // symmetric.
                pos_ = lt;
                return;
            }
            pos_ = lt + 2;
        }
    }

    std::string_view html_;
    std::size_t pos_ = 0;
};

std::string normalize_paragraph(const std::string& raw)
{
    auto text = decode_entities(raw);
    text = collapse_whitespace(text);
    static const std::regex citation(
        R"(\s*\[(?:\d+|[a-z]|note \d+|nb \d+|citation needed|clarification needed|when\?|who\?|which\?|dubious[^\]]*|edit|page needed|better source needed|failed verification)\])",
        std::regex::icase);
    text = std::regex_replace(text, citation, "");
    return std::string(trim(text));
}

}  // namespace

std::string extract_main_content(std::string_view html)
{
    Scanner scanner(html);
    std::vector<std::pair<std::string, int>> skipping;  // element name, nesting depth
    std::vector<std::string> paragraphs;
    std::string current;
    bool in_paragraph = false;

    auto flush = [&] {
        if (in_paragraph) {
            auto p = normalize_paragraph(current);
            if (!p.empty())
                paragraphs.push_back(std::move(p));
        }
        current.clear();
        in_paragraph = false;
    };

    std::optional<Tag> tag;
    std::string text;
    while (!scanner.done()) {
        scanner.next(tag, text);
        if (!skipping.empty()) {
            if (!tag || is_void(tag->name) || tag->self_closing)
                continue;
            auto& [name, depth] = skipping.back();
            if (tag->name == name)
                depth += tag->closing ? -1 : 1;
            if (depth == 0)
                skipping.pop_back();
            continue;
        }
        if (!tag) {
            if (in_paragraph)
                current += text;
            continue;
        }
        if (!tag->closing && is_removed(*tag)) {
            if (!is_void(tag->name) && !tag->self_closing)
                skipping.emplace_back(tag->name, 1);
            continue;
        }
        if (tag->name == "p") {
            flush();
            in_paragraph = !tag->closing;
        } else if (tag->name == "br") {
            current += ' ';
        } else if (is_block(tag->name)) {
            flush();
        }
    }
    flush();

    std::string out;
    for (const auto& p : paragraphs) {
        if (!out.empty())
            out += "\n\n";
        out += p;
    }
    return out;
}

}  // namespace presuppose::retrieval
