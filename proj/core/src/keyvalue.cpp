#include "mixtopo/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mixtopo/error.hpp"

namespace mixtopo {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

namespace {

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    return true;
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
    KeyValueDoc doc;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        // Strip comments outside quotes.
        bool quoted = false;
        std::size_t cut = raw.size();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') quoted = !quoted;
            if (raw[i] == '#' && !quoted) {
                cut = i;
                break;
            }
        }
        if (quoted) throw ParseError("unterminated string", line);
        const std::string body = trim(std::string_view(raw).substr(0, cut));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError("expected `key = value`", line);
        KeyValue kv;
        kv.key = trim(std::string_view(body).substr(0, eq));
        kv.value = unquote(trim(std::string_view(body).substr(eq + 1)));
        kv.line = line;
        if (!valid_key(kv.key)) throw ParseError("invalid key '" + kv.key + "'", line);
        doc.entries_.push_back(std::move(kv));
    }
    return doc;
}

KeyValueDoc KeyValueDoc::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "'", 0);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::vector<const KeyValue*> KeyValueDoc::all(std::string_view key) const {
    std::vector<const KeyValue*> out;
    for (const auto& e : entries_)
        if (e.key == key) out.push_back(&e);
    return out;
}

const KeyValue* KeyValueDoc::find(std::string_view key) const {
    const KeyValue* hit = nullptr;
    for (const auto& e : entries_)
        if (e.key == key) hit = &e;
    return hit;
}

double parse_double(std::string_view s, int line, std::string_view field) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto r = std::from_chars(t.data(), end, v);
    if (t.empty() || r.ec != std::errc{} || r.ptr != end || !std::isfinite(v))
        throw ParseError(std::string(field) + ": expected a number, got '" + t + "'", line);
    return v;
}

long parse_long(std::string_view s, int line, std::string_view field) {
    const std::string t = trim(s);
    long v = 0;
    const auto* end = t.data() + t.size();
    const auto r = std::from_chars(t.data(), end, v);
    if (t.empty() || r.ec != std::errc{} || r.ptr != end)
        throw ParseError(std::string(field) + ": expected an integer, got '" + t + "'", line);
    return v;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(unquote(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start))));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace mixtopo
