#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mixtopo {

// Line-oriented `key = value` text used by model files and experiment
// configs. `#` starts a comment; values may be double-quoted; keys may
// repeat (e.g. one `term` row per line).
struct KeyValue {
    std::string key;
    std::string value;  // quotes stripped
    int line = 0;
};

class KeyValueDoc {
public:
    static KeyValueDoc parse(std::string_view text);
    static KeyValueDoc load(const std::string& path);

    const std::vector<KeyValue>& entries() const noexcept { return entries_; }
    std::vector<const KeyValue*> all(std::string_view key) const;
    // Last occurrence wins.
    const KeyValue* find(std::string_view key) const;

private:
    std::vector<KeyValue> entries_;
};

// Strict numeric parsing; ParseError (citing `line`) on failure.
double parse_double(std::string_view s, int line, std::string_view field);
long parse_long(std::string_view s, int line, std::string_view field);
// Splits on commas, trimming whitespace and quotes.
std::vector<std::string> split_list(std::string_view s);

std::string trim(std::string_view s);

}  // namespace mixtopo
