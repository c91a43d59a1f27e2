#pragma once

#include <string>
#include <string_view>

namespace mailbot {

// Text ready for keyword matching: lowercased, markup-stripped, whitespace
// collapsed to single spaces, trimmed.
struct NormalizedText {
  std::string text;

  bool contains(std::string_view needle) const {
    return text.find(needle) != std::string::npos;
  }
};

// Removes <...> tags and resolves the five basic character entities, case
// insensitively. &amp; and &lt; turn into word separators so the output can
// never contain a fresh tag or entity. Not a full HTML parser.
std::string strip_html(std::string_view html);

NormalizedText normalize_text(std::string_view s);

// Lowercases ASCII letters only; non-ASCII bytes pass through untouched.
std::string ascii_lower(std::string_view s);

}  // namespace mailbot
