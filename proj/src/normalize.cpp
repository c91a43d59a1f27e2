#include "mailbot/normalize.hpp"

namespace mailbot {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string strip_html(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  bool in_tag = false;
  for (std::size_t i = 0; i < html.size(); ++i) {
    const char c = html[i];
    if (in_tag) {
      if (c == '>') in_tag = false;
      continue;
    }
    if (c == '<') {
      in_tag = true;
      // Tags act as word separators so "a<br>b" does not fuse.
      out.push_back(' ');
      continue;
    }
    if (c == '&') {
      const std::string_view rest = html.substr(i);
      // &amp; and &lt; become separators, not their characters: emitting '&'
      // or '<' could assemble a fresh entity or tag, and stripping must be a
      // fixpoint (normalize(normalize(x)) == normalize(x)).
      struct Entity { std::string_view name; char ch; };
      static constexpr Entity kEntities[] = {
          {"&amp;", ' '}, {"&lt;", ' '}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''},
      };
      auto ci_starts_with = [&](std::string_view name) {
        if (rest.size() < name.size()) return false;
        for (std::size_t k = 0; k < name.size(); ++k) {
          char a = rest[k];
          if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
          if (a != name[k]) return false;
        }
        return true;
      };
      bool replaced = false;
      for (const auto& e : kEntities) {
        if (ci_starts_with(e.name)) {
          out.push_back(e.ch);
          i += e.name.size() - 1;
          replaced = true;
          break;
        }
      }
      if (!replaced) out.push_back(c);
      continue;
    }
    out.push_back(c);
  }
  return out;
}

NormalizedText normalize_text(std::string_view s) {
  const std::string stripped = strip_html(s);
  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (char c : stripped) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u == ' ' || u == '\t' || u == '\r' || u == '\n' || u == '\f' || u == '\v') {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c >= 'A' && c <= 'Z')
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    else
      out.push_back(c);
  }
  return NormalizedText{std::move(out)};
}

}  // namespace mailbot
