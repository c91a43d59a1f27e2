#include "mailbot/message.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <ctime>

#include "mailbot/normalize.hpp"

namespace mailbot {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) { return ascii_lower(s); }

struct LineScanner {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  bool done() const { return pos >= data.size(); }

  // Returns the next line without its terminator; CRLF and LF both end lines.
  std::string_view next() {
    const char* base = reinterpret_cast<const char*>(data.data());
    std::size_t end = pos;
    while (end < data.size() && data[end] != '\n') ++end;
    std::size_t stop = end;
    if (stop > pos && data[stop - 1] == '\r') --stop;
    std::string_view line(base + pos, stop - pos);
    pos = (end < data.size()) ? end + 1 : data.size();
    return line;
  }
};

// Splits a header block into unfolded (name, value) pairs. Names come out
// lowercased. Lines without a colon are skipped (junk mail is full of them).
std::vector<std::pair<std::string, std::string>> parse_header_block(std::string_view block) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  std::string name;
  std::string value;
  auto flush = [&] {
    if (!name.empty()) out.emplace_back(std::move(name), std::move(value));
    name.clear();
    value.clear();
  };
  while (pos < block.size()) {
    std::size_t end = block.find('\n', pos);
    if (end == std::string_view::npos) end = block.size();
    std::string_view line = block.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == ' ' || line.front() == '\t') {
      if (!name.empty()) {
        value += ' ';
        value += trim(line);
      }
      continue;
    }
    flush();
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    name = lower(trim(line.substr(0, colon)));
    value = std::string(trim(line.substr(colon + 1)));
  }
  flush();
  return out;
}

// "type/subtype; a=b; c="d e"" -> media type + parameter map.
void parse_structured_header(std::string_view value, std::string& main_out,
                             std::map<std::string, std::string>& params_out) {
  std::vector<std::string> segments;
  std::string current;
  bool quoted = false;
  for (char c : value) {
    if (c == '"') {
      quoted = !quoted;
      current.push_back(c);
    } else if (c == ';' && !quoted) {
      segments.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  segments.push_back(current);

  main_out = lower(trim(segments.front()));
  for (std::size_t i = 1; i < segments.size(); ++i) {
    std::string_view seg = trim(segments[i]);
    const std::size_t eq = seg.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key = lower(trim(seg.substr(0, eq)));
    std::string_view raw = trim(seg.substr(eq + 1));
    std::string val;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
      std::string_view inner = raw.substr(1, raw.size() - 2);
      for (std::size_t j = 0; j < inner.size(); ++j) {
        if (inner[j] == '\\' && j + 1 < inner.size()) ++j;
        val.push_back(inner[j]);
      }
    } else {
      val = std::string(raw);
    }
    if (!key.empty()) params_out[key] = std::move(val);
  }
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

constexpr std::uint32_t kReplacement = 0xFFFD;

std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const unsigned char b = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
      ++i;
      continue;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    } else {
      append_utf8(out, kReplacement);
      ++i;
      continue;
    }
    if (i + len > bytes.size()) {
      append_utf8(out, kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t j = 1; j < len; ++j) {
      const unsigned char c = static_cast<unsigned char>(bytes[i + j]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr std::uint32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMinByLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      append_utf8(out, kReplacement);
      ++i;
      continue;
    }
    append_utf8(out, cp);
    i += len;
  }
  return out;
}

std::string latin1_to_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) append_utf8(out, b);
  return out;
}

std::string cp1252_to_utf8(std::string_view bytes) {
  // 0x80..0x9F differ from latin-1; 0 entries fall back to U+FFFD.
  static constexpr std::uint16_t kHigh[32] = {
      0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
      0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
      0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    if (b >= 0x80 && b <= 0x9F) {
      const std::uint16_t cp = kHigh[b - 0x80];
      append_utf8(out, cp ? cp : kReplacement);
    } else {
      append_utf8(out, b);
    }
  }
  return out;
}

// Decodes one =?charset?E?payload?= word; returns nullopt when not decodable.
std::optional<std::string> decode_encoded_word(std::string_view word) {
  if (!word.starts_with("=?") || !word.ends_with("?=")) return std::nullopt;
  std::string_view inner = word.substr(2, word.size() - 4);
  const std::size_t q1 = inner.find('?');
  if (q1 == std::string_view::npos) return std::nullopt;
  const std::size_t q2 = inner.find('?', q1 + 1);
  if (q2 == std::string_view::npos) return std::nullopt;
  const std::string charset(inner.substr(0, q1));
  std::string_view enc = inner.substr(q1 + 1, q2 - q1 - 1);
  std::string_view payload = inner.substr(q2 + 1);
  if (payload.find('?') != std::string_view::npos) return std::nullopt;
  try {
    if (enc == "B" || enc == "b") {
      auto bytes = decode_transfer_encoding(payload, TransferEncoding::base64);
      return to_utf8(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                     charset);
    }
    if (enc == "Q" || enc == "q") {
      std::string qp(payload);
      std::replace(qp.begin(), qp.end(), '_', ' ');
      auto bytes = decode_transfer_encoding(qp, TransferEncoding::quoted_printable);
      return to_utf8(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                     charset);
    }
  } catch (const CorruptEncoding&) {
  }
  return std::nullopt;
}

void parse_part_into(std::span<const std::uint8_t> bytes, MimePart& part, bool strict, int depth);

void split_multipart(std::span<const std::uint8_t> body, const std::string& boundary,
                     MimePart& parent, int depth) {
  const std::string open = "--" + boundary;
  const std::string close = open + "--";

  struct Range {
    std::size_t begin = 0, end = 0;
  };
  std::vector<Range> parts;
  LineScanner scanner{body};
  bool inside = false;
  std::size_t part_begin = 0;
  while (!scanner.done()) {
    const std::size_t line_start = scanner.pos;
    std::string_view line = trim(scanner.next());
    const bool is_close = line == close;
    const bool is_open = !is_close && line == open;
    if (is_open || is_close) {
      if (inside) {
        // The line terminator before the boundary belongs to the boundary.
        std::size_t end = line_start;
        if (end > part_begin && body[end - 1] == '\n') --end;
        if (end > part_begin && body[end - 1] == '\r') --end;
        parts.push_back({part_begin, end});
      }
      inside = true;
      part_begin = scanner.pos;
      if (is_close) break;
    }
  }

  for (const Range& r : parts) {
    MimePart child;
    parse_part_into(body.subspan(r.begin, r.end - r.begin), child, /*strict=*/false, depth + 1);
    parent.children.push_back(std::move(child));
  }
}

void parse_part_into(std::span<const std::uint8_t> bytes, MimePart& part, bool strict, int depth) {
  // Locate the blank line separating header block from body.
  std::size_t header_end = std::string_view::npos;
  std::size_t body_begin = bytes.size();
  {
    LineScanner scanner{bytes};
    while (!scanner.done()) {
      const std::size_t line_start = scanner.pos;
      std::string_view line = scanner.next();
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) {
        header_end = line_start;
        body_begin = scanner.pos;
        break;
      }
    }
  }
  if (header_end == std::string_view::npos) {
    if (strict) throw MalformedMessage("no header/body separator");
    header_end = bytes.size();  // tolerated for nested parts: headers only
    body_begin = bytes.size();
  }

  const std::string_view header_block(reinterpret_cast<const char*>(bytes.data()), header_end);
  part.headers = parse_header_block(header_block);

  if (auto ct = part.header("content-type")) {
    parse_structured_header(*ct, part.media_type, part.content_params);
    if (part.media_type.find('/') == std::string::npos) part.media_type = "text/plain";
  }
  if (auto cd = part.header("content-disposition")) {
    parse_structured_header(*cd, part.disposition, part.disposition_params);
  }
  if (auto cte = part.header("content-transfer-encoding")) {
    part.transfer_encoding_token = lower(trim(*cte));
  }

  part.body.assign(bytes.begin() + static_cast<std::ptrdiff_t>(body_begin), bytes.end());

  if (part.is_multipart() && depth < 16) {
    const auto it = part.content_params.find("boundary");
    if (it != part.content_params.end() && !it->second.empty()) {
      split_multipart(std::span<const std::uint8_t>(part.body), it->second, part, depth);
    }
  }
}

std::string decode_part_text(const MimePart& part) {
  std::vector<std::uint8_t> decoded;
  try {
    const TransferEncoding enc = transfer_encoding_from_token(part.transfer_encoding_token);
    decoded = decode_transfer_encoding(std::span<const std::uint8_t>(part.body), enc);
  } catch (const std::runtime_error&) {
    return {};
  }
  return to_utf8(std::string_view(reinterpret_cast<const char*>(decoded.data()), decoded.size()),
                 part.charset());
}

void collect_text(const MimePart& part, std::vector<std::string>& plains,
                  std::vector<std::string>& htmls) {
  if (part.is_multipart()) {
    for (const MimePart& child : part.children) collect_text(child, plains, htmls);
    return;
  }
  if (part.is_attachment()) return;
  if (part.media_type == "text/plain")
    plains.push_back(decode_part_text(part));
  else if (part.media_type == "text/html")
    htmls.push_back(strip_html(decode_part_text(part)));
}

void collect_attachments(const MimePart& part, ParsedMessage& msg) {
  if (part.is_multipart()) {
    for (const MimePart& child : part.children) collect_attachments(child, msg);
    return;
  }
  if (!part.is_attachment()) return;

  Attachment att;
  att.filename = part.declared_filename();
  att.media_type = part.media_type;
  try {
    att.transfer_encoding = transfer_encoding_from_token(part.transfer_encoding_token);
    att.decoded_bytes =
        decode_transfer_encoding(std::span<const std::uint8_t>(part.body), att.transfer_encoding);
  } catch (const UnsupportedEncoding& e) {
    msg.warnings.push_back("skipped attachment '" + att.filename + "': " + e.what());
    return;
  } catch (const CorruptEncoding& e) {
    msg.warnings.push_back("skipped attachment '" + att.filename + "': " + e.what());
    return;
  }
  if (att.media_type.starts_with("text/")) {
    att.text_content = to_utf8(
        std::string_view(reinterpret_cast<const char*>(att.decoded_bytes.data()),
                         att.decoded_bytes.size()),
        part.charset());
  }
  msg.attachments.push_back(std::move(att));
}

int month_from_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  const std::string low = lower(name.substr(0, 3));
  for (int i = 0; i < 12; ++i)
    if (kMonths[static_cast<std::size_t>(i)] == low) return i;
  return -1;
}

std::optional<int> zone_offset_minutes(std::string_view zone) {
  if (zone.empty()) return 0;
  if ((zone.front() == '+' || zone.front() == '-') && zone.size() == 5) {
    int hh = 0, mm = 0;
    for (std::size_t i = 1; i < 5; ++i)
      if (!std::isdigit(static_cast<unsigned char>(zone[i]))) return std::nullopt;
    hh = (zone[1] - '0') * 10 + (zone[2] - '0');
    mm = (zone[3] - '0') * 10 + (zone[4] - '0');
    const int total = hh * 60 + mm;
    return zone.front() == '+' ? total : -total;
  }
  const std::string z = lower(zone);
  if (z == "ut" || z == "gmt" || z == "utc" || z == "z") return 0;
  if (z == "est") return -5 * 60;
  if (z == "edt") return -4 * 60;
  if (z == "cst") return -6 * 60;
  if (z == "cdt") return -5 * 60;
  if (z == "mst") return -7 * 60;
  if (z == "mdt") return -6 * 60;
  if (z == "pst") return -8 * 60;
  if (z == "pdt") return -7 * 60;
  return 0;  // obs-zone: unknown names mean -0000
}

}  // namespace

std::optional<std::string> MimePart::header(std::string_view name) const {
  const std::string key = lower(name);
  for (const auto& [n, v] : headers)
    if (n == key) return v;
  return std::nullopt;
}

bool MimePart::is_attachment() const {
  if (disposition == "attachment") return true;
  if (disposition_params.count("filename")) return true;
  if (content_params.count("name")) return true;
  return false;
}

std::string MimePart::declared_filename() const {
  std::string name;
  if (auto it = disposition_params.find("filename"); it != disposition_params.end())
    name = it->second;
  else if (auto it2 = content_params.find("name"); it2 != content_params.end())
    name = it2->second;
  if (name.find("=?") != std::string::npos) name = decode_header_text(name);
  return name;
}

std::string MimePart::charset() const {
  if (auto it = content_params.find("charset"); it != content_params.end()) return it->second;
  return {};
}

MimePart parse_mime(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw MalformedMessage("empty message");
  MimePart root;
  parse_part_into(bytes, root, /*strict=*/true, 0);
  return root;
}

std::string extract_body_text(const MimePart& root) {
  std::vector<std::string> plains, htmls;
  collect_text(root, plains, htmls);
  const std::vector<std::string>& chosen = plains.empty() ? htmls : plains;
  std::string out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (i) out += '\n';
    out += chosen[i];
  }
  while (!out.empty() &&
         (out.back() == '\n' || out.back() == '\r' || out.back() == ' ' || out.back() == '\t'))
    out.pop_back();
  return out;
}

std::string assign_unique_id(const std::string& batch_id, std::size_t batch_seq) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "-%06zu", batch_seq);
  return batch_id + buf;
}

std::vector<MailAddress> parse_address_list(std::string_view value) {
  // Strip top-level (comments) first.
  std::string cleaned;
  cleaned.reserve(value.size());
  int paren = 0;
  bool quoted = false;
  for (char c : value) {
    if (c == '"' && paren == 0) quoted = !quoted;
    if (!quoted) {
      if (c == '(') {
        ++paren;
        continue;
      }
      if (c == ')' && paren > 0) {
        --paren;
        continue;
      }
    }
    if (paren == 0) cleaned.push_back(c);
  }

  std::vector<std::string> items;
  std::string current;
  quoted = false;
  int angle = 0;
  for (char c : cleaned) {
    if (c == '"') quoted = !quoted;
    if (!quoted) {
      if (c == '<') ++angle;
      if (c == '>' && angle > 0) --angle;
      if (c == ',' && angle == 0) {
        items.push_back(current);
        current.clear();
        continue;
      }
    }
    current.push_back(c);
  }
  items.push_back(current);

  std::vector<MailAddress> out;
  for (const std::string& item : items) {
    std::string_view s = trim(item);
    if (s.empty()) continue;
    MailAddress addr;
    const std::size_t lt = s.rfind('<');
    const std::size_t gt = s.find('>', lt == std::string_view::npos ? 0 : lt);
    if (lt != std::string_view::npos && gt != std::string_view::npos && gt > lt) {
      addr.address = std::string(trim(s.substr(lt + 1, gt - lt - 1)));
      std::string_view disp = trim(s.substr(0, lt));
      if (disp.size() >= 2 && disp.front() == '"' && disp.back() == '"')
        disp = disp.substr(1, disp.size() - 2);
      addr.display = decode_header_text(disp);
    } else {
      addr.address = std::string(s);
    }
    out.push_back(std::move(addr));
  }
  return out;
}

std::optional<std::chrono::system_clock::time_point> parse_date(std::string_view value) {
  std::string_view s = trim(value);
  if (const std::size_t comma = s.find(','); comma != std::string_view::npos && comma < 10)
    s = trim(s.substr(comma + 1));

  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  if (tokens.size() < 4) return std::nullopt;

  const auto to_int = [](std::string_view t) -> std::optional<int> {
    if (t.empty() || t.size() > 9) return std::nullopt;
    int v = 0;
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };

  const auto day = to_int(tokens[0]);
  const int month = month_from_name(tokens[1]);
  auto year = to_int(tokens[2]);
  if (!day || month < 0 || !year) return std::nullopt;
  if (*year < 100) *year += (*year < 50) ? 2000 : 1900;

  // HH:MM[:SS]
  std::string_view time_tok = tokens[3];
  int hh = 0, mm = 0, ss = 0;
  {
    const std::size_t c1 = time_tok.find(':');
    if (c1 == std::string_view::npos) return std::nullopt;
    const std::size_t c2 = time_tok.find(':', c1 + 1);
    const auto h = to_int(time_tok.substr(0, c1));
    const auto m = to_int(time_tok.substr(c1 + 1, (c2 == std::string_view::npos ? time_tok.size() : c2) - c1 - 1));
    if (!h || !m) return std::nullopt;
    hh = *h;
    mm = *m;
    if (c2 != std::string_view::npos) {
      const auto sec = to_int(time_tok.substr(c2 + 1));
      if (!sec) return std::nullopt;
      ss = *sec;
    }
  }

  int offset_min = 0;
  if (tokens.size() >= 5) {
    const auto off = zone_offset_minutes(tokens[4]);
    if (!off) return std::nullopt;
    offset_min = *off;
  }

  std::tm tm{};
  tm.tm_year = *year - 1900;
  tm.tm_mon = month;
  tm.tm_mday = *day;
  tm.tm_hour = hh;
  tm.tm_min = mm;
  tm.tm_sec = ss;
  const std::time_t utc = timegm(&tm) - offset_min * 60;
  return std::chrono::system_clock::from_time_t(utc);
}

std::string decode_header_text(std::string_view value) {
  std::string out;
  std::size_t i = 0;
  bool last_was_encoded = false;
  std::string gap;  // whitespace run between tokens
  while (i < value.size()) {
    if (value[i] == ' ' || value[i] == '\t') {
      gap.push_back(value[i]);
      ++i;
      continue;
    }
    std::size_t start = i;
    std::optional<std::string> decoded;
    if (value.substr(i).starts_with("=?")) {
      const std::size_t end = value.find("?=", i + 2);
      if (end != std::string_view::npos) {
        decoded = decode_encoded_word(value.substr(i, end + 2 - i));
        if (decoded) i = end + 2;
      }
    }
    if (decoded) {
      // Whitespace between adjacent encoded words is dropped.
      if (!last_was_encoded) out += gap;
      gap.clear();
      out += *decoded;
      last_was_encoded = true;
      continue;
    }
    while (i < value.size() && value[i] != ' ' && value[i] != '\t') ++i;
    out += gap;
    gap.clear();
    out.append(value.substr(start, i - start));
    last_was_encoded = false;
  }
  out += gap;
  return sanitize_utf8(out);
}

std::string to_utf8(std::string_view bytes, std::string_view charset) {
  std::string cs = lower(charset);
  std::erase_if(cs, [](char c) { return c == '"' || c == ' ' || c == '\''; });
  if (cs.empty() || cs == "utf-8" || cs == "utf8" || cs == "us-ascii" || cs == "ascii")
    return sanitize_utf8(bytes);
  if (cs == "iso-8859-1" || cs == "latin-1" || cs == "latin1" || cs == "iso8859-1")
    return latin1_to_utf8(bytes);
  if (cs == "windows-1252" || cs == "cp1252") return cp1252_to_utf8(bytes);
  return latin1_to_utf8(bytes);
}

std::string format_date_rfc5322(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%a, %d %b %Y %H:%M:%S +0000", &tm);
  return buf;
}

std::string format_date_iso(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof(buf), "%Y-%m-%d", &tm);
  return buf;
}

std::string format_timestamp_iso(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ParsedMessage parse_message(const RawMessage& raw, std::size_t batch_seq,
                            const std::string& batch_id,
                            std::chrono::system_clock::time_point received_fallback) {
  const MimePart root = parse_mime(std::span<const std::uint8_t>(raw.bytes));

  ParsedMessage msg;
  msg.unique_id = assign_unique_id(batch_id, batch_seq);
  msg.raw_size_bytes = raw.bytes.size();

  if (auto from = root.header("from")) {
    const auto addrs = parse_address_list(*from);
    if (!addrs.empty()) {
      msg.sender = addrs.front().address;
      msg.sender_display = addrs.front().display;
    }
  }
  for (const char* field : {"to", "cc"}) {
    if (auto hdr = root.header(field)) {
      for (const MailAddress& a : parse_address_list(*hdr))
        if (!a.address.empty()) msg.recipients.push_back(a.address);
    }
  }
  if (auto subject = root.header("subject")) msg.subject = decode_header_text(*subject);

  if (auto date_hdr = root.header("date")) {
    if (auto parsed = parse_date(*date_hdr)) {
      msg.date = *parsed;
    } else {
      msg.date = received_fallback;
      msg.date_is_fallback = true;
      msg.warnings.push_back("unparseable Date header; using store received time");
    }
  } else {
    msg.date = received_fallback;
    msg.date_is_fallback = true;
  }

  msg.body_text = extract_body_text(root);
  collect_attachments(root, msg);
  return msg;
}

}  // namespace mailbot
