#include "mailbot/encoding.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace mailbot {

namespace {

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int8_t, 256> make_base64_table() {
  std::array<int8_t, 256> t{};
  for (auto& v : t) v = -1;
  for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kBase64Alphabet[i])] = static_cast<int8_t>(i);
  // Whitespace is tolerated (MIME wraps encoded lines at 76 columns).
  t[static_cast<unsigned char>('\r')] = -2;
  t[static_cast<unsigned char>('\n')] = -2;
  t[static_cast<unsigned char>(' ')] = -2;
  t[static_cast<unsigned char>('\t')] = -2;
  return t;
}

constexpr auto kBase64Table = make_base64_table();

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::vector<std::uint8_t> decode_base64(std::span<const std::uint8_t> in) {
  std::vector<std::uint8_t> out;
  out.reserve(in.size() / 4 * 3);
  std::uint32_t acc = 0;
  int bits = 0;
  std::size_t data_chars = 0;
  std::size_t pads = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const unsigned char c = in[i];
    const int8_t v = kBase64Table[c];
    if (v == -2) continue;
    if (c == '=') {
      ++pads;
      continue;
    }
    if (v < 0) throw CorruptEncoding("invalid base64 character at offset " + std::to_string(i));
    if (pads > 0) throw CorruptEncoding("base64 data after padding");
    ++data_chars;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  // A lone trailing 6-bit group cannot encode a byte.
  if (bits >= 6) throw CorruptEncoding("truncated base64 quantum");
  // Padding, when present, must complete a final quantum of 2 or 3 data
  // characters; "====" or "AAAA==" encode nothing.
  if (pads > 0 && (pads > 2 || data_chars % 4 + pads != 4))
    throw CorruptEncoding("misplaced base64 padding");
  return out;
}

std::vector<std::uint8_t> decode_quoted_printable(std::span<const std::uint8_t> in) {
  std::vector<std::uint8_t> out;
  out.reserve(in.size());
  std::size_t pending_ws = 0;  // run of SP/TAB not yet committed

  auto flush_ws = [&] {
    for (; pending_ws > 0; --pending_ws) out.push_back(' ');
  };

  for (std::size_t i = 0; i < in.size(); ++i) {
    const unsigned char c = in[i];
    if (c == '=') {
      if (i + 1 < in.size() && in[i + 1] == '\r' && i + 2 < in.size() && in[i + 2] == '\n') {
        pending_ws = 0;  // soft break; transport padding before it is dropped
        i += 2;
        continue;
      }
      if (i + 1 < in.size() && in[i + 1] == '\n') {
        pending_ws = 0;
        i += 1;
        continue;
      }
      if (i + 2 >= in.size())
        throw CorruptEncoding("truncated quoted-printable escape at offset " + std::to_string(i));
      const int hi = hex_value(static_cast<char>(in[i + 1]));
      const int lo = hex_value(static_cast<char>(in[i + 2]));
      if (hi < 0 || lo < 0)
        throw CorruptEncoding("malformed quoted-printable escape at offset " + std::to_string(i));
      flush_ws();
      out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
      i += 2;
    } else if (c == ' ') {
      ++pending_ws;
    } else if (c == '\t') {
      flush_ws();
      out.push_back(c);
    } else if (c == '\r' || c == '\n') {
      // Hard line break: whitespace immediately before it is transport padding.
      pending_ws = 0;
      out.push_back(c);
    } else {
      flush_ws();
      out.push_back(c);
    }
  }
  flush_ws();
  return out;
}

}  // namespace

const char* to_string(TransferEncoding encoding) {
  switch (encoding) {
    case TransferEncoding::base64: return "base64";
    case TransferEncoding::quoted_printable: return "quoted-printable";
    case TransferEncoding::seven_bit: return "7bit";
    case TransferEncoding::eight_bit: return "8bit";
    case TransferEncoding::binary: return "binary";
  }
  return "?";
}

TransferEncoding transfer_encoding_from_token(std::string_view token) {
  std::string t;
  t.reserve(token.size());
  for (char c : token) {
    if (c == ' ' || c == '\t' || c == '"') continue;
    t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (t.empty() || t == "7bit") return TransferEncoding::seven_bit;
  if (t == "base64") return TransferEncoding::base64;
  if (t == "quoted-printable") return TransferEncoding::quoted_printable;
  if (t == "8bit") return TransferEncoding::eight_bit;
  if (t == "binary") return TransferEncoding::binary;
  throw UnsupportedEncoding(t);
}

std::vector<std::uint8_t> decode_transfer_encoding(std::span<const std::uint8_t> encoded,
                                                   TransferEncoding encoding) {
  switch (encoding) {
    case TransferEncoding::base64: return decode_base64(encoded);
    case TransferEncoding::quoted_printable: return decode_quoted_printable(encoded);
    case TransferEncoding::seven_bit:
    case TransferEncoding::eight_bit:
    case TransferEncoding::binary:
      return {encoded.begin(), encoded.end()};
  }
  throw CorruptEncoding("unknown encoding enum value");
}

std::vector<std::uint8_t> decode_transfer_encoding(std::string_view encoded,
                                                   TransferEncoding encoding) {
  return decode_transfer_encoding(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(encoded.data()),
                                    encoded.size()),
      encoding);
}

std::string encode_base64(std::span<const std::uint8_t> data, std::size_t wrap) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4 + data.size() / 54 * 2 + 4);
  std::size_t line = 0;
  auto put = [&](char c) {
    if (wrap > 0 && line == wrap) {
      out += "\r\n";
      line = 0;
    }
    out.push_back(c);
    ++line;
  };
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    put(kBase64Alphabet[(n >> 18) & 63]);
    put(kBase64Alphabet[(n >> 12) & 63]);
    put(kBase64Alphabet[(n >> 6) & 63]);
    put(kBase64Alphabet[n & 63]);
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const std::uint32_t n = data[i] << 16;
    put(kBase64Alphabet[(n >> 18) & 63]);
    put(kBase64Alphabet[(n >> 12) & 63]);
    put('=');
    put('=');
  } else if (rest == 2) {
    const std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    put(kBase64Alphabet[(n >> 18) & 63]);
    put(kBase64Alphabet[(n >> 12) & 63]);
    put(kBase64Alphabet[(n >> 6) & 63]);
    put('=');
  }
  return out;
}

std::string encode_quoted_printable(std::span<const std::uint8_t> data, std::size_t wrap) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(data.size() * 2);
  std::size_t line = 0;
  auto soft_break_if_needed = [&](std::size_t token_len) {
    // Keep encoded lines at most `wrap` chars including the soft-break '='.
    if (wrap > 0 && line + token_len > wrap - 1) {
      out += "=\r\n";
      line = 0;
    }
  };
  for (const std::uint8_t b : data) {
    const bool literal = (b >= 33 && b <= 126 && b != '=');
    if (literal) {
      soft_break_if_needed(1);
      out.push_back(static_cast<char>(b));
      ++line;
    } else {
      // Space, tab, CR, LF and everything else go out escaped so the decoded
      // bytes never depend on how the transport treats line ends.
      soft_break_if_needed(3);
      out.push_back('=');
      out.push_back(hex[b >> 4]);
      out.push_back(hex[b & 0xF]);
      line += 3;
    }
  }
  return out;
}

}  // namespace mailbot
