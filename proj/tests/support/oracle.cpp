#include "support/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oracle {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_value(char c) {
  const char* at = std::strchr(kAlphabet, c);
  if (c == '\0' || at == nullptr) return -1;
  return static_cast<int>(at - kAlphabet);
}

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F') || (c >= 'a' && c <= 'f');
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return c - 'a' + 10;
}

}  // namespace

std::string base64_encode(const Bytes& data) {
  std::string out;
  std::size_t line = 0;
  for (std::size_t i = 0; i < data.size(); i += 3) {
    const std::size_t n = std::min<std::size_t>(3, data.size() - i);
    std::uint32_t group = static_cast<std::uint32_t>(data[i]) << 16;
    if (n > 1) group |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (n > 2) group |= static_cast<std::uint32_t>(data[i + 2]);
    char quad[4] = {
        kAlphabet[(group >> 18) & 0x3f],
        kAlphabet[(group >> 12) & 0x3f],
        n > 1 ? kAlphabet[(group >> 6) & 0x3f] : '=',
        n > 2 ? kAlphabet[group & 0x3f] : '=',
    };
    if (line == 76) {
      out += "\r\n";
      line = 0;
    }
    out.append(quad, 4);
    line += 4;
  }
  return out;
}

std::optional<Bytes> base64_decode(const std::string& text) {
  Bytes out;
  std::uint32_t acc = 0;
  int bits = 0;
  bool seen_pad = false;
  int pad_count = 0;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (c == '=') {
      seen_pad = true;
      ++pad_count;
      if (pad_count > 2) return std::nullopt;
      continue;
    }
    if (seen_pad) return std::nullopt;  // data after padding
    const int v = base64_value(c);
    if (v < 0) return std::nullopt;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
    }
  }
  // leftover bits must be zero padding narrower than a byte
  if (bits >= 6) return std::nullopt;
  if ((acc & ((1u << bits) - 1)) != 0) return std::nullopt;
  return out;
}

std::string qp_encode(const Bytes& data) {
  std::string out;
  std::size_t line = 0;
  auto soft_break = [&] {
    out += "=\r\n";
    line = 0;
  };
  for (std::uint8_t b : data) {
    const bool literal = (b >= 33 && b <= 126 && b != '=');
    const std::size_t width = literal ? 1 : 3;
    if (line + width > 75) soft_break();
    if (literal) {
      out += static_cast<char>(b);
    } else {
      char esc[4];
      std::snprintf(esc, sizeof(esc), "=%02X", b);
      out += esc;
    }
    line += width;
  }
  return out;
}

std::optional<Bytes> qp_decode(const std::string& text) {
  Bytes out;
  Bytes white;  // run of SP/TAB, dropped when a line break follows
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ' || c == '\t') {
      white.push_back(static_cast<std::uint8_t>(c));
      continue;
    }
    if (c == '\r' || c == '\n') {
      white.clear();  // transport padding vanishes
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      out.push_back('\r');
      out.push_back('\n');
      continue;
    }
    out.insert(out.end(), white.begin(), white.end());
    white.clear();
    if (c == '=') {
      if (i + 1 < text.size() && (text[i + 1] == '\r' || text[i + 1] == '\n')) {
        ++i;  // soft break
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        continue;
      }
      if (i + 2 >= text.size() || !is_hex(text[i + 1]) || !is_hex(text[i + 2]))
        return std::nullopt;
      out.push_back(static_cast<std::uint8_t>(hex_value(text[i + 1]) * 16 +
                                              hex_value(text[i + 2])));
      i += 2;
      continue;
    }
    out.push_back(static_cast<std::uint8_t>(c));
  }
  out.insert(out.end(), white.begin(), white.end());
  return out;
}

// --- SHA-256, straight from the FIPS 180-4 pseudo code ---

namespace {

constexpr std::array<std::uint32_t, 64> kK = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

}  // namespace

std::string sha256_hex(const Bytes& data) {
  std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  Bytes msg = data;
  const std::uint64_t bit_len = static_cast<std::uint64_t>(data.size()) * 8;
  msg.push_back(0x80);
  while (msg.size() % 64 != 56) msg.push_back(0x00);
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<std::uint8_t>((bit_len >> (i * 8)) & 0xff));

  for (std::size_t block = 0; block < msg.size(); block += 64) {
    std::array<std::uint32_t, 64> w{};
    for (int t = 0; t < 16; ++t) {
      w[t] = (static_cast<std::uint32_t>(msg[block + t * 4]) << 24) |
             (static_cast<std::uint32_t>(msg[block + t * 4 + 1]) << 16) |
             (static_cast<std::uint32_t>(msg[block + t * 4 + 2]) << 8) |
             static_cast<std::uint32_t>(msg[block + t * 4 + 3]);
    }
    for (int t = 16; t < 64; ++t) {
      const std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
      const std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
      w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int t = 0; t < 64; ++t) {
      const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t temp1 = hh + S1 + ch + kK[t] + w[t];
      const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t temp2 = S0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + temp1;
      d = c;
      c = b;
      b = a;
      a = temp1 + temp2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
  }

  std::string hex;
  hex.reserve(64);
  for (std::uint32_t word : h) {
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x", word);
    hex += buf;
  }
  return hex;
}

std::string sha256_hex(const std::string& data) {
  return sha256_hex(Bytes(data.begin(), data.end()));
}

std::string dir_hash(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::exists(root)) return "";
  std::vector<std::string> lines;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    const std::string rel = fs::relative(entry.path(), root).generic_string();
    if (entry.is_directory()) {
      lines.push_back("d " + rel);
    } else {
      lines.push_back("f " + rel + " " + sha256_hex(read_file_bytes(entry.path())));
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string joined;
  for (const std::string& line : lines) joined += line + "\n";
  return sha256_hex(joined);
}

Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("oracle cannot read " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

void write_file_bytes(const std::filesystem::path& path, const Bytes& data) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("oracle cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

void write_file_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, Bytes(text.begin(), text.end()));
}

std::string read_file_text(const std::filesystem::path& path) {
  const Bytes raw = read_file_bytes(path);
  return std::string(raw.begin(), raw.end());
}

TempDir::TempDir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / (tag + "-" + std::to_string(rng()));
    std::error_code ec;
    if (std::filesystem::create_directories(candidate, ec)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir for " + tag);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void copy_tree(const std::filesystem::path& from, const std::filesystem::path& to) {
  std::filesystem::copy(from, to,
                        std::filesystem::copy_options::recursive |
                            std::filesystem::copy_options::copy_symlinks);
}

}  // namespace oracle
