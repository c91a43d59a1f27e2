#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mailbot {

// MIME Content-Transfer-Encoding values the parser understands.
enum class TransferEncoding { base64, quoted_printable, seven_bit, eight_bit, binary };

// Invalid base64 alphabet/padding or a malformed quoted-printable escape.
class CorruptEncoding : public std::runtime_error {
 public:
  explicit CorruptEncoding(const std::string& what) : std::runtime_error(what) {}
};

// A Content-Transfer-Encoding token outside the supported set.
class UnsupportedEncoding : public std::runtime_error {
 public:
  explicit UnsupportedEncoding(const std::string& token)
      : std::runtime_error("unsupported transfer encoding: " + token), token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

const char* to_string(TransferEncoding encoding);

// Maps a header token ("base64", "Quoted-Printable", ...) to the enum.
// Throws UnsupportedEncoding for anything else. An empty token means 7bit.
TransferEncoding transfer_encoding_from_token(std::string_view token);

// Returns the exact decoded payload. Identity for 7bit/8bit/binary.
// Throws CorruptEncoding on invalid input for base64/quoted-printable.
std::vector<std::uint8_t> decode_transfer_encoding(std::span<const std::uint8_t> encoded,
                                                   TransferEncoding encoding);
std::vector<std::uint8_t> decode_transfer_encoding(std::string_view encoded,
                                                   TransferEncoding encoding);

// Encoders used when building .eml files (fixtures, drafts). Output is
// CRLF-wrapped at `wrap` columns; wrap = 0 disables line breaks.
std::string encode_base64(std::span<const std::uint8_t> data, std::size_t wrap = 76);
std::string encode_quoted_printable(std::span<const std::uint8_t> data, std::size_t wrap = 76);

}  // namespace mailbot
