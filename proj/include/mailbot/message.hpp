#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mailbot/encoding.hpp"

namespace mailbot {

// One message exactly as received from the store.
struct RawMessage {
  std::vector<std::uint8_t> bytes;
  std::string source_handle;  // opaque store reference (file name, UID, ...)
};

struct Attachment {
  std::string filename;    // as declared in MIME headers, possibly empty
  std::string media_type;  // lowercased, e.g. "application/pdf"
  TransferEncoding transfer_encoding = TransferEncoding::seven_bit;
  std::vector<std::uint8_t> decoded_bytes;
  std::optional<std::string> text_content;  // only for text/* parts
};

// One node of the MIME tree, body still in its transfer encoding.
struct MimePart {
  std::vector<std::pair<std::string, std::string>> headers;  // lowercased names
  std::string media_type = "text/plain";
  std::map<std::string, std::string> content_params;      // charset, boundary, name
  std::string disposition;                                 // lowercased, "" if absent
  std::map<std::string, std::string> disposition_params;  // filename
  std::string transfer_encoding_token;                    // lowercased, "" = 7bit
  std::vector<std::uint8_t> body;
  std::vector<MimePart> children;

  std::optional<std::string> header(std::string_view name) const;
  bool is_multipart() const { return media_type.starts_with("multipart/"); }
  // Attachment = Content-Disposition "attachment", or any filename parameter.
  bool is_attachment() const;
  std::string declared_filename() const;
  std::string charset() const;
};

struct ParsedMessage {
  std::string unique_id;
  std::string sender;          // addr-spec, e.g. "a@x"
  std::string sender_display;  // display name if present
  std::vector<std::string> recipients;
  std::string subject;
  std::chrono::system_clock::time_point date{};
  bool date_is_fallback = false;  // Date header missing/unparseable
  std::string body_text;
  std::vector<Attachment> attachments;
  std::size_t raw_size_bytes = 0;
  std::vector<std::string> warnings;  // skipped parts etc., copied to the audit log
};

class MalformedMessage : public std::runtime_error {
 public:
  explicit MalformedMessage(const std::string& what) : std::runtime_error(what) {}
};

struct MailAddress {
  std::string display;
  std::string address;
};

// --- low level pieces, each usable on its own ---

// Splits bytes into the MIME tree. CRLF and LF line ends are both accepted.
// Throws MalformedMessage when there is no header/body separator.
MimePart parse_mime(std::span<const std::uint8_t> bytes);

// Concatenated text/plain parts; falls back to tag-stripped text/html.
// Attachment parts never contribute. Empty string for body-less messages.
std::string extract_body_text(const MimePart& root);

// "<batch_id>-<zero padded 6 digit seq>"
std::string assign_unique_id(const std::string& batch_id, std::size_t batch_seq);

std::vector<MailAddress> parse_address_list(std::string_view value);
std::optional<std::chrono::system_clock::time_point> parse_date(std::string_view value);

// RFC 2047 encoded words in header values ("=?utf-8?B?...?=") -> UTF-8 text.
std::string decode_header_text(std::string_view value);

// Decodes `bytes` under the declared charset; undecodable byte runs become
// U+FFFD. Unknown charsets are read as latin-1 so every byte stays visible.
std::string to_utf8(std::string_view bytes, std::string_view charset);

std::string format_date_rfc5322(std::chrono::system_clock::time_point tp);
std::string format_date_iso(std::chrono::system_clock::time_point tp);         // YYYY-MM-DD
std::string format_timestamp_iso(std::chrono::system_clock::time_point tp);    // full UTC stamp

// --- whole-message parsing ---

// received_fallback supplies ParsedMessage.date when the Date header is
// missing or unparseable; junk mail is often malformed and must still flow
// through classification.
ParsedMessage parse_message(const RawMessage& raw, std::size_t batch_seq,
                            const std::string& batch_id,
                            std::chrono::system_clock::time_point received_fallback = {});

}  // namespace mailbot
