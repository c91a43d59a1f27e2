#include "mailbot/pipeline.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <system_error>

namespace mailbot {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoFailure("cannot create directory " + p.string() + ": " + ec.message());
}

std::pair<std::string, std::string> split_extension(std::string_view name) {
  const std::size_t dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0)
    return {std::string(name), std::string()};
  return {std::string(name.substr(0, dot)), std::string(name.substr(dot))};
}

std::string fold_spaces(std::string_view value, const std::string& separator) {
  std::string out;
  bool pending = false;
  for (char c : value) {
    if (c == ' ' || c == '\t') {
      if (!out.empty()) pending = true;
      continue;
    }
    if (pending) {
      out += separator;
      pending = false;
    }
    out.push_back(c);
  }
  return out;
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string key(tmpl.substr(i + 1, close - i - 1));
        const auto it = values.find(key);
        out += (it != values.end() && !it->second.empty()) ? it->second : "unknown";
        i = close + 1;
        continue;
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

}  // namespace

void DirectoryLayout::ensure_base_dirs() const {
  ensure_dir(useful_dir());
  ensure_dir(not_useful_dir());
  ensure_dir(outbox_dir());
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  return sha256_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string sanitize_filename(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (c == '/' || c == '\\' || u < 0x20)
      out.push_back('_');
    else
      out.push_back(c);
  }
  if (!out.empty() && out.front() == '.') out.front() = '_';
  if (out.empty()) out = "attachment";

  if (out.size() > 200) {
    auto [stem, ext] = split_extension(out);
    if (ext.size() >= 200) ext.resize(32);
    stem.resize(200 - ext.size());
    out = stem + ext;
  }
  return out;
}

std::string render_rename(const RenameTemplate& tmpl, std::string_view candidate_name,
                          std::optional<std::string_view> qualification,
                          std::chrono::system_clock::time_point date, std::string_view extension) {
  std::map<std::string, std::string> values;
  values["candidate_name"] = fold_spaces(candidate_name, tmpl.separator);
  values["highest_qualification"] =
      qualification ? fold_spaces(*qualification, tmpl.separator) : std::string();
  values["application_date"] = format_date_iso(date);
  std::string name = substitute(tmpl.pattern, values);
  name += extension;
  return sanitize_filename(name);
}

std::string resolve_collision(const fs::path& dir, const std::string& filename) {
  if (!fs::exists(dir / filename)) return filename;
  const auto [stem, ext] = split_extension(filename);
  for (int k = 1; k <= 10000; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " (%d)", k);
    const std::string candidate = stem + buf + ext;
    if (!fs::exists(dir / candidate)) return candidate;
  }
  throw ExhaustedSuffixes("more than 10000 name collisions in " + dir.string());
}

SavedFileRecord plan_attachment(const Attachment& att, const fs::path& dir,
                                const std::string& final_name, const std::string& unique_id,
                                const std::string& category) {
  SavedFileRecord record;
  record.message_unique_id = unique_id;
  record.original_filename = att.filename;
  record.saved_path = dir / final_name;
  record.sha256 = sha256_hex(std::span<const std::uint8_t>(att.decoded_bytes));
  record.bytes_written = att.decoded_bytes.size();
  record.category = category;
  return record;
}

SavedFileRecord write_attachment(const Attachment& att, const fs::path& dir,
                                 const std::string& final_name, const std::string& unique_id,
                                 const std::string& category) {
  ensure_dir(dir);
  SavedFileRecord record = plan_attachment(att, dir, final_name, unique_id, category);

  const fs::path tmp = dir / (final_name + ".part");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(att.decoded_bytes.data()),
              static_cast<std::streamsize>(att.decoded_bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoFailure("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, record.saved_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoFailure("cannot rename into place: " + record.saved_path.string());
  }
  return record;
}

std::string candidate_name_for(const ParsedMessage& msg) {
  if (!msg.sender_display.empty()) return msg.sender_display;
  const std::size_t at = msg.sender.find('@');
  if (at != std::string::npos && at > 0) return msg.sender.substr(0, at);
  return msg.sender.empty() ? "unknown" : msg.sender;
}

fs::path draft_interview_invitation(const ParsedMessage& msg, const fs::path& outbox,
                                    std::string_view subject_template,
                                    std::string_view body_template,
                                    std::string_view from_address) {
  ensure_dir(outbox);

  std::map<std::string, std::string> values;
  values["candidate_name"] = candidate_name_for(msg);
  values["application_date"] = format_date_iso(msg.date);
  const std::string subject = substitute(subject_template, values);
  std::string body = substitute(body_template, values);

  std::string eml;
  eml += "From: " + std::string(from_address) + "\r\n";
  eml += "To: " + msg.sender + "\r\n";
  eml += "Subject: " + subject + "\r\n";
  eml += "Date: " + format_date_rfc5322(std::chrono::system_clock::now()) + "\r\n";
  eml += "MIME-Version: 1.0\r\n";
  eml += "Content-Type: text/plain; charset=utf-8\r\n";
  eml += "\r\n";
  // Bare LF inside the template would not survive SMTP; normalize to CRLF.
  std::string crlf_body;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\n' && (i == 0 || body[i - 1] != '\r')) crlf_body += '\r';
    crlf_body += body[i];
  }
  eml += crlf_body;
  eml += "\r\n";

  const std::string name = sanitize_filename(msg.unique_id + "-invitation.eml");
  const fs::path target = outbox / resolve_collision(outbox, name);
  const fs::path tmp = target.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
    out << eml;
    out.flush();
    if (!out) throw IoFailure("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoFailure("cannot rename draft into place: " + target.string());
  return target;
}

}  // namespace mailbot
