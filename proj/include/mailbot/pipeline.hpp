#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mailbot/message.hpp"

namespace mailbot {

class IoFailure : public std::runtime_error {
 public:
  explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

class ExhaustedSuffixes : public std::runtime_error {
 public:
  explicit ExhaustedSuffixes(const std::string& what) : std::runtime_error(what) {}
};

// Where classified attachments and drafts land. All paths live under root;
// directories are created on demand and creation is idempotent.
struct DirectoryLayout {
  std::filesystem::path root;

  std::filesystem::path useful_dir() const { return root / "Useful"; }
  std::filesystem::path not_useful_dir() const { return root / "NotUseful"; }
  std::filesystem::path category_dir(std::string_view folder) const {
    return useful_dir() / folder;
  }
  std::filesystem::path outbox_dir() const { return root / "Outbox"; }

  void ensure_base_dirs() const;
};

struct RenameTemplate {
  std::string pattern = "{candidate_name}_{highest_qualification}_{application_date}";
  std::string separator = "_";  // folds spaces inside substituted values
};

// Provenance of one attachment written to disk.
struct SavedFileRecord {
  std::string message_unique_id;
  std::string original_filename;
  std::filesystem::path saved_path;
  std::string sha256;  // hex of decoded_bytes; byte-fidelity proof
  std::size_t bytes_written = 0;
  std::string category;  // "Useful/Resumes", "NotUseful", ...
};

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);

// Path separators, NUL and control chars become '_'; a leading dot becomes
// '_'; empty input becomes "attachment"; length capped at 200 with the
// extension preserved.
std::string sanitize_filename(std::string_view name);

// <candidate_name>_<highest_qualification>_<application_date><ext>, missing
// values as "unknown", spaces folded to the separator, result sanitized.
std::string render_rename(const RenameTemplate& tmpl, std::string_view candidate_name,
                          std::optional<std::string_view> qualification,
                          std::chrono::system_clock::time_point date, std::string_view extension);

// First unused of filename, "<stem> (1)<ext>", "<stem> (2)<ext>", ...
// Throws ExhaustedSuffixes past 10000 attempts.
std::string resolve_collision(const std::filesystem::path& dir, const std::string& filename);

// Atomic write (temp file + rename); the record's hash is computed from the
// attachment bytes so the audit trail can re-verify the file later.
SavedFileRecord write_attachment(const Attachment& att, const std::filesystem::path& dir,
                                 const std::string& final_name, const std::string& unique_id,
                                 const std::string& category);

// Builds the SavedFileRecord a write *would* produce, without touching disk.
SavedFileRecord plan_attachment(const Attachment& att, const std::filesystem::path& dir,
                                const std::string& final_name, const std::string& unique_id,
                                const std::string& category);

// Writes an RFC 5322 interview-invitation draft into the outbox; never sends.
// Templates may use {candidate_name} and {application_date}.
std::filesystem::path draft_interview_invitation(const ParsedMessage& msg,
                                                 const std::filesystem::path& outbox,
                                                 std::string_view subject_template,
                                                 std::string_view body_template,
                                                 std::string_view from_address);

// Candidate name per the renaming scheme: sender display name, falling back
// to the local part of the address.
std::string candidate_name_for(const ParsedMessage& msg);

}  // namespace mailbot
