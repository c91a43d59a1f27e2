#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mailbot/pipeline.hpp"
#include "mailbot/rules.hpp"

namespace mailbot {

struct ActionOutcome {
  std::string kind;    // "move_to_label", "move_to_trash", "mark_seen"
  std::string target;  // destination folder, if any
  bool ok = true;
  std::string error;  // set when ok == false
};

// One append-only log entry per fetched message.
struct AuditRecord {
  std::string batch_id;
  std::string unique_id;
  std::chrono::system_clock::time_point timestamp{};
  std::string source_name;  // store handle (fixture file name / IMAP UID)
  std::string sender;
  std::vector<std::string> recipients;
  std::string subject;
  Decision decision;
  std::vector<ActionOutcome> actions;
  std::vector<SavedFileRecord> attachment_records;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const AuditRecord& record);
AuditRecord audit_record_from_json(const nlohmann::json& j);

// Serialized appender; one JSON object per line, each line written whole.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path file);
  void append(const AuditRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mutex_;
};

std::vector<AuditRecord> read_audit_log(const std::filesystem::path& file);

// "B" + UTC timestamp (basic ISO, second resolution) + "-" + 4 random hex.
std::string open_batch(std::chrono::system_clock::time_point now);

// The manual-processing baseline: seconds_per_email defaults to the survey
// figure of 78 s per email.
double manual_baseline(std::size_t n_emails, double seconds_per_email = 78.0);

// baseline/elapsed; nullopt (omitted from reports) unless both are positive.
std::optional<double> compute_speedup(double baseline_seconds, double elapsed_seconds);

struct ExpectedLabelManifest {
  std::map<std::string, std::string> entries;  // message file name -> label
};

ExpectedLabelManifest load_manifest(const std::string& json_text);

class ManifestMismatch : public std::runtime_error {
 public:
  explicit ManifestMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct AccuracyResult {
  double accuracy = 0.0;  // matching / manifest size
  struct Mismatch {
    std::string name;
    std::string expected;
    std::string actual;
  };
  std::vector<Mismatch> mismatches;
};

// Labels per decision: route -> label, trash -> "trash", keep -> "keep".
// Throws ManifestMismatch when a processed message is absent from the
// manifest.
AccuracyResult evaluate_accuracy(const std::vector<AuditRecord>& records,
                                 const ExpectedLabelManifest& manifest);

// Per-batch metrics; the count partition fetched = routed + trashed + kept
// holds by construction.
struct RunReport {
  std::string batch_id;
  std::size_t fetched = 0;
  std::map<std::string, std::size_t> routed_counts;
  std::size_t trashed = 0;
  std::size_t kept = 0;
  std::size_t attachments_saved = 0;
  double elapsed_seconds = 0.0;
  double baseline_seconds = 0.0;
  std::optional<double> speedup;
  std::size_t errors = 0;
  bool dry_run = true;
  std::optional<AccuracyResult> accuracy;
};

nlohmann::json to_json(const RunReport& report);
void write_report(const RunReport& report, const std::filesystem::path& file);

}  // namespace mailbot
