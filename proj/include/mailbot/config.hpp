#pragma once

#include <filesystem>
#include <string>

#include "mailbot/pipeline.hpp"
#include "mailbot/store.hpp"

namespace mailbot {

enum class RunMode { dry_run, execute };

// Everything a run needs, aggregated from the config file plus CLI overrides.
struct AppConfig {
  StoreConfig store;
  std::filesystem::path rules_path;      // empty -> built-in default rules
  std::filesystem::path blocklist_path;  // empty -> no blocklist
  std::filesystem::path layout_root = "triage";
  std::filesystem::path report_dir = "reports";
  RenameTemplate rename_template;
  std::string highest_qualification;  // resume rename input; "" renders "unknown"
  RunMode run_mode = RunMode::dry_run;
  std::filesystem::path manifest_path;     // empty -> no accuracy evaluation
  std::filesystem::path credentials_path;  // empty -> env or prompt only
  std::string invitation_from = "hiring@example.com";
  std::string invitation_subject = "Interview invitation for {candidate_name}";
  std::string invitation_body =
      "Dear {candidate_name},\n\n"
      "Thank you for your application dated {application_date}. We would like\n"
      "to invite you to an interview. Please reply with a convenient time.\n\n"
      "Best regards\n";
  double baseline_seconds_per_email = 78.0;
  bool save_not_useful = true;
};

// Parses the JSON config document; an empty object yields all defaults
// (imap.gmail.com, port 993, folder Inbox, top 9, timeout 30000 ms). Throws
// ConfigSyntax on malformed JSON, ConfigSemantic on invalid values.
AppConfig parse_config(const std::string& json_text);

// parse_config over the file's content. Missing file -> ConfigSyntax.
AppConfig load_config(const std::filesystem::path& path);

}  // namespace mailbot
