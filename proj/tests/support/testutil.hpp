#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mailbot/config.hpp"

namespace testutil {

// Source-tree locations baked in at compile time.
inline std::filesystem::path test_dir() { return std::filesystem::path(MAILBOT_TEST_DIR); }
inline std::filesystem::path fixtures_dir() { return test_dir() / "fixtures"; }
inline std::filesystem::path sample_inbox() { return fixtures_dir() / "sample_inbox"; }

// AppConfig wired to a scratch area: fixture mode over `fixture_root`,
// reports and layout under `work`, bundled rules/blocklist/manifest.
inline mailbot::AppConfig fixture_config(const std::filesystem::path& fixture_root,
                                         const std::filesystem::path& work,
                                         bool with_manifest = true) {
  mailbot::AppConfig cfg;
  cfg.store.mode = mailbot::StoreMode::fixture;
  cfg.store.fixture_root = fixture_root;
  cfg.rules_path = fixtures_dir() / "rules.json";
  cfg.blocklist_path = fixtures_dir() / "blocklist.txt";
  if (with_manifest) cfg.manifest_path = fixtures_dir() / "manifest.json";
  cfg.layout_root = work / "layout";
  cfg.report_dir = work / "reports";
  return cfg;
}

// Minimal RFC 5322 text with CRLF line endings.
inline std::string simple_eml(const std::string& from, const std::string& subject,
                              const std::string& date, const std::string& body) {
  std::string out;
  out += "From: " + from + "\r\n";
  out += "To: triage@acmehr.example\r\n";
  out += "Subject: " + subject + "\r\n";
  if (!date.empty()) out += "Date: " + date + "\r\n";
  out += "\r\n" + body + "\r\n";
  return out;
}

}  // namespace testutil
