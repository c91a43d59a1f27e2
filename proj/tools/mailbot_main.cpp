#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mailbot/config.hpp"
#include "mailbot/rules.hpp"
#include "mailbot/run.hpp"
#include "mailbot/store.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAuth = 3;
constexpr int kExitConnect = 4;
constexpr int kExitPartial = 5;

void print_report(const mailbot::RunReport& report) {
  std::cout << "batch " << report.batch_id << (report.dry_run ? " (dry run)" : "")
            << "\n  fetched      " << report.fetched;
  for (const auto& [label, count] : report.routed_counts)
    std::cout << "\n  -> " << label << "  " << count;
  std::cout << "\n  trashed      " << report.trashed
            << "\n  kept         " << report.kept
            << "\n  attachments  " << report.attachments_saved
            << "\n  errors       " << report.errors;
  std::printf("\n  elapsed      %.3f s\n  baseline     %.1f s\n",
              report.elapsed_seconds, report.baseline_seconds);
  if (report.speedup) std::printf("  speedup      %.2fx\n", *report.speedup);
  if (report.accuracy) std::printf("  accuracy     %.4f\n", report.accuracy->accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mailbot - rule-based e-mail triage"};

  std::string config_path;
  bool execute = false;
  long top = -1;
  std::string mailbox;
  std::string fixture;
  std::string report_dir;
  std::string manifest;
  std::string rules;
  std::string blocklist;

  app.add_option("--config", config_path, "JSON config file");
  app.add_flag("--execute", execute, "apply actions (default is a dry run)");
  app.add_option("--top", top, "fetch at most N unseen messages");
  app.add_option("--mailbox", mailbox, "source folder (default Inbox)");
  app.add_option("--fixture", fixture, "maildir fixture root; selects offline mode");
  app.add_option("--report-dir", report_dir, "where reports and audit logs go");
  app.add_option("--manifest", manifest, "expected-label manifest; enables accuracy");
  app.add_option("--rules", rules, "rules JSON file");
  app.add_option("--blocklist", blocklist, "sender blocklist file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  mailbot::AppConfig cfg;
  try {
    if (!config_path.empty()) cfg = mailbot::load_config(config_path);
    if (execute) cfg.run_mode = mailbot::RunMode::execute;
    if (top >= 0) cfg.store.top = static_cast<std::size_t>(top);
    if (!mailbox.empty()) cfg.store.mail_folder = mailbox;
    if (!fixture.empty()) {
      cfg.store.fixture_root = fixture;
      cfg.store.mode = mailbot::StoreMode::fixture;
    }
    if (!report_dir.empty()) cfg.report_dir = report_dir;
    if (!manifest.empty()) cfg.manifest_path = manifest;
    if (!rules.empty()) cfg.rules_path = rules;
    if (!blocklist.empty()) cfg.blocklist_path = blocklist;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  mailbot::Credentials creds;
  try {
    creds = mailbot::resolve_credentials(cfg, /*allow_prompt=*/true);
  } catch (const mailbot::NoCredentials& e) {
    // the fixture store needs no login; anything else does
    if (cfg.store.mode != mailbot::StoreMode::fixture) {
      std::cerr << "auth error: " << e.what() << '\n';
      return kExitAuth;
    }
  }

  try {
    const mailbot::RunReport report = mailbot::run_pipeline(cfg, creds);
    print_report(report);
    return report.errors > 0 ? kExitPartial : kExitOk;
  } catch (const mailbot::AuthFailure& e) {
    std::cerr << "auth error: " << e.what() << '\n';
    return kExitAuth;
  } catch (const mailbot::ConfigSyntax& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mailbot::ConfigSemantic& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mailbot::ManifestMismatch& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mailbot::StoreError& e) {
    std::cerr << "store error: " << e.what() << '\n';
    return kExitConnect;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
}
