#pragma once

#include <stdexcept>

#include "mailbot/audit.hpp"
#include "mailbot/config.hpp"
#include "mailbot/store.hpp"

namespace mailbot {

class NoCredentials : public std::runtime_error {
 public:
  explicit NoCredentials(const std::string& what) : std::runtime_error(what) {}
};

// Precedence: EMAIL_ASSISTANT_USER/EMAIL_ASSISTANT_PASS, then the configured
// credentials file (JSON {"email","password"}), then an interactive prompt
// when allow_prompt and stdin is a terminal. The password is never echoed.
Credentials resolve_credentials(const AppConfig& cfg, bool allow_prompt);

// The whole triage loop: connect, fetch the newest unseen batch, classify,
// act (execute mode only), file attachments, screen resumes, draft
// invitations, and write <report_dir>/<batch_id>.{audit.jsonl,report.json}.
// Dry-run computes every decision but mutates neither mailbox nor layout.
RunReport run_pipeline(const AppConfig& cfg, const Credentials& creds);

}  // namespace mailbot
