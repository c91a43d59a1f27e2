#include "mailbot/run.hpp"

#include <termios.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mailbot/pipeline.hpp"
#include "mailbot/rules.hpp"

namespace mailbot {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigSyntax(std::string("cannot read ") + what + " " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string prompt_password() {
  termios before{};
  const bool tty = tcgetattr(STDIN_FILENO, &before) == 0;
  if (tty) {
    termios off = before;
    off.c_lflag &= ~static_cast<tcflag_t>(ECHO);
    tcsetattr(STDIN_FILENO, TCSANOW, &off);
  }
  std::string password;
  std::getline(std::cin, password);
  if (tty) {
    tcsetattr(STDIN_FILENO, TCSANOW, &before);
    std::cerr << '\n';
  }
  return password;
}

struct MessageWork {
  ParsedMessage parsed;
  Decision decision;
  bool malformed = false;
  std::string malformed_error;
};

std::string extension_of(const std::string& filename) {
  const std::size_t dot = filename.rfind('.');
  if (dot == std::string::npos || dot == 0) return "";
  return filename.substr(dot);
}

}  // namespace

Credentials resolve_credentials(const AppConfig& cfg, bool allow_prompt) {
  const char* env_user = std::getenv("EMAIL_ASSISTANT_USER");
  const char* env_pass = std::getenv("EMAIL_ASSISTANT_PASS");
  if (env_user != nullptr && env_pass != nullptr)
    return Credentials{env_user, env_pass};

  if (!cfg.credentials_path.empty()) {
    const std::string text = read_file(cfg.credentials_path, "credentials file");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw NoCredentials(std::string("credentials file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("email") || !doc.contains("password"))
      throw NoCredentials("credentials file needs \"email\" and \"password\"");
    return Credentials{doc["email"].get<std::string>(),
                       doc["password"].get<std::string>()};
  }

  if (allow_prompt && isatty(STDIN_FILENO) == 1) {
    std::cerr << "email: " << std::flush;
    std::string email;
    std::getline(std::cin, email);
    std::cerr << "password: " << std::flush;
    const std::string password = prompt_password();
    if (!email.empty()) return Credentials{email, password};
  }

  throw NoCredentials(
      "no credentials: set EMAIL_ASSISTANT_USER/EMAIL_ASSISTANT_PASS, configure "
      "credentials_file, or run interactively");
}

RunReport run_pipeline(const AppConfig& cfg, const Credentials& creds) {
  // rule configuration
  RulesBundle rules;
  if (cfg.rules_path.empty())
    rules = default_rules();
  else
    rules = load_ruleset(read_file(cfg.rules_path, "rules file"));

  SenderBlocklist blocklist;
  if (!cfg.blocklist_path.empty())
    blocklist = load_blocklist(read_file(cfg.blocklist_path, "blocklist file"));

  std::optional<ExpectedLabelManifest> manifest;
  if (!cfg.manifest_path.empty())
    manifest = load_manifest(read_file(cfg.manifest_path, "manifest file"));

  const bool execute = cfg.run_mode == RunMode::execute;
  const std::string batch_id = open_batch(std::chrono::system_clock::now());

  fs::create_directories(cfg.report_dir);
  AuditLog audit(cfg.report_dir / (batch_id + ".audit.jsonl"));

  RunReport report;
  report.batch_id = batch_id;
  report.dry_run = !execute;

  DirectoryLayout layout{cfg.layout_root};
  if (execute) layout.ensure_base_dirs();

  auto session = connect_and_authenticate(cfg.store, creds);
  session->select_folder(cfg.store.mail_folder);

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<FetchedMessage> batch = session->fetch_unseen_top(cfg.store.top);
  report.fetched = batch.size();

  std::vector<AuditRecord> records;
  std::size_t seq = 0;
  for (const FetchedMessage& fetched : batch) {
    ++seq;
    MessageWork work;
    try {
      work.parsed = parse_message(fetched.raw, seq, batch_id, fetched.received);
    } catch (const MalformedMessage& e) {
      work.malformed = true;
      work.malformed_error = e.what();
      work.parsed.unique_id = assign_unique_id(batch_id, seq);
      work.parsed.raw_size_bytes = fetched.raw.bytes.size();
    }

    AuditRecord record;
    record.batch_id = batch_id;
    record.unique_id = work.parsed.unique_id;
    record.timestamp = std::chrono::system_clock::now();
    record.source_name = fetched.handle.store_uid;
    record.sender = work.parsed.sender;
    record.recipients = work.parsed.recipients;
    record.subject = work.parsed.subject;
    record.warnings = work.parsed.warnings;

    if (work.malformed) {
      // unparseable mail cannot be classified; it stays in its folder but is
      // marked seen so the next batch does not fetch it again
      work.decision.kind = DecisionKind::keep;
      work.decision.reason = DecisionReason::default_action;
      record.warnings.push_back("malformed message: " + work.malformed_error);
      record.decision = work.decision;
      ActionOutcome outcome;
      outcome.kind = to_string(ActionKind::mark_seen);
      if (execute) {
        try {
          session->apply_action({ActionKind::mark_seen, "", fetched.handle});
        } catch (const ActionFailure& e) {
          outcome.ok = false;
          outcome.error = e.what();
        }
      }
      record.actions.push_back(outcome);
      ++report.kept;
      ++report.errors;
      records.push_back(record);
      audit.append(record);
      continue;
    }

    work.decision = classify_message(work.parsed, rules.ruleset, blocklist);
    record.decision = work.decision;

    // the store action implied by the decision
    StoreAction action;
    action.handle = fetched.handle;
    switch (work.decision.kind) {
      case DecisionKind::route:
        action.kind = ActionKind::move_to_label;
        action.target = *work.decision.label;
        ++report.routed_counts[*work.decision.label];
        break;
      case DecisionKind::trash:
        action.kind = ActionKind::move_to_trash;
        action.target = rules.ruleset.trash_folder;
        ++report.trashed;
        break;
      case DecisionKind::keep:
        action.kind = ActionKind::mark_seen;
        ++report.kept;
        break;
    }

    ActionOutcome outcome;
    outcome.kind = to_string(action.kind);
    outcome.target = action.target;
    if (execute) {
      try {
        session->apply_action(action);
      } catch (const ActionFailure& e) {
        outcome.ok = false;
        outcome.error = e.what();
        ++report.errors;
      }
    }

    // attachments are filed only for routed (important) mail
    bool any_eligible = false;
    if (work.decision.kind == DecisionKind::route) {
      const NormalizedText subject_text = normalize_text(work.parsed.subject);
      for (const Attachment& att : work.parsed.attachments) {
        const AttachmentClass cls =
            classify_attachment_useful(att, subject_text, rules.attachment_rules);
        fs::path dir;
        std::string category;
        if (cls.useful && cls.subfolder) {
          dir = layout.category_dir(*cls.subfolder);
          category = "Useful/" + *cls.subfolder;
        } else if (cls.useful) {
          dir = layout.useful_dir();
          category = "Useful";
        } else if (cfg.save_not_useful) {
          dir = layout.not_useful_dir();
          category = "NotUseful";
        } else {
          continue;
        }

        std::string name;
        if (cls.subfolder && *cls.subfolder == "Resumes") {
          name = render_rename(cfg.rename_template, candidate_name_for(work.parsed),
                               cfg.highest_qualification.empty()
                                   ? std::nullopt
                                   : std::optional<std::string_view>(cfg.highest_qualification),
                               work.parsed.date, extension_of(att.filename));
        } else {
          name = sanitize_filename(att.filename);
        }

        try {
          const SavedFileRecord saved =
              execute ? write_attachment(att, dir, name, work.parsed.unique_id, category)
                      : plan_attachment(att, dir, name, work.parsed.unique_id, category);
          record.attachment_records.push_back(saved);
          ++report.attachments_saved;
        } catch (const IoFailure& e) {
          record.warnings.push_back("attachment write failed: " + std::string(e.what()));
          ++report.errors;
          continue;
        }

        if (screen_eligibility(att, cls, rules.attachment_rules) == Eligibility::eligible)
          any_eligible = true;
      }
    }

    if (any_eligible) {
      ActionOutcome draft;
      draft.kind = "draft_invitation";
      draft.target = work.parsed.unique_id + "-invitation.eml";
      if (execute) {
        try {
          const fs::path written = draft_interview_invitation(
              work.parsed, layout.outbox_dir(), cfg.invitation_subject,
              cfg.invitation_body, cfg.invitation_from);
          draft.target = written.filename().string();
        } catch (const IoFailure& e) {
          draft.ok = false;
          draft.error = e.what();
          ++report.errors;
        }
      }
      record.actions.push_back(outcome);
      record.actions.push_back(draft);
    } else {
      record.actions.push_back(outcome);
    }

    records.push_back(record);
    audit.append(record);
  }

  const auto t1 = std::chrono::steady_clock::now();
  report.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.baseline_seconds = manual_baseline(report.fetched, cfg.baseline_seconds_per_email);
  if (report.baseline_seconds > 0)
    report.speedup = compute_speedup(report.baseline_seconds, report.elapsed_seconds);

  if (manifest) report.accuracy = evaluate_accuracy(records, *manifest);

  write_report(report, cfg.report_dir / (batch_id + ".report.json"));
  session->logout();
  return report;
}

}  // namespace mailbot
