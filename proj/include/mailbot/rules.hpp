#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mailbot/message.hpp"
#include "mailbot/normalize.hpp"

namespace mailbot {

class ConfigSyntax : public std::runtime_error {
 public:
  explicit ConfigSyntax(const std::string& what) : std::runtime_error(what) {}
};

class ConfigSemantic : public std::runtime_error {
 public:
  explicit ConfigSemantic(const std::string& what) : std::runtime_error(what) {}
};

enum class MatchField { subject, body, sender };

struct Rule {
  std::string label;                  // destination folder, e.g. "Work"
  std::vector<std::string> keywords;  // stored normalized, never empty
  std::set<MatchField> match_fields{MatchField::subject};
  int priority = 0;  // lower = evaluated first, unique within a RuleSet
};

enum class DefaultAction { trash, keep };

struct RuleSet {
  std::vector<Rule> rules;  // sorted by priority
  DefaultAction default_action = DefaultAction::trash;
  std::string trash_folder = "Trash";
};

struct SenderBlocklist {
  std::set<std::string> addresses;  // case-folded

  bool contains(std::string_view address) const {
    return addresses.count(ascii_lower(address)) > 0;
  }
};

enum class DecisionKind { route, trash, keep };
enum class DecisionReason { keyword, blocklist, default_action };

// The single routing outcome for one message.
struct Decision {
  DecisionKind kind = DecisionKind::keep;
  std::optional<std::string> label;  // present iff kind == route
  std::optional<int> matched_rule_priority;
  std::optional<std::string> matched_keyword;
  DecisionReason reason = DecisionReason::default_action;
};

struct AttachmentRules {
  std::vector<std::string> useful_keywords{"resume", "cv", "bill", "invoice"};
  struct Subfolder {
    std::vector<std::string> keywords;
    std::string folder;
  };
  std::vector<Subfolder> subfolders{{
      {{"resume", "cv"}, "Resumes"},
      {{"bill"}, "Bills"},
      {{"invoice"}, "Invoices"},
  }};
  std::vector<std::string> eligibility_keywords;  // empty = every resume is eligible
};

struct RulesBundle {
  RuleSet ruleset;
  AttachmentRules attachment_rules;
};

const char* to_string(DecisionKind kind);
const char* to_string(DecisionReason reason);
const char* to_string(MatchField field);

// Built-in configuration: Resume -> Work (priority 1),
// Bill|Invoice -> Receipt (priority 2), everything else trashed.
RulesBundle default_rules();

// Parses the JSON rules document. Throws ConfigSyntax on bad JSON,
// ConfigSemantic on duplicate priorities / empty keywords / unknown fields.
RulesBundle load_ruleset(const std::string& config_text);

// Plain text, one address per line, '#' comments and blank lines ignored.
SenderBlocklist load_blocklist(const std::string& text);

// Blocklisted sender wins over everything; then the lowest-priority rule with
// a keyword occurring as a substring of a selected normalized field; then the
// default action. Pure function of its inputs.
Decision classify_message(const ParsedMessage& msg, const RuleSet& rules,
                          const SenderBlocklist& blocklist);

struct AttachmentClass {
  bool useful = false;
  std::optional<std::string> subfolder;  // set only when useful
};

// Matching text = normalized(filename + attachment text + carrying subject).
AttachmentClass classify_attachment_useful(const Attachment& att,
                                           const NormalizedText& message_subject,
                                           const AttachmentRules& rules);

enum class Eligibility { eligible, not_eligible, not_applicable };

// Screens attachments sub-classified "Resumes"; everything else is
// not_applicable. Eligible iff every eligibility keyword occurs in the
// attachment's normalized text.
Eligibility screen_eligibility(const Attachment& att, const AttachmentClass& cls,
                               const AttachmentRules& rules);

}  // namespace mailbot
