#include "mailbot/rules.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace mailbot {

namespace {

using nlohmann::json;

std::string normalize_keyword(std::string_view raw) { return normalize_text(raw).text; }

MatchField match_field_from_string(const std::string& s) {
  if (s == "subject") return MatchField::subject;
  if (s == "body") return MatchField::body;
  if (s == "sender") return MatchField::sender;
  throw ConfigSemantic("unknown match_field: " + s);
}

std::vector<std::string> keywords_from_json(const json& arr, const char* where) {
  if (!arr.is_array()) throw ConfigSemantic(std::string(where) + ": keywords must be an array");
  std::vector<std::string> out;
  for (const auto& k : arr) {
    if (!k.is_string()) throw ConfigSemantic(std::string(where) + ": keyword must be a string");
    std::string norm = normalize_keyword(k.get<std::string>());
    if (norm.empty()) throw ConfigSemantic(std::string(where) + ": empty keyword");
    out.push_back(std::move(norm));
  }
  return out;
}

}  // namespace

const char* to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::route: return "route";
    case DecisionKind::trash: return "trash";
    case DecisionKind::keep: return "keep";
  }
  return "?";
}

const char* to_string(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::keyword: return "keyword";
    case DecisionReason::blocklist: return "blocklist";
    case DecisionReason::default_action: return "default";
  }
  return "?";
}

const char* to_string(MatchField field) {
  switch (field) {
    case MatchField::subject: return "subject";
    case MatchField::body: return "body";
    case MatchField::sender: return "sender";
  }
  return "?";
}

// Rejecting unknown keys catches misspelled configuration early ("attachments"
// for "attachment" would otherwise be ignored without a sound).
void require_known_keys(const json& obj, std::initializer_list<const char*> known,
                        const char* where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw ConfigSemantic(std::string("unknown key '") + key + "' in " + where);
  }
}

RulesBundle default_rules() {
  RulesBundle bundle;
  bundle.ruleset.rules = {
      Rule{"Work", {"resume"}, {MatchField::subject}, 1},
      Rule{"Receipt", {"bill", "invoice"}, {MatchField::subject}, 2},
  };
  bundle.ruleset.default_action = DefaultAction::trash;
  return bundle;
}

RulesBundle load_ruleset(const std::string& config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigSyntax(std::string("rules document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigSyntax("rules document must be a JSON object");
  require_known_keys(doc, {"rules", "default_action", "trash_folder", "attachment"},
                     "rules document");

  RulesBundle bundle;
  bundle.ruleset.rules.clear();

  if (doc.contains("rules")) {
    if (!doc["rules"].is_array()) throw ConfigSemantic("'rules' must be an array");
    std::set<int> priorities;
    for (const auto& entry : doc["rules"]) {
      Rule rule;
      if (!entry.is_object()) throw ConfigSemantic("each rule must be a JSON object");
      require_known_keys(entry, {"label", "keywords", "match_fields", "priority"}, "rule");
      if (!entry.contains("label") || !entry["label"].is_string() ||
          entry["label"].get<std::string>().empty())
        throw ConfigSemantic("rule missing non-empty 'label'");
      rule.label = entry["label"].get<std::string>();
      if (!entry.contains("keywords")) throw ConfigSemantic("rule missing 'keywords'");
      rule.keywords = keywords_from_json(entry["keywords"], rule.label.c_str());
      if (rule.keywords.empty()) throw ConfigSemantic("rule '" + rule.label + "' has no keywords");
      if (entry.contains("match_fields")) {
        rule.match_fields.clear();
        for (const auto& f : entry["match_fields"])
          rule.match_fields.insert(match_field_from_string(f.get<std::string>()));
        if (rule.match_fields.empty())
          throw ConfigSemantic("rule '" + rule.label + "' has empty match_fields");
      }
      if (!entry.contains("priority") || !entry["priority"].is_number_integer())
        throw ConfigSemantic("rule '" + rule.label + "' missing integer 'priority'");
      rule.priority = entry["priority"].get<int>();
      if (!priorities.insert(rule.priority).second)
        throw ConfigSemantic("duplicate rule priority " + std::to_string(rule.priority));
      bundle.ruleset.rules.push_back(std::move(rule));
    }
  }
  std::sort(bundle.ruleset.rules.begin(), bundle.ruleset.rules.end(),
            [](const Rule& a, const Rule& b) { return a.priority < b.priority; });

  if (doc.contains("default_action")) {
    const std::string action = doc["default_action"].get<std::string>();
    if (action == "trash")
      bundle.ruleset.default_action = DefaultAction::trash;
    else if (action == "keep")
      bundle.ruleset.default_action = DefaultAction::keep;
    else
      throw ConfigSemantic("default_action must be 'trash' or 'keep'");
  }
  if (doc.contains("trash_folder")) {
    bundle.ruleset.trash_folder = doc["trash_folder"].get<std::string>();
    if (bundle.ruleset.trash_folder.empty()) throw ConfigSemantic("trash_folder must be non-empty");
  }

  if (doc.contains("attachment")) {
    const json& att = doc["attachment"];
    if (!att.is_object()) throw ConfigSemantic("'attachment' must be a JSON object");
    require_known_keys(att, {"useful_keywords", "subfolders", "eligibility_keywords"},
                       "attachment section");
    AttachmentRules rules;
    if (att.contains("useful_keywords"))
      rules.useful_keywords = keywords_from_json(att["useful_keywords"], "attachment");
    if (att.contains("subfolders")) {
      rules.subfolders.clear();
      for (const auto& entry : att["subfolders"]) {
        AttachmentRules::Subfolder sub;
        if (!entry.is_object()) throw ConfigSemantic("each subfolder must be a JSON object");
        require_known_keys(entry, {"folder", "keywords"}, "attachment subfolder");
        if (!entry.contains("folder") || entry["folder"].get<std::string>().empty())
          throw ConfigSemantic("attachment subfolder missing 'folder'");
        sub.folder = entry["folder"].get<std::string>();
        sub.keywords = keywords_from_json(entry["keywords"], sub.folder.c_str());
        rules.subfolders.push_back(std::move(sub));
      }
    }
    if (att.contains("eligibility_keywords"))
      rules.eligibility_keywords = keywords_from_json(att["eligibility_keywords"], "eligibility");
    // Every subfolder keyword must also mark the attachment useful.
    for (const auto& sub : rules.subfolders)
      for (const auto& kw : sub.keywords)
        if (std::find(rules.useful_keywords.begin(), rules.useful_keywords.end(), kw) ==
            rules.useful_keywords.end())
          throw ConfigSemantic("subfolder keyword '" + kw + "' not in useful_keywords");
    bundle.attachment_rules = std::move(rules);
  }

  return bundle;
}

SenderBlocklist load_blocklist(const std::string& text) {
  SenderBlocklist list;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string addr = normalize_text(line).text;
    if (!addr.empty()) list.addresses.insert(std::move(addr));
    if (end == text.size()) break;
  }
  return list;
}

Decision classify_message(const ParsedMessage& msg, const RuleSet& rules,
                          const SenderBlocklist& blocklist) {
  if (!msg.sender.empty() && blocklist.contains(msg.sender)) {
    Decision d;
    d.kind = DecisionKind::trash;
    d.reason = DecisionReason::blocklist;
    return d;
  }

  const NormalizedText subject = normalize_text(msg.subject);
  // Body/sender are only normalized when some rule actually looks at them.
  std::optional<NormalizedText> body, sender;
  auto field_text = [&](MatchField f) -> const std::string& {
    switch (f) {
      case MatchField::subject: return subject.text;
      case MatchField::body:
        if (!body) body = normalize_text(msg.body_text);
        return body->text;
      case MatchField::sender:
        if (!sender) sender = normalize_text(msg.sender);
        return sender->text;
    }
    return subject.text;
  };

  for (const Rule& rule : rules.rules) {
    for (const std::string& keyword : rule.keywords) {
      for (const MatchField field : rule.match_fields) {
        if (field_text(field).find(keyword) != std::string::npos) {
          Decision d;
          d.kind = DecisionKind::route;
          d.label = rule.label;
          d.matched_rule_priority = rule.priority;
          d.matched_keyword = keyword;
          d.reason = DecisionReason::keyword;
          return d;
        }
      }
    }
  }

  Decision d;
  d.kind = rules.default_action == DefaultAction::trash ? DecisionKind::trash : DecisionKind::keep;
  d.reason = DecisionReason::default_action;
  return d;
}

AttachmentClass classify_attachment_useful(const Attachment& att,
                                           const NormalizedText& message_subject,
                                           const AttachmentRules& rules) {
  std::string haystack = normalize_text(att.filename).text;
  if (att.text_content) {
    haystack += ' ';
    haystack += normalize_text(*att.text_content).text;
  }
  haystack += ' ';
  haystack += message_subject.text;

  AttachmentClass cls;
  for (const std::string& keyword : rules.useful_keywords) {
    if (haystack.find(keyword) != std::string::npos) {
      cls.useful = true;
      break;
    }
  }
  if (!cls.useful) return cls;

  for (const auto& sub : rules.subfolders) {
    for (const std::string& keyword : sub.keywords) {
      if (haystack.find(keyword) != std::string::npos) {
        cls.subfolder = sub.folder;
        return cls;
      }
    }
  }
  return cls;  // useful but uncategorized -> generic Useful folder
}

Eligibility screen_eligibility(const Attachment& att, const AttachmentClass& cls,
                               const AttachmentRules& rules) {
  if (!cls.useful || !cls.subfolder || *cls.subfolder != "Resumes")
    return Eligibility::not_applicable;
  if (rules.eligibility_keywords.empty()) return Eligibility::eligible;
  if (!att.text_content) return Eligibility::not_eligible;
  const NormalizedText text = normalize_text(*att.text_content);
  for (const std::string& keyword : rules.eligibility_keywords)
    if (!text.contains(keyword)) return Eligibility::not_eligible;
  return Eligibility::eligible;
}

}  // namespace mailbot
