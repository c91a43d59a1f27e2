#include "mailbot/audit.hpp"

#include <cstdio>
#include <ctime>
#include <random>

namespace mailbot {

using nlohmann::json;

namespace {

json decision_to_json(const Decision& d) {
  json j;
  j["kind"] = to_string(d.kind);
  j["reason"] = to_string(d.reason);
  if (d.label) j["label"] = *d.label;
  if (d.matched_rule_priority) j["matched_rule_priority"] = *d.matched_rule_priority;
  if (d.matched_keyword) j["matched_keyword"] = *d.matched_keyword;
  return j;
}

Decision decision_from_json(const json& j) {
  Decision d;
  const std::string kind = j.value("kind", "keep");
  d.kind = kind == "route" ? DecisionKind::route
                           : (kind == "trash" ? DecisionKind::trash : DecisionKind::keep);
  const std::string reason = j.value("reason", "default");
  d.reason = reason == "keyword" ? DecisionReason::keyword
                                 : (reason == "blocklist" ? DecisionReason::blocklist
                                                          : DecisionReason::default_action);
  if (j.contains("label")) d.label = j["label"].get<std::string>();
  if (j.contains("matched_rule_priority"))
    d.matched_rule_priority = j["matched_rule_priority"].get<int>();
  if (j.contains("matched_keyword")) d.matched_keyword = j["matched_keyword"].get<std::string>();
  return d;
}

json saved_file_to_json(const SavedFileRecord& r) {
  return json{{"message_unique_id", r.message_unique_id},
              {"original_filename", r.original_filename},
              {"saved_path", r.saved_path.string()},
              {"sha256", r.sha256},
              {"bytes_written", r.bytes_written},
              {"category", r.category}};
}

SavedFileRecord saved_file_from_json(const json& j) {
  SavedFileRecord r;
  r.message_unique_id = j.value("message_unique_id", "");
  r.original_filename = j.value("original_filename", "");
  r.saved_path = j.value("saved_path", "");
  r.sha256 = j.value("sha256", "");
  r.bytes_written = j.value("bytes_written", std::size_t{0});
  r.category = j.value("category", "");
  return r;
}

}  // namespace

json to_json(const AuditRecord& record) {
  json j;
  j["batch_id"] = record.batch_id;
  j["unique_id"] = record.unique_id;
  j["timestamp"] = format_timestamp_iso(record.timestamp);
  j["source"] = record.source_name;
  j["sender"] = record.sender;
  j["recipients"] = record.recipients;
  j["subject"] = record.subject;
  j["decision"] = decision_to_json(record.decision);
  j["actions"] = json::array();
  for (const ActionOutcome& a : record.actions) {
    json aj{{"kind", a.kind}, {"ok", a.ok}};
    if (!a.target.empty()) aj["target"] = a.target;
    if (!a.ok) aj["error"] = a.error;
    j["actions"].push_back(std::move(aj));
  }
  j["attachments"] = json::array();
  for (const SavedFileRecord& r : record.attachment_records)
    j["attachments"].push_back(saved_file_to_json(r));
  j["warnings"] = record.warnings;
  return j;
}

AuditRecord audit_record_from_json(const json& j) {
  AuditRecord r;
  r.batch_id = j.value("batch_id", "");
  r.unique_id = j.value("unique_id", "");
  if (j.contains("timestamp")) {
    std::tm tm{};
    if (sscanf(j["timestamp"].get<std::string>().c_str(), "%d-%d-%dT%d:%d:%dZ",
               &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
               &tm.tm_sec) == 6) {
      tm.tm_year -= 1900;
      tm.tm_mon -= 1;
      r.timestamp = std::chrono::system_clock::from_time_t(timegm(&tm));
    }
  }
  r.source_name = j.value("source", "");
  r.sender = j.value("sender", "");
  if (j.contains("recipients")) r.recipients = j["recipients"].get<std::vector<std::string>>();
  r.subject = j.value("subject", "");
  if (j.contains("decision")) r.decision = decision_from_json(j["decision"]);
  if (j.contains("actions")) {
    for (const auto& aj : j["actions"]) {
      ActionOutcome a;
      a.kind = aj.value("kind", "");
      a.target = aj.value("target", "");
      a.ok = aj.value("ok", true);
      a.error = aj.value("error", "");
      r.actions.push_back(std::move(a));
    }
  }
  if (j.contains("attachments"))
    for (const auto& fj : j["attachments"]) r.attachment_records.push_back(saved_file_from_json(fj));
  if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
  return r;
}

AuditLog::AuditLog(std::filesystem::path file) : path_(std::move(file)) {
  std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::app);
  if (!out_) throw IoFailure("cannot open audit log " + path_.string());
}

void AuditLog::append(const AuditRecord& record) {
  const std::string line = to_json(record).dump();
  std::lock_guard<std::mutex> lock(mutex_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IoFailure("audit append failed: " + path_.string());
}

std::vector<AuditRecord> read_audit_log(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoFailure("cannot open audit log " + file.string());
  std::vector<AuditRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(audit_record_from_json(json::parse(line)));
  }
  return records;
}

std::string open_batch(std::chrono::system_clock::time_point now) {
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", &tm);

  static thread_local std::mt19937 rng{std::random_device{}()};
  std::uniform_int_distribution<int> dist(0, 0xFFFF);
  char suffix[8];
  std::snprintf(suffix, sizeof(suffix), "%04x", dist(rng));

  return std::string("B") + stamp + "-" + suffix;
}

double manual_baseline(std::size_t n_emails, double seconds_per_email) {
  return seconds_per_email * static_cast<double>(n_emails);
}

std::optional<double> compute_speedup(double baseline_seconds, double elapsed_seconds) {
  if (baseline_seconds <= 0.0 || elapsed_seconds <= 0.0) return std::nullopt;
  return baseline_seconds / elapsed_seconds;
}

ExpectedLabelManifest load_manifest(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigSyntax(std::string("manifest: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigSyntax("manifest must be a JSON object");
  ExpectedLabelManifest manifest;
  for (const auto& [name, label] : doc.items()) {
    if (!label.is_string()) throw ConfigSemantic("manifest entry '" + name + "' must be a string");
    manifest.entries[name] = label.get<std::string>();
  }
  return manifest;
}

AccuracyResult evaluate_accuracy(const std::vector<AuditRecord>& records,
                                 const ExpectedLabelManifest& manifest) {
  AccuracyResult result;
  std::size_t matching = 0;
  for (const AuditRecord& record : records) {
    const auto it = manifest.entries.find(record.source_name);
    if (it == manifest.entries.end())
      throw ManifestMismatch("message '" + record.source_name + "' not covered by the manifest");
    std::string actual;
    switch (record.decision.kind) {
      case DecisionKind::route: actual = record.decision.label.value_or(""); break;
      case DecisionKind::trash: actual = "trash"; break;
      case DecisionKind::keep: actual = "keep"; break;
    }
    if (actual == it->second) {
      ++matching;
    } else {
      result.mismatches.push_back({record.source_name, it->second, actual});
    }
  }
  result.accuracy = manifest.entries.empty()
                        ? 0.0
                        : static_cast<double>(matching) /
                              static_cast<double>(manifest.entries.size());
  return result;
}

json to_json(const RunReport& report) {
  json j;
  j["batch_id"] = report.batch_id;
  j["fetched"] = report.fetched;
  j["routed_counts"] = json::object();
  for (const auto& [label, count] : report.routed_counts) j["routed_counts"][label] = count;
  j["trashed"] = report.trashed;
  j["kept"] = report.kept;
  j["attachments_saved"] = report.attachments_saved;
  j["elapsed_seconds"] = report.elapsed_seconds;
  j["baseline_seconds"] = report.baseline_seconds;
  if (report.speedup) j["speedup"] = *report.speedup;
  j["errors"] = report.errors;
  j["dry_run"] = report.dry_run;
  if (report.accuracy) {
    json a;
    a["accuracy"] = report.accuracy->accuracy;
    a["mismatches"] = json::array();
    for (const auto& m : report.accuracy->mismatches)
      a["mismatches"].push_back(json{{"name", m.name}, {"expected", m.expected}, {"actual", m.actual}});
    j["accuracy"] = std::move(a);
  }
  return j;
}

void write_report(const RunReport& report, const std::filesystem::path& file) {
  std::filesystem::create_directories(file.parent_path());
  const std::filesystem::path tmp = file.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoFailure("cannot open report " + tmp.string());
    out << to_json(report).dump(2) << '\n';
    out.flush();
    if (!out) throw IoFailure("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw IoFailure("cannot rename report into place: " + file.string());
}

}  // namespace mailbot
