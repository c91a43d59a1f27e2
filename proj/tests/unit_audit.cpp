#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <regex>
#include <string>

#include "mailbot/audit.hpp"
#include "support/oracle.hpp"
#include "support/testutil.hpp"

using namespace mailbot;

namespace {

AuditRecord sample_record() {
  AuditRecord r;
  r.batch_id = "B20260812T101530Z-1a2b";
  r.unique_id = "B20260812T101530Z-1a2b-000001";
  r.timestamp = std::chrono::system_clock::from_time_t(1786529730);
  r.source_name = "m01.eml";
  r.sender = "jane@example.com";
  r.recipients = {"triage@acmehr.example", "cc@acmehr.example"};
  r.subject = "Application - Resume attached";
  r.decision.kind = DecisionKind::route;
  r.decision.label = "Work";
  r.decision.matched_rule_priority = 1;
  r.decision.matched_keyword = "resume";
  r.decision.reason = DecisionReason::keyword;
  r.actions.push_back({"move_to_label", "Work", true, ""});
  SavedFileRecord f;
  f.message_unique_id = r.unique_id;
  f.original_filename = "resume.pdf";
  f.saved_path = "/tmp/x/Useful/Resumes/Jane_Doe_B.Tech_2026-08-12.pdf";
  f.sha256 = oracle::sha256_hex(std::string("pdf bytes"));
  f.bytes_written = 9;
  f.category = "Useful/Resumes";
  r.attachment_records.push_back(f);
  r.warnings = {"something odd"};
  return r;
}

}  // namespace

TEST_CASE("audit records survive a json round trip") {
  const auto r = sample_record();
  const auto j = to_json(r);
  const auto back = audit_record_from_json(j);
  CHECK(back.batch_id == r.batch_id);
  CHECK(back.unique_id == r.unique_id);
  CHECK(back.timestamp == r.timestamp);
  CHECK(back.source_name == r.source_name);
  CHECK(back.sender == r.sender);
  CHECK(back.recipients == r.recipients);
  CHECK(back.subject == r.subject);
  CHECK(back.decision.kind == r.decision.kind);
  CHECK(back.decision.label == r.decision.label);
  CHECK(back.decision.matched_rule_priority == r.decision.matched_rule_priority);
  CHECK(back.decision.matched_keyword == r.decision.matched_keyword);
  CHECK(back.decision.reason == r.decision.reason);
  REQUIRE(back.actions.size() == 1);
  CHECK(back.actions[0].kind == "move_to_label");
  CHECK(back.actions[0].target == "Work");
  CHECK(back.actions[0].ok);
  REQUIRE(back.attachment_records.size() == 1);
  CHECK(back.attachment_records[0].sha256 == r.attachment_records[0].sha256);
  CHECK(back.attachment_records[0].saved_path == r.attachment_records[0].saved_path);
  CHECK(back.attachment_records[0].bytes_written == 9);
  CHECK(back.attachment_records[0].category == "Useful/Resumes");
  CHECK(back.warnings == r.warnings);
}

TEST_CASE("audit json uses stable wire names") {
  const auto j = to_json(sample_record());
  CHECK(j.contains("batch_id"));
  CHECK(j.contains("unique_id"));
  CHECK(j.contains("timestamp"));
  CHECK(j.contains("decision"));
  CHECK(j["decision"]["kind"] == "route");
  CHECK(j["decision"]["reason"] == "keyword");
  CHECK(j["decision"]["label"] == "Work");
  CHECK(j["actions"][0]["kind"] == "move_to_label");
  CHECK(j["attachments"][0]["sha256"].is_string());
}

TEST_CASE("audit log appends one line per record and reads back in order") {
  oracle::TempDir tmp("audit");
  const auto file = tmp.path() / "batch.audit.jsonl";
  {
    AuditLog log(file);
    auto r = sample_record();
    log.append(r);
    r.unique_id = "B20260812T101530Z-1a2b-000002";
    r.decision.kind = DecisionKind::trash;
    r.decision.label.reset();
    r.decision.reason = DecisionReason::blocklist;
    log.append(r);
  }
  const auto text = oracle::read_file_text(file);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);

  const auto records = read_audit_log(file);
  REQUIRE(records.size() == 2);
  CHECK(records[0].unique_id.ends_with("000001"));
  CHECK(records[1].unique_id.ends_with("000002"));
  CHECK(records[1].decision.reason == DecisionReason::blocklist);

  // appending to an existing log keeps earlier lines
  {
    AuditLog log(file);
    log.append(sample_record());
  }
  CHECK(read_audit_log(file).size() == 3);
}

TEST_CASE("batch ids carry the utc stamp and four hex digits") {
  const auto tp = std::chrono::system_clock::from_time_t(1786529730);  // 2026-08-12
  const auto id = open_batch(tp);
  static const std::regex shape("B20260812T[0-9]{6}Z-[0-9a-f]{4}");
  CHECK(std::regex_match(id, shape));
  CHECK(id.substr(0, 16) == "B20260812T101530");
  // randomized suffix: collisions across calls should be rare
  CHECK(open_batch(tp).substr(0, 17) == id.substr(0, 17));
}

TEST_CASE("manual baseline arithmetic") {
  CHECK(manual_baseline(1) == doctest::Approx(78.0));
  CHECK(manual_baseline(9) == doctest::Approx(702.0));
  CHECK(manual_baseline(0) == doctest::Approx(0.0));
  CHECK(manual_baseline(10, 60.0) == doctest::Approx(600.0));
  // linear in the message count
  for (std::size_t n : {2u, 5u, 100u}) {
    CHECK(manual_baseline(n) == doctest::Approx(78.0 * static_cast<double>(n)));
  }
}

TEST_CASE("speedup ratio and its undefined cases") {
  auto s = compute_speedup(702.0, 75.0);
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(9.36));
  s = compute_speedup(78.0, 78.0);
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(1.0));
  CHECK(!compute_speedup(702.0, 0.0).has_value());
  CHECK(!compute_speedup(0.0, 10.0).has_value());
}

TEST_CASE("manifest loading and accuracy evaluation") {
  const auto manifest = load_manifest(R"({
    "m1.eml": "Work", "m2.eml": "Receipt", "m3.eml": "trash"
  })");
  CHECK(manifest.entries.size() == 3);

  auto mk = [](const std::string& name, DecisionKind kind,
               std::optional<std::string> label) {
    AuditRecord r;
    r.source_name = name;
    r.decision.kind = kind;
    r.decision.label = std::move(label);
    return r;
  };

  std::vector<AuditRecord> records{
      mk("m1.eml", DecisionKind::route, "Work"),
      mk("m2.eml", DecisionKind::route, "Receipt"),
      mk("m3.eml", DecisionKind::trash, std::nullopt),
  };
  auto result = evaluate_accuracy(records, manifest);
  CHECK(result.accuracy == doctest::Approx(1.0));
  CHECK(result.mismatches.empty());

  records[1] = mk("m2.eml", DecisionKind::trash, std::nullopt);
  result = evaluate_accuracy(records, manifest);
  CHECK(result.accuracy == doctest::Approx(2.0 / 3.0));
  REQUIRE(result.mismatches.size() == 1);
  CHECK(result.mismatches[0].name == "m2.eml");
  CHECK(result.mismatches[0].expected == "Receipt");
  CHECK(result.mismatches[0].actual == "trash");

  records.push_back(mk("stranger.eml", DecisionKind::keep, std::nullopt));
  CHECK_THROWS_AS(evaluate_accuracy(records, manifest), ManifestMismatch);
}

TEST_CASE("report json keeps the count partition and optional fields") {
  RunReport report;
  report.batch_id = "B20260812T101530Z-1a2b";
  report.fetched = 9;
  report.routed_counts = {{"Work", 3}, {"Receipt", 3}};
  report.trashed = 3;
  report.kept = 0;
  report.attachments_saved = 6;
  report.elapsed_seconds = 1.5;
  report.baseline_seconds = manual_baseline(report.fetched);
  report.speedup = compute_speedup(report.baseline_seconds, report.elapsed_seconds);
  report.errors = 0;
  report.dry_run = false;

  const auto j = to_json(report);
  CHECK(j["fetched"] == 9);
  CHECK(j["routed_counts"]["Work"] == 3);
  CHECK(j["routed_counts"]["Receipt"] == 3);
  CHECK(j["trashed"] == 3);
  CHECK(j["kept"] == 0);
  CHECK(j["baseline_seconds"] == doctest::Approx(702.0));
  CHECK(j["speedup"] == doctest::Approx(702.0 / 1.5));
  CHECK(j["dry_run"] == false);
  CHECK(!j.contains("accuracy"));

  std::size_t routed_total = 0;
  for (const auto& [label, n] : report.routed_counts) routed_total += n;
  CHECK(report.fetched == routed_total + report.trashed + report.kept);

  // speedup omitted entirely when undefined
  RunReport empty;
  empty.batch_id = "B-x";
  const auto je = to_json(empty);
  CHECK(!je.contains("speedup"));

  // accuracy present when evaluated
  report.accuracy = AccuracyResult{1.0, {}};
  const auto ja = to_json(report);
  CHECK(ja["accuracy"]["accuracy"] == doctest::Approx(1.0));
}

TEST_CASE("write_report produces parseable json on disk") {
  oracle::TempDir tmp("report");
  RunReport report;
  report.batch_id = "B20260812T101530Z-1a2b";
  report.fetched = 2;
  report.baseline_seconds = manual_baseline(2);
  const auto file = tmp.path() / (report.batch_id + ".report.json");
  write_report(report, file);
  const auto parsed = nlohmann::json::parse(oracle::read_file_text(file));
  CHECK(parsed["batch_id"] == report.batch_id);
  CHECK(parsed["baseline_seconds"] == doctest::Approx(156.0));
}
