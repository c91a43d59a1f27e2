// Acceptance gate: exercises the shipped binary behaviors end to end and
// prints one [PASS]/[FAIL] line per criterion. Exit code = failed criteria.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mailbot/audit.hpp"
#include "mailbot/config.hpp"
#include "mailbot/encoding.hpp"
#include "mailbot/fixture_store.hpp"
#include "mailbot/imap_server.hpp"
#include "mailbot/normalize.hpp"
#include "mailbot/rules.hpp"
#include "mailbot/run.hpp"
#include "support/oracle.hpp"
#include "support/testutil.hpp"

namespace fs = std::filesystem;
using namespace mailbot;

namespace {

struct Criterion {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  template <typename T, typename U>
  void expect_eq(const T& got, const U& want, const std::string& what) {
    if (!(got == static_cast<T>(want))) {
      std::ostringstream os;
      os << what << " (got " << got << ", want " << want << ")";
      problems.push_back(os.str());
    }
  }
};

int g_failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<void(Criterion&)>& body) {
  Criterion c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.problems.push_back(std::string("unexpected exception: ") + e.what());
  }
  if (c.problems.empty()) {
    std::cout << "[PASS] criterion " << number << ": " << name << "\n";
  } else {
    ++g_failures;
    std::cout << "[FAIL] criterion " << number << ": " << name << "\n";
    for (const auto& p : c.problems) std::cout << "       - " << p << "\n";
  }
  std::cout.flush();
}

std::size_t count_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) return 0;
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  return n;
}

// messages currently in a maildir folder (unseen + seen)
std::size_t count_messages(const fs::path& folder) {
  return count_files(folder / "new") + count_files(folder / "cur");
}

std::string random_case(std::string word, std::mt19937_64& rng) {
  for (char& ch : word) {
    if (rng() % 2)
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return word;
}

// Junk drawn from letters that cannot spell any built-in keyword.
std::string junk_word(std::mt19937_64& rng) {
  static const char safe[] = "xzqwkj0123456789";
  std::string w;
  const std::size_t len = 1 + rng() % 8;
  for (std::size_t i = 0; i < len; ++i) w += safe[rng() % (sizeof(safe) - 1)];
  return w;
}

oracle::Bytes random_bytes(std::size_t n, std::mt19937_64& rng) {
  oracle::Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

// ---------------------------------------------------------------------------
// criterion 1+2 share one execute run over the bundled nine-message corpus
// ---------------------------------------------------------------------------

struct CorpusRun {
  oracle::TempDir box{"acc-corpus"};
  oracle::TempDir work{"acc-corpus-work"};
  RunReport report;
  double wall_seconds = 0.0;
};

void execute_corpus_run(CorpusRun& r) {
  oracle::copy_tree(testutil::sample_inbox(), r.box.path());
  auto cfg = testutil::fixture_config(r.box.path(), r.work.path());
  cfg.run_mode = RunMode::execute;
  const auto t0 = std::chrono::steady_clock::now();
  r.report = run_pipeline(cfg, {"bot@example.com", "pw"});
  const auto t1 = std::chrono::steady_clock::now();
  r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
}

void criterion_workflow(Criterion& c, const CorpusRun& run) {
  const auto& box = run.box.path();
  const auto layout = run.work.path() / "layout";

  c.expect_eq(run.report.fetched, 9, "fetched message count");
  c.expect_eq(count_messages(box / "Work"), 3, "messages in Work");
  c.expect_eq(count_messages(box / "Receipt"), 3, "messages in Receipt");
  c.expect_eq(count_messages(box / "Trash"), 3, "messages in Trash");
  c.expect_eq(count_messages(box / "Inbox"), 0, "messages left in Inbox");

  c.expect_eq(count_files(layout / "Useful" / "Resumes"), 3, "files in Useful/Resumes");
  c.expect_eq(count_files(layout / "Useful" / "Bills"), 2, "files in Useful/Bills");
  c.expect_eq(count_files(layout / "Useful" / "Invoices"), 1, "files in Useful/Invoices");
  c.expect_eq(run.report.attachments_saved, 6, "attachments saved");
  c.expect_eq(count_files(layout / "Outbox"), 3, "invitation drafts in Outbox");

  c.expect(run.report.accuracy.has_value(), "accuracy was evaluated");
  if (run.report.accuracy)
    c.expect(run.report.accuracy->accuracy == 1.0, "accuracy is exactly 1.0");
  c.expect_eq(run.report.errors, 0, "errors");

  std::size_t routed_total = 0;
  for (const auto& [label, n] : run.report.routed_counts) routed_total += n;
  c.expect(run.report.fetched == routed_total + run.report.trashed + run.report.kept,
           "count partition fetched = routed + trashed + kept");

  c.expect(run.wall_seconds < 5.0,
           "run finished in under 5 s (took " + std::to_string(run.wall_seconds) + ")");
}

void criterion_baseline(Criterion& c, const CorpusRun& run) {
  c.expect(run.report.baseline_seconds == 702.0,
           "baseline_seconds is exactly 702 (got " +
               std::to_string(run.report.baseline_seconds) + ")");
  c.expect(run.report.elapsed_seconds > 0.0, "elapsed_seconds was recorded");
  c.expect(run.report.speedup.has_value(), "speedup was computed");
  if (run.report.speedup) {
    c.expect(*run.report.speedup > 1.0, "speedup on the local fixture exceeds 1");
    const double expected = run.report.baseline_seconds / run.report.elapsed_seconds;
    c.expect(std::abs(*run.report.speedup - expected) < 1e-9,
             "speedup equals baseline/elapsed");
  }

  // the survey figures: 78 s/email, 9 emails, 75 s of bot time
  c.expect(manual_baseline(9, 78.0) == 702.0, "manual baseline for nine emails is 702");
  const auto reference = compute_speedup(702.0, 75.0);
  c.expect(reference.has_value() && std::abs(*reference - 9.36) < 1e-12,
           "speedup of 702 s over 75 s evaluates to 9.36");
}

// ---------------------------------------------------------------------------
// criterion 3: byte fidelity across encodings and sizes
// ---------------------------------------------------------------------------

void criterion_byte_fidelity(Criterion& c) {
  oracle::TempDir box("acc-bytes");
  oracle::TempDir work("acc-bytes-work");
  ensure_fixture_folder(box.path(), "Inbox");

  std::mt19937_64 rng(20260825);
  const std::vector<std::size_t> sizes{
      0,      1,      2,      3,      5,       17,      64,      255,
      256,    1000,   1024,   4096,   9973,    16384,   65536,   131072,
      262144, 524287, 786432, 1048576};
  std::map<std::string, std::string> expected_sha;  // original filename -> hash

  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto payload = random_bytes(sizes[i], rng);
    char name[32];
    std::snprintf(name, sizeof(name), "payload%02zu.bin", i);
    expected_sha[name] = oracle::sha256_hex(payload);

    const bool use_b64 = i % 2 == 0;
    std::string eml;
    eml += "From: billing@vendor.example\r\n";
    eml += "To: triage@acmehr.example\r\n";
    char subject[64];
    std::snprintf(subject, sizeof(subject), "Invoice batch %02zu", i);
    eml += std::string("Subject: ") + subject + "\r\n";
    char date[64];
    std::snprintf(date, sizeof(date), "Date: %02zu Aug 2026 10:00:00 +0000\r\n",
                  1 + i);
    eml += date;
    eml += "MIME-Version: 1.0\r\n";
    eml += "Content-Type: multipart/mixed; boundary=\"fid\"\r\n\r\n";
    eml += "--fid\r\nContent-Type: text/plain\r\n\r\nsee attachment\r\n";
    eml += "--fid\r\n";
    eml += std::string("Content-Type: application/octet-stream; name=\"") + name +
           "\"\r\n";
    eml += std::string("Content-Disposition: attachment; filename=\"") + name +
           "\"\r\n";
    eml += std::string("Content-Transfer-Encoding: ") +
           (use_b64 ? "base64" : "quoted-printable") + "\r\n\r\n";
    eml += use_b64 ? oracle::base64_encode(payload) : oracle::qp_encode(payload);
    eml += "\r\n--fid--\r\n";

    char fname[32];
    std::snprintf(fname, sizeof(fname), "g%02zu.eml", i);
    oracle::write_file_text(box.path() / "Inbox" / "new" / fname, eml);
  }

  auto cfg = testutil::fixture_config(box.path(), work.path(), /*with_manifest=*/false);
  cfg.run_mode = RunMode::execute;
  cfg.store.top = sizes.size();
  const auto report = run_pipeline(cfg, {"bot@example.com", "pw"});

  c.expect_eq(report.fetched, sizes.size(), "fetched all generated messages");
  c.expect_eq(report.attachments_saved, sizes.size(), "saved all attachments");
  c.expect_eq(report.errors, 0, "errors");

  const auto audit_file = fs::path(cfg.report_dir) / (report.batch_id + ".audit.jsonl");
  const auto records = read_audit_log(audit_file);
  std::set<std::string> seen;
  for (const auto& rec : records) {
    for (const auto& att : rec.attachment_records) {
      const auto it = expected_sha.find(att.original_filename);
      if (it == expected_sha.end()) {
        c.problems.push_back("unexpected attachment " + att.original_filename);
        continue;
      }
      seen.insert(att.original_filename);
      // independent re-hash of the bytes on disk, zero tolerance
      const auto on_disk = oracle::read_file_bytes(att.saved_path);
      const auto disk_sha = oracle::sha256_hex(on_disk);
      if (disk_sha != it->second)
        c.problems.push_back("hash mismatch for " + att.original_filename);
      if (att.sha256 != it->second)
        c.problems.push_back("audit hash mismatch for " + att.original_filename);
    }
  }
  c.expect_eq(seen.size(), expected_sha.size(), "every payload accounted for");
}

// ---------------------------------------------------------------------------
// criterion 4: wire protocol run matches the direct-fixture run
// ---------------------------------------------------------------------------

void criterion_protocol(Criterion& c) {
  oracle::TempDir wire_box("acc-wire");
  oracle::TempDir disk_box("acc-disk");
  oracle::TempDir wire_work("acc-wire-work");
  oracle::TempDir disk_work("acc-disk-work");
  oracle::copy_tree(testutil::sample_inbox(), wire_box.path());
  oracle::copy_tree(testutil::sample_inbox(), disk_box.path());

  LoopbackImapServer::Options opts;
  opts.fixture_root = wire_box.path();
  LoopbackImapServer server(opts);
  server.start();

  // Manifests key on fixture file names; over the wire messages are known by
  // UID, so accuracy scoring is skipped on both sides of the comparison.
  auto wire_cfg = testutil::fixture_config(wire_box.path(), wire_work.path(),
                                           /*with_manifest=*/false);
  wire_cfg.store.mode = StoreMode::loopback_plain;
  wire_cfg.store.fixture_root.clear();
  wire_cfg.store.server = "127.0.0.1";
  wire_cfg.store.port = server.port();
  wire_cfg.run_mode = RunMode::execute;

  auto disk_cfg = testutil::fixture_config(disk_box.path(), disk_work.path(),
                                           /*with_manifest=*/false);
  disk_cfg.run_mode = RunMode::execute;

  const auto wire_report = run_pipeline(wire_cfg, {"bot@example.com", "loopback-secret"});
  server.stop();
  const auto disk_report = run_pipeline(disk_cfg, {"bot@example.com", "pw"});

  c.expect_eq(wire_report.fetched, 9, "wire run fetched nine messages");
  c.expect_eq(wire_report.errors, 0, "wire run errors");
  c.expect_eq(disk_report.errors, 0, "direct run errors");
  c.expect(wire_report.routed_counts == disk_report.routed_counts,
           "routed counts agree");

  const auto wire_tree = oracle::dir_hash(wire_box.path());
  const auto disk_tree = oracle::dir_hash(disk_box.path());
  c.expect(!wire_tree.empty(), "wire mailbox tree exists");
  c.expect(wire_tree == disk_tree, "final mailbox trees are identical");

  const auto wire_useful = oracle::dir_hash(wire_work.path() / "layout" / "Useful");
  const auto disk_useful = oracle::dir_hash(disk_work.path() / "layout" / "Useful");
  c.expect(wire_useful == disk_useful, "saved attachment trees are identical");
}

// ---------------------------------------------------------------------------
// criterion 5: determinism across dry runs, idempotence across execute runs
// ---------------------------------------------------------------------------

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  if (from.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

// One audit log as comparable lines: timestamps blanked, batch id replaced.
std::vector<std::string> normalized_audit(const fs::path& file) {
  std::vector<std::string> out;
  for (const auto& rec : read_audit_log(file)) {
    auto j = to_json(rec);
    j["timestamp"] = "T";
    out.push_back(replace_all(j.dump(), rec.batch_id, "BATCH"));
  }
  return out;
}

nlohmann::json normalized_report(const fs::path& file) {
  auto j = nlohmann::json::parse(oracle::read_file_text(file));
  const std::string batch = j.value("batch_id", "");
  j.erase("batch_id");
  j.erase("elapsed_seconds");
  if (j.contains("speedup")) j.erase("speedup");
  return nlohmann::json::parse(replace_all(j.dump(), batch, "BATCH"));
}

void criterion_determinism(Criterion& c) {
  // (a) two consecutive dry runs over the same mailbox
  oracle::TempDir box("acc-det");
  oracle::TempDir work("acc-det-work");
  oracle::copy_tree(testutil::sample_inbox(), box.path());

  auto cfg1 = testutil::fixture_config(box.path(), work.path());
  cfg1.report_dir = work.path() / "reports1";
  auto cfg2 = testutil::fixture_config(box.path(), work.path());
  cfg2.report_dir = work.path() / "reports2";

  const auto r1 = run_pipeline(cfg1, {"bot@example.com", "pw"});
  const auto r2 = run_pipeline(cfg2, {"bot@example.com", "pw"});

  const auto audit1 =
      normalized_audit(fs::path(cfg1.report_dir) / (r1.batch_id + ".audit.jsonl"));
  const auto audit2 =
      normalized_audit(fs::path(cfg2.report_dir) / (r2.batch_id + ".audit.jsonl"));
  c.expect(!audit1.empty(), "first dry run produced audit records");
  c.expect(audit1 == audit2, "audit logs agree after erasing time and batch ids");

  const auto rep1 =
      normalized_report(fs::path(cfg1.report_dir) / (r1.batch_id + ".report.json"));
  const auto rep2 =
      normalized_report(fs::path(cfg2.report_dir) / (r2.batch_id + ".report.json"));
  c.expect(rep1 == rep2, "reports agree after erasing time and batch ids");

  // (b) an execute run followed by a second execute run fetches nothing
  oracle::TempDir box2("acc-idem");
  oracle::TempDir work2("acc-idem-work");
  oracle::copy_tree(testutil::sample_inbox(), box2.path());
  auto exec_cfg = testutil::fixture_config(box2.path(), work2.path());
  exec_cfg.run_mode = RunMode::execute;
  const auto first = run_pipeline(exec_cfg, {"bot@example.com", "pw"});
  c.expect_eq(first.fetched, 9, "first execute run fetched the corpus");

  auto exec_cfg2 = testutil::fixture_config(box2.path(), work2.path());
  exec_cfg2.run_mode = RunMode::execute;
  const auto second = run_pipeline(exec_cfg2, {"bot@example.com", "pw"});
  c.expect_eq(second.fetched, 0, "second execute run fetched nothing");
}

// ---------------------------------------------------------------------------
// criterion 6: randomized property suites, >= 1000 cases each
// ---------------------------------------------------------------------------

void criterion_properties(Criterion& c) {
  constexpr int kCases = 1000;
  std::mt19937_64 rng(424242);
  const auto bundle = default_rules();

  // (a) a subject carrying exactly one keyword routes to that rule's label
  {
    struct Owned {
      std::string keyword;
      std::string label;
    };
    std::vector<Owned> owned;
    for (const auto& rule : bundle.ruleset.rules)
      for (const auto& kw : rule.keywords) owned.push_back({kw, rule.label});
    int bad = 0;
    for (int i = 0; i < kCases; ++i) {
      const auto& pick = owned[rng() % owned.size()];
      std::string subject;
      const std::size_t words = rng() % 4;
      for (std::size_t w = 0; w < words; ++w) subject += junk_word(rng) + " ";
      subject += random_case(pick.keyword, rng);
      for (std::size_t w = 0, n = rng() % 4; w < n; ++w)
        subject += " " + junk_word(rng);
      ParsedMessage m;
      m.subject = subject;
      m.sender = junk_word(rng) + "@example.com";
      const auto d = classify_message(m, bundle.ruleset, {});
      if (d.kind != DecisionKind::route || d.label != pick.label) ++bad;
    }
    c.expect_eq(bad, 0, "keyword routing property violations");
  }

  // (b) partition identity over a generated thousand-message mailbox
  {
    oracle::TempDir box("acc-part");
    oracle::TempDir work("acc-part-work");
    ensure_fixture_folder(box.path(), "Inbox");
    oracle::write_file_text(
        work.path() / "rules.json",
        R"({"rules": [
              {"label": "Work", "keywords": ["resume"], "priority": 1},
              {"label": "Receipt", "keywords": ["bill", "invoice"], "priority": 2}],
            "default_action": "keep"})");
    oracle::write_file_text(work.path() / "blocklist.txt", "blocked@bad.example\n");

    const char* keywords[] = {"resume", "bill", "invoice"};
    for (int i = 0; i < kCases; ++i) {
      std::string subject = junk_word(rng);
      if (rng() % 3 == 0) subject += " " + random_case(keywords[rng() % 3], rng);
      const std::string sender =
          rng() % 4 == 0 ? "blocked@bad.example" : junk_word(rng) + "@ok.example";
      char date[64];
      std::snprintf(date, sizeof(date), "%02d Aug 2026 %02d:%02d:00 +0000",
                    static_cast<int>(1 + rng() % 28), static_cast<int>(rng() % 24),
                    static_cast<int>(rng() % 60));
      char name[32];
      std::snprintf(name, sizeof(name), "p%04d.eml", i);
      oracle::write_file_text(box.path() / "Inbox" / "new" / name,
                              testutil::simple_eml(sender, subject, date, "body"));
    }

    auto cfg = testutil::fixture_config(box.path(), work.path(), false);
    cfg.rules_path = work.path() / "rules.json";
    cfg.blocklist_path = work.path() / "blocklist.txt";
    cfg.store.top = kCases;
    const auto report = run_pipeline(cfg, {"bot@example.com", "pw"});

    c.expect_eq(report.fetched, kCases, "fetched the generated mailbox");
    std::size_t routed_total = 0;
    for (const auto& [label, n] : report.routed_counts) routed_total += n;
    c.expect(report.fetched == routed_total + report.trashed + report.kept,
             "fetched = routed + trashed + kept");
    c.expect(routed_total > 0 && report.trashed > 0 && report.kept > 0,
             "all three outcomes occurred");
  }

  // (c) blocklisted senders are trashed no matter what the subject says
  {
    SenderBlocklist bl;
    std::vector<std::string> bad_senders;
    for (int i = 0; i < 50; ++i) {
      const auto addr = junk_word(rng) + "@" + junk_word(rng) + ".example";
      bl.addresses.insert(ascii_lower(addr));
      bad_senders.push_back(addr);
    }
    const char* keywords[] = {"resume", "bill", "invoice"};
    int bad = 0;
    for (int i = 0; i < kCases; ++i) {
      ParsedMessage m;
      m.sender = random_case(bad_senders[rng() % bad_senders.size()], rng);
      m.subject = std::string(keywords[rng() % 3]) + " " + junk_word(rng);
      const auto d = classify_message(m, bundle.ruleset, bl);
      if (d.kind != DecisionKind::trash || d.reason != DecisionReason::blocklist) ++bad;
    }
    c.expect_eq(bad, 0, "blocklist dominance violations");
  }

  // (d) normalize_text is idempotent
  {
    const char* tokens[] = {"Hello",    "WORLD",  "&amp;",  "&lt;",     "&gt;",
                            "&amp;lt;", "<b>",    "</b>",   "<br/>",    "caf\xc3\xa9",
                            "\xff",     "  ",     "\t",     "R\xc3\xa9sum\xc3\xa9",
                            "a&b<c>",   "&quot;", "&apos;", "x"};
    int bad = 0;
    for (int i = 0; i < kCases; ++i) {
      std::string text;
      for (std::size_t t = 0, n = rng() % 12; t < n; ++t)
        text += tokens[rng() % (sizeof(tokens) / sizeof(tokens[0]))];
      const auto once = normalize_text(text);
      const auto twice = normalize_text(once.text);
      if (once.text != twice.text) ++bad;
    }
    c.expect_eq(bad, 0, "normalize idempotence violations");
  }

  // (e) transfer encodings round-trip against the reference codecs
  {
    int bad = 0;
    for (int i = 0; i < kCases; ++i) {
      const auto payload = random_bytes(rng() % 2048, rng);
      const std::vector<std::uint8_t> want(payload.begin(), payload.end());

      const auto ours_b64 = encode_base64(payload);
      const auto oracle_b64 = oracle::base64_decode(ours_b64);
      if (!oracle_b64 || *oracle_b64 != payload) ++bad;
      if (decode_transfer_encoding(oracle::base64_encode(payload),
                                   TransferEncoding::base64) != want)
        ++bad;

      const auto ours_qp = encode_quoted_printable(payload);
      const auto oracle_qp = oracle::qp_decode(ours_qp);
      if (!oracle_qp || *oracle_qp != payload) ++bad;
      if (decode_transfer_encoding(oracle::qp_encode(payload),
                                   TransferEncoding::quoted_printable) != want)
        ++bad;
    }
    c.expect_eq(bad, 0, "encoding round-trip violations");
  }
}

// ---------------------------------------------------------------------------
// criterion 7: credential safety and dry-run purity
// ---------------------------------------------------------------------------

void criterion_safety(Criterion& c) {
  const std::string password = "S3cr3t-Hunter2-0xDEADBEEF";

  // (a) full wire run with tracing on; the password must not appear in any
  // output the run produced
  {
    oracle::TempDir box("acc-safe");
    oracle::TempDir work("acc-safe-work");
    oracle::copy_tree(testutil::sample_inbox(), box.path());

    LoopbackImapServer::Options opts;
    opts.fixture_root = box.path();
    opts.password = password;
    LoopbackImapServer server(opts);
    server.start();

    auto cfg = testutil::fixture_config(box.path(), work.path(),
                                        /*with_manifest=*/false);
    cfg.store.mode = StoreMode::loopback_plain;
    cfg.store.fixture_root.clear();
    cfg.store.server = "127.0.0.1";
    cfg.store.port = server.port();
    cfg.store.trace_path = work.path() / "wire.trace";
    cfg.run_mode = RunMode::execute;

    const auto report = run_pipeline(cfg, {"bot@example.com", password});
    server.stop();
    c.expect_eq(report.errors, 0, "wire run errors");

    std::size_t scanned = 0;
    std::vector<fs::path> roots{cfg.store.trace_path, cfg.report_dir};
    for (const auto& root : roots) {
      if (fs::is_directory(root)) {
        for (const auto& e : fs::recursive_directory_iterator(root)) {
          if (!e.is_regular_file()) continue;
          ++scanned;
          if (oracle::read_file_text(e.path()).find(password) != std::string::npos)
            c.problems.push_back("password leaked into " + e.path().string());
        }
      } else if (fs::is_regular_file(root)) {
        ++scanned;
        if (oracle::read_file_text(root).find(password) != std::string::npos)
          c.problems.push_back("password leaked into " + root.string());
      }
    }
    c.expect(scanned >= 3, "trace, audit and report files were all scanned");

    const auto trace = oracle::read_file_text(cfg.store.trace_path);
    c.expect(trace.find("LOGIN") != std::string::npos, "trace captured the login");
    c.expect(trace.find("<redacted>") != std::string::npos,
             "trace shows the redaction placeholder");
  }

  // (b) a dry run leaves both the mailbox and the layout untouched
  {
    oracle::TempDir box("acc-pure");
    oracle::TempDir work("acc-pure-work");
    oracle::copy_tree(testutil::sample_inbox(), box.path());
    const auto before = oracle::dir_hash(box.path());

    auto cfg = testutil::fixture_config(box.path(), work.path());
    const auto report = run_pipeline(cfg, {"bot@example.com", "pw"});
    c.expect_eq(report.fetched, 9, "dry run fetched the corpus");
    c.expect(report.dry_run, "report is flagged dry_run");

    c.expect(oracle::dir_hash(box.path()) == before, "mailbox tree is unchanged");
    c.expect(!fs::exists(work.path() / "layout"), "layout root was never created");

    // only the report directory may exist, holding audit + report
    c.expect(fs::is_directory(cfg.report_dir), "report directory exists");
    c.expect_eq(count_files(cfg.report_dir), 2, "report dir holds audit + report only");
  }
}

}  // namespace

int main() {
  CorpusRun corpus;
  execute_corpus_run(corpus);

  run_criterion(1, "workflow reproduction on the bundled corpus",
                [&](Criterion& c) { criterion_workflow(c, corpus); });
  run_criterion(2, "baseline and speedup metrics",
                [&](Criterion& c) { criterion_baseline(c, corpus); });
  run_criterion(3, "attachment byte fidelity", criterion_byte_fidelity);
  run_criterion(4, "wire protocol matches direct mailbox access", criterion_protocol);
  run_criterion(5, "determinism and idempotence", criterion_determinism);
  run_criterion(6, "randomized property suites", criterion_properties);
  run_criterion(7, "credential safety and dry-run purity", criterion_safety);

  if (g_failures == 0) {
    std::cout << "all acceptance criteria passed\n";
  } else {
    std::cout << g_failures << " acceptance criteria failed\n";
  }
  return g_failures;
}
