#include "mailbot/fixture_store.hpp"

#include <algorithm>
#include <fstream>

#include "mailbot/normalize.hpp"

namespace mailbot {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw StoreError("cannot read " + p.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

// Cheap header peek: the Date line (with folding) without a full MIME parse,
// tolerant of files a full parse would reject.
std::optional<std::string> peek_date_header(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::string line;
  std::optional<std::string> date;
  bool in_date = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;  // end of header block
    if (line.front() == ' ' || line.front() == '\t') {
      if (in_date && date) *date += line;
      continue;
    }
    in_date = false;
    const std::string low = ascii_lower(line.substr(0, 5));
    if (low == "date:") {
      date = line.substr(5);
      in_date = true;
    }
  }
  return date;
}

std::chrono::system_clock::time_point file_mtime(const fs::path& p) {
  std::error_code ec;
  const auto ft = fs::last_write_time(p, ec);
  if (ec) return {};
  return std::chrono::time_point_cast<std::chrono::system_clock::duration>(
      std::chrono::file_clock::to_sys(ft));
}

}  // namespace

void ensure_fixture_folder(const fs::path& root, const std::string& folder) {
  for (const char* sub : {"new", "cur", "tmp"}) {
    std::error_code ec;
    fs::create_directories(root / folder / sub, ec);
    if (ec)
      throw StoreError("cannot create fixture folder " + (root / folder / sub).string() + ": " +
                       ec.message());
  }
}

std::vector<FixtureEntry> scan_fixture_folder(const fs::path& root, const std::string& folder) {
  std::vector<FixtureEntry> entries;
  for (const char* sub : {"new", "cur"}) {
    const fs::path dir = root / folder / sub;
    if (!fs::is_directory(dir)) continue;
    for (const auto& item : fs::directory_iterator(dir)) {
      if (!item.is_regular_file()) continue;
      FixtureEntry entry;
      entry.name = item.path().filename().string();
      entry.path = item.path();
      entry.seen = std::string(sub) == "cur";
      if (const auto hdr = peek_date_header(item.path())) {
        if (const auto parsed = parse_date(*hdr)) entry.date = *parsed;
      }
      entries.push_back(std::move(entry));
    }
  }
  // Newest first; ties broken by name so fixture and loopback agree exactly.
  std::sort(entries.begin(), entries.end(), [](const FixtureEntry& a, const FixtureEntry& b) {
    if (a.date != b.date) return a.date > b.date;
    return a.name > b.name;
  });
  return entries;
}

FixtureSession::FixtureSession(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) throw StoreError("fixture root does not exist: " + root_.string());
}

fs::path FixtureSession::folder_dir(const std::string& folder) const { return root_ / folder; }

FolderSummary FixtureSession::select_folder(const std::string& folder) {
  if (folder.empty() || !fs::is_directory(folder_dir(folder)))
    throw NoSuchFolder("no such folder: " + folder);
  folder_ = folder;
  FolderSummary summary;
  for (const FixtureEntry& e : scan_fixture_folder(root_, folder_)) {
    ++summary.total;
    if (!e.seen) ++summary.unseen;
  }
  return summary;
}

std::vector<FetchedMessage> FixtureSession::fetch_unseen_top(std::size_t top) {
  if (folder_.empty()) throw StoreError("no folder selected");
  std::vector<FetchedMessage> out;
  for (const FixtureEntry& entry : scan_fixture_folder(root_, folder_)) {
    if (entry.seen) continue;
    if (out.size() >= top) break;
    FetchedMessage m;
    m.handle = MessageHandle{entry.name, folder_, false};
    try {
      m.raw.bytes = read_file_bytes(entry.path);
    } catch (const StoreError& e) {
      throw FetchFailure(e.what());
    }
    m.raw.source_handle = entry.name;
    m.received = entry.date != std::chrono::system_clock::time_point{} ? entry.date
                                                                       : file_mtime(entry.path);
    out.push_back(std::move(m));
  }
  return out;
}

fs::path FixtureSession::locate(const MessageHandle& handle) const {
  for (const char* sub : {"new", "cur"}) {
    const fs::path p = root_ / handle.folder / sub / handle.store_uid;
    if (fs::exists(p)) return p;
  }
  throw ActionFailure("message not present in store: " + handle.folder + "/" + handle.store_uid);
}

void FixtureSession::apply_action(const StoreAction& action) {
  const fs::path source = locate(action.handle);
  // Any folder we mutate ends up as a complete maildir triad; the wire path
  // leaves the same shape behind, so trees stay comparable across backends.
  ensure_fixture_folder(root_, action.handle.folder);

  auto unique_target = [](const fs::path& dir, const std::string& name) {
    fs::path target = dir / name;
    for (int k = 1; fs::exists(target); ++k)
      target = dir / (name + "." + std::to_string(k));
    return target;
  };

  std::error_code ec;
  switch (action.kind) {
    case ActionKind::mark_seen: {
      const fs::path cur = root_ / action.handle.folder / "cur";
      if (source.parent_path().filename() == "cur") return;  // already seen
      fs::rename(source, unique_target(cur, action.handle.store_uid), ec);
      if (ec) throw ActionFailure("mark_seen failed: " + ec.message());
      return;
    }
    case ActionKind::move_to_label:
    case ActionKind::move_to_trash: {
      const std::string target_folder =
          !action.target.empty() ? action.target
                                 : (action.kind == ActionKind::move_to_trash ? "Trash" : "");
      if (target_folder.empty()) throw ActionFailure("move_to_label requires a target folder");
      ensure_fixture_folder(root_, target_folder);
      // A moved message has been handled: it lands seen, under cur/.
      const fs::path dest_dir = root_ / target_folder / "cur";
      fs::rename(source, unique_target(dest_dir, action.handle.store_uid), ec);
      if (ec) throw ActionFailure("move failed: " + ec.message());
      return;
    }
  }
  throw ActionFailure("unknown action kind");
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::move_to_label: return "move_to_label";
    case ActionKind::move_to_trash: return "move_to_trash";
    case ActionKind::mark_seen: return "mark_seen";
  }
  return "?";
}

}  // namespace mailbot
