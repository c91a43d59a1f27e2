#include "mailbot/imap_server.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <vector>

#include "mailbot/fixture_store.hpp"
#include "mailbot/store.hpp"

namespace mailbot {

namespace {

namespace fs = std::filesystem;

constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string internal_date(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%02d-%s-%04d %02d:%02d:%02d +0000", tm.tm_mday,
                kMonths[tm.tm_mon], tm.tm_year + 1900, tm.tm_hour, tm.tm_min,
                tm.tm_sec);
  return buf;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  bool have = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '\\' && i + 1 < line.size()) {
        cur += line[++i];
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      have = true;
    } else if (c == ' ') {
      if (have || !cur.empty()) {
        out.push_back(cur);
        cur.clear();
        have = false;
      }
    } else {
      cur += c;
      have = true;
    }
  }
  if (have || !cur.empty()) out.push_back(cur);
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

struct Entry {
  std::uint32_t uid = 0;
  std::string name;
  fs::path path;
  bool seen = false;
  bool deleted = false;
  std::chrono::system_clock::time_point date{};
};

// "1,3:5,9" -> uids
std::vector<std::uint32_t> parse_uid_set(const std::string& set, std::uint32_t max_uid) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos < set.size()) {
    std::size_t comma = set.find(',', pos);
    if (comma == std::string::npos) comma = set.size();
    const std::string item = set.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    auto value = [&](const std::string& s) -> std::uint32_t {
      if (s == "*") return max_uid;
      return static_cast<std::uint32_t>(std::stoul(s));
    };
    if (colon == std::string::npos) {
      out.push_back(value(item));
    } else {
      std::uint32_t lo = value(item.substr(0, colon));
      std::uint32_t hi = value(item.substr(colon + 1));
      if (lo > hi) std::swap(lo, hi);
      for (std::uint32_t u = lo; u <= hi; ++u) out.push_back(u);
    }
    pos = comma + 1;
  }
  return out;
}

fs::path unique_target(const fs::path& dir, const std::string& name) {
  fs::path candidate = dir / name;
  for (int k = 1; fs::exists(candidate); ++k)
    candidate = dir / (name + "." + std::to_string(k));
  return candidate;
}

class Session {
 public:
  Session(net::Socket socket, const LoopbackImapServer::Options& opts)
      : socket_(std::move(socket)), reader_(socket_), opts_(opts) {}

  void run() {
    send("* OK [CAPABILITY IMAP4rev1" + std::string(opts_.enable_move ? " MOVE" : "") +
         "] loopback ready\r\n");
    for (;;) {
      std::string line;
      try {
        line = reader_.read_line();
      } catch (const net::SocketError&) {
        return;  // peer went away
      }
      auto tokens = tokenize(line);
      if (tokens.empty()) continue;
      const std::string tag = tokens[0];
      if (tokens.size() < 2) {
        send(tag + " BAD missing command\r\n");
        continue;
      }
      std::string cmd = upper(tokens[1]);
      std::size_t arg0 = 2;
      if (cmd == "UID" && tokens.size() >= 3) {
        cmd = "UID " + upper(tokens[2]);
        arg0 = 3;
      }
      try {
        if (!dispatch(tag, cmd, tokens, arg0, line)) return;
      } catch (const net::SocketError&) {
        return;
      } catch (const std::exception& e) {
        send(tag + " BAD " + std::string(e.what()) + "\r\n");
      }
    }
  }

 private:
  void send(const std::string& data) { socket_.send_all(data); }

  // false = close the connection
  bool dispatch(const std::string& tag, const std::string& cmd,
                const std::vector<std::string>& args, std::size_t arg0,
                const std::string& line) {
    if (cmd == "CAPABILITY") {
      send("* CAPABILITY IMAP4rev1" + std::string(opts_.enable_move ? " MOVE" : "") +
           "\r\n" + tag + " OK CAPABILITY completed\r\n");
      return true;
    }
    if (cmd == "NOOP") {
      send(tag + " OK NOOP completed\r\n");
      return true;
    }
    if (cmd == "LOGOUT") {
      send("* BYE logging out\r\n" + tag + " OK LOGOUT completed\r\n");
      return false;
    }
    if (cmd == "LOGIN") {
      if (args.size() < arg0 + 2) {
        send(tag + " BAD LOGIN expects user and password\r\n");
        return true;
      }
      if (args[arg0] == opts_.user && args[arg0 + 1] == opts_.password) {
        authenticated_ = true;
        send(tag + " OK LOGIN completed\r\n");
      } else {
        send(tag + " NO [AUTHENTICATIONFAILED] invalid credentials\r\n");
      }
      return true;
    }
    if (!authenticated_) {
      send(tag + " NO not authenticated\r\n");
      return true;
    }
    if (cmd == "LIST") {
      for (const auto& dir : fs::directory_iterator(opts_.fixture_root)) {
        if (!dir.is_directory()) continue;
        if (!fs::exists(dir.path() / "new") && !fs::exists(dir.path() / "cur")) continue;
        send("* LIST (\\HasNoChildren) \"/\" \"" + dir.path().filename().string() +
             "\"\r\n");
      }
      send(tag + " OK LIST completed\r\n");
      return true;
    }
    if (cmd == "CREATE") {
      if (args.size() <= arg0) {
        send(tag + " BAD CREATE expects a folder\r\n");
        return true;
      }
      ensure_fixture_folder(opts_.fixture_root, args[arg0]);
      send(tag + " OK CREATE completed\r\n");
      return true;
    }
    if (cmd == "SELECT") {
      if (args.size() <= arg0) {
        send(tag + " BAD SELECT expects a folder\r\n");
        return true;
      }
      return select(tag, args[arg0]);
    }
    if (!selected_) {
      send(tag + " NO no folder selected\r\n");
      return true;
    }
    if (cmd == "UID SEARCH") {
      // only "UID SEARCH UNSEEN" is understood
      std::string reply = "* SEARCH";
      for (const Entry& e : entries_)
        if (!e.seen) reply += " " + std::to_string(e.uid);
      send(reply + "\r\n" + tag + " OK UID SEARCH completed\r\n");
      return true;
    }
    if (cmd == "UID FETCH") {
      if (args.size() <= arg0) {
        send(tag + " BAD UID FETCH expects a set\r\n");
        return true;
      }
      const auto uids = parse_uid_set(args[arg0], max_uid());
      const bool want_body = upper(line).find("BODY.PEEK[]") != std::string::npos;
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        Entry& e = entries_[i];
        if (std::find(uids.begin(), uids.end(), e.uid) == uids.end()) continue;
        const std::string seq = std::to_string(i + 1);
        if (want_body) {
          std::ifstream in(e.path, std::ios::binary);
          std::string bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
          send("* " + seq + " FETCH (UID " + std::to_string(e.uid) + " BODY[] {" +
               std::to_string(bytes.size()) + "}\r\n");
          send(bytes);
          send(")\r\n");
        } else {
          send("* " + seq + " FETCH (UID " + std::to_string(e.uid) +
               " INTERNALDATE \"" + internal_date(e.date) + "\")\r\n");
        }
      }
      send(tag + " OK UID FETCH completed\r\n");
      return true;
    }
    if (cmd == "UID STORE") {
      if (args.size() <= arg0) {
        send(tag + " BAD UID STORE expects a set\r\n");
        return true;
      }
      const auto uids = parse_uid_set(args[arg0], max_uid());
      const std::string rest = upper(line);
      const bool set_seen = rest.find("\\SEEN") != std::string::npos;
      const bool set_deleted = rest.find("\\DELETED") != std::string::npos;
      for (Entry& e : entries_) {
        if (std::find(uids.begin(), uids.end(), e.uid) == uids.end()) continue;
        if (set_seen && !e.seen) mark_seen(e);
        if (set_deleted) e.deleted = true;
      }
      send(tag + " OK UID STORE completed\r\n");
      return true;
    }
    if (cmd == "UID COPY" || cmd == "UID MOVE") {
      const bool moving = cmd == "UID MOVE";
      if (moving && !opts_.enable_move) {
        send(tag + " BAD MOVE not supported\r\n");
        return true;
      }
      if (args.size() < arg0 + 2) {
        send(tag + " BAD expects a set and a folder\r\n");
        return true;
      }
      const auto uids = parse_uid_set(args[arg0], max_uid());
      const std::string& target = args[arg0 + 1];
      const fs::path target_dir = opts_.fixture_root / target;
      if (!fs::exists(target_dir / "new") && !fs::exists(target_dir / "cur")) {
        send(tag + " NO [TRYCREATE] no such folder " + target + "\r\n");
        return true;
      }
      ensure_fixture_folder(opts_.fixture_root, target);
      std::vector<std::size_t> moved_seqs;
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        Entry& e = entries_[i];
        if (std::find(uids.begin(), uids.end(), e.uid) == uids.end()) continue;
        const fs::path dest_dir = target_dir / (e.seen ? "cur" : "new");
        const fs::path dest = unique_target(dest_dir, e.name);
        if (moving) {
          fs::rename(e.path, dest);
          moved_seqs.push_back(i);
        } else {
          fs::copy_file(e.path, dest);
        }
      }
      // moved messages leave the mailbox; report the shifting sequence numbers
      for (std::size_t k = 0; k < moved_seqs.size(); ++k)
        send("* " + std::to_string(moved_seqs[k] + 1 - k) + " EXPUNGE\r\n");
      for (auto it = moved_seqs.rbegin(); it != moved_seqs.rend(); ++it)
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(*it));
      send(tag + " OK " + (moving ? "MOVE" : "COPY") + " completed\r\n");
      return true;
    }
    if (cmd == "EXPUNGE") {
      for (std::size_t i = 0; i < entries_.size();) {
        if (entries_[i].deleted) {
          std::error_code ec;
          fs::remove(entries_[i].path, ec);
          send("* " + std::to_string(i + 1) + " EXPUNGE\r\n");
          entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
          ++i;
        }
      }
      send(tag + " OK EXPUNGE completed\r\n");
      return true;
    }
    send(tag + " BAD unsupported command\r\n");
    return true;
  }

  bool select(const std::string& tag, const std::string& folder) {
    const fs::path dir = opts_.fixture_root / folder;
    if (!fs::exists(dir / "new") && !fs::exists(dir / "cur")) {
      send(tag + " NO no such folder " + folder + "\r\n");
      return true;
    }
    entries_.clear();
    auto scanned = scan_fixture_folder(opts_.fixture_root, folder);
    // UIDs follow ascending file name order, so newest-first UID ordering
    // matches the fixture session's name tie-break.
    std::sort(scanned.begin(), scanned.end(),
              [](const FixtureEntry& a, const FixtureEntry& b) { return a.name < b.name; });
    std::uint32_t uid = 0;
    for (const FixtureEntry& fe : scanned) {
      Entry e;
      e.uid = ++uid;
      e.name = fe.name;
      e.path = fe.path;
      e.seen = fe.seen;
      e.date = fe.date;
      entries_.push_back(std::move(e));
    }
    selected_ = true;
    send("* " + std::to_string(entries_.size()) + " EXISTS\r\n");
    send("* OK [UIDVALIDITY 1] UIDs valid\r\n");
    send(tag + " OK [READ-WRITE] SELECT completed\r\n");
    return true;
  }

  void mark_seen(Entry& e) {
    const fs::path folder = e.path.parent_path().parent_path();
    // A mutated folder always ends up as a complete maildir triad, the same
    // shape the offline store leaves behind.
    for (const char* sub : {"new", "cur", "tmp"}) fs::create_directories(folder / sub);
    if (e.path.parent_path().filename() == "cur") {
      e.seen = true;
      return;
    }
    const fs::path dest = unique_target(folder / "cur", e.name);
    fs::rename(e.path, dest);
    e.path = dest;
    e.name = dest.filename().string();
    e.seen = true;
  }

  std::uint32_t max_uid() const {
    std::uint32_t m = 0;
    for (const Entry& e : entries_) m = std::max(m, e.uid);
    return m;
  }

  net::Socket socket_;
  net::LineReader reader_;
  const LoopbackImapServer::Options& opts_;
  bool authenticated_ = false;
  bool selected_ = false;
  std::vector<Entry> entries_;
};

}  // namespace

LoopbackImapServer::LoopbackImapServer(Options opts) : opts_(std::move(opts)) {}

LoopbackImapServer::~LoopbackImapServer() { stop(); }

void LoopbackImapServer::start() {
  try {
    listener_ = net::Listener::bind_loopback(opts_.port);
  } catch (const net::SocketError& e) {
    throw PortInUse(std::string("cannot bind loopback port: ") + e.what());
  }
  port_ = listener_.port();
  stopping_ = false;
  thread_ = std::thread([this] { serve(); });
}

void LoopbackImapServer::stop() {
  stopping_ = true;
  if (thread_.joinable()) thread_.join();
}

void LoopbackImapServer::serve() {
  while (!stopping_) {
    net::Socket client = listener_.accept(opts_.accept_poll_ms);
    if (!client.valid()) continue;
    try {
      Session(std::move(client), opts_).run();
    } catch (...) {
      // a broken session must not take the server down
    }
  }
}

}  // namespace mailbot
