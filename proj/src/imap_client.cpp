#include "mailbot/imap_client.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>

namespace mailbot {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool is_loopback_host(const std::string& host) {
  return host == "127.0.0.1" || host == "localhost" || host == "::1";
}

int month_index(const std::string& mon) {
  static const char* names[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  for (int i = 0; i < 12; ++i)
    if (mon == names[i]) return i;
  return -1;
}

// "02-Jan-2026 10:00:05 +0000" (day may be " 2"); epoch when unparseable.
std::chrono::system_clock::time_point parse_internal_date(const std::string& s) {
  int day = 0, year = 0, hh = 0, mm = 0, ss = 0;
  char mon[4] = {0};
  char zone[6] = {0};
  std::string t = s;
  if (!t.empty() && t.front() == ' ') t.erase(0, 1);
  if (std::sscanf(t.c_str(), "%d-%3s-%d %d:%d:%d %5s", &day, mon, &year, &hh, &mm,
                  &ss, zone) < 6)
    return {};
  const int mi = month_index(mon);
  if (mi < 0) return {};
  std::tm tm{};
  tm.tm_mday = day;
  tm.tm_mon = mi;
  tm.tm_year = year - 1900;
  tm.tm_hour = hh;
  tm.tm_min = mm;
  tm.tm_sec = ss;
  std::time_t utc = timegm(&tm);
  if (zone[0] == '+' || zone[0] == '-') {
    const int zh = (zone[1] - '0') * 10 + (zone[2] - '0');
    const int zm = (zone[3] - '0') * 10 + (zone[4] - '0');
    const int offset = zh * 3600 + zm * 60;
    utc += (zone[0] == '+') ? -offset : offset;
  }
  return std::chrono::system_clock::from_time_t(utc);
}

// Scans a FETCH response line for "UID <n>".
std::optional<std::uint32_t> find_uid(const std::string& line) {
  const std::string u = upper(line);
  std::size_t pos = u.find("UID ");
  while (pos != std::string::npos) {
    // skip matches inside other atoms such as "UIDVALIDITY"
    if (pos == 0 || !std::isalpha(static_cast<unsigned char>(u[pos - 1]))) {
      std::size_t i = pos + 4;
      std::uint32_t value = 0;
      bool any = false;
      while (i < u.size() && std::isdigit(static_cast<unsigned char>(u[i]))) {
        value = value * 10 + static_cast<std::uint32_t>(u[i] - '0');
        ++i;
        any = true;
      }
      if (any) return value;
    }
    pos = u.find("UID ", pos + 1);
  }
  return std::nullopt;
}

std::optional<std::string> find_quoted_after(const std::string& line,
                                             const std::string& key) {
  const std::size_t at = upper(line).find(upper(key));
  if (at == std::string::npos) return std::nullopt;
  const std::size_t open = line.find('"', at + key.size());
  if (open == std::string::npos) return std::nullopt;
  const std::size_t close = line.find('"', open + 1);
  if (close == std::string::npos) return std::nullopt;
  return line.substr(open + 1, close - open - 1);
}

}  // namespace

ImapSession::ImapSession(const StoreConfig& cfg, const Credentials& creds) {
  if (!cfg.trace_path.empty()) {
    trace_out_.open(cfg.trace_path, std::ios::app);
  }
  // plaintext is confined to loopback; refuse before dialing anything else
  if (cfg.mode != StoreMode::imap_tls && !is_loopback_host(cfg.server))
    throw TlsFailure("plaintext IMAP is only allowed toward loopback");
  try {
    net::Socket sock = net::Socket::connect(cfg.server, cfg.port, cfg.timeout_ms);
    if (cfg.mode == StoreMode::imap_tls) {
      stream_ = std::make_unique<net::TlsClient>(std::move(sock), cfg.server);
    } else {
      stream_ = std::make_unique<net::Socket>(std::move(sock));
    }
  } catch (const net::TlsError& e) {
    throw TlsFailure(e.what());
  } catch (const net::SocketTimeout& e) {
    throw ConnectTimeout(e.what());
  } catch (const net::SocketError& e) {
    throw ConnectTimeout(e.what());
  }
  reader_ = std::make_unique<net::LineReader>(*stream_);

  try {
    const std::string greeting = reader_->read_line();
    trace('S', greeting);
    if (upper(greeting).find("MOVE") != std::string::npos) has_move_ = true;

    const std::string login = "LOGIN " + quote(creds.email) + " " + quote(creds.password);
    const std::string redacted = "LOGIN " + quote(creds.email) + " \"<redacted>\"";
    const Reply reply = run(login, redacted);
    if (!reply.ok) throw AuthFailure("login rejected: " + reply.status_line);

    if (upper(greeting).find("CAPABILITY") == std::string::npos) {
      const Reply caps = run("CAPABILITY");
      for (const Untagged& u : caps.untagged)
        if (upper(u.line).find("MOVE") != std::string::npos) has_move_ = true;
    }
  } catch (const AuthFailure&) {
    throw;
  } catch (const net::SocketTimeout& e) {
    throw ConnectTimeout(e.what());
  } catch (const net::SocketError& e) {
    throw ConnectTimeout(e.what());
  }
}

ImapSession::~ImapSession() {
  try {
    logout();
  } catch (...) {
  }
}

std::string ImapSession::next_tag() {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "a%03d", ++tag_counter_);
  return buf;
}

void ImapSession::trace(char dir, const std::string& line) {
  if (!trace_out_.is_open()) return;
  trace_out_ << dir << ": " << line << '\n';
  trace_out_.flush();
}

ImapSession::Reply ImapSession::run(const std::string& command,
                                    const std::string& trace_as) {
  const std::string tag = next_tag();
  stream_->send_all(tag + " " + command + "\r\n");
  trace('C', tag + " " + (trace_as.empty() ? command : trace_as));

  Reply reply;
  for (;;) {
    std::string line = reader_->read_line();
    if (line.rfind(tag + " ", 0) == 0) {
      trace('S', line);
      reply.status_line = line.substr(tag.size() + 1);
      reply.ok = upper(reply.status_line).rfind("OK", 0) == 0;
      return reply;
    }
    Untagged u;
    u.line = line;
    // "... {123}" announces a 123 byte literal on the wire
    if (!line.empty() && line.back() == '}') {
      const std::size_t open = line.rfind('{');
      if (open != std::string::npos) {
        const std::string digits = line.substr(open + 1, line.size() - open - 2);
        if (!digits.empty() &&
            std::all_of(digits.begin(), digits.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
          const std::size_t n = std::stoul(digits);
          u.literal = reader_->read_exact(n);
          u.trailer = reader_->read_line();
        }
      }
    }
    trace('S', u.line + (u.literal.empty()
                             ? ""
                             : " <literal " + std::to_string(u.literal.size()) +
                                   " bytes>" + u.trailer));
    reply.untagged.push_back(std::move(u));
  }
}

FolderSummary ImapSession::select_folder(const std::string& folder) {
  try {
    const Reply reply = run("SELECT " + quote(folder));
    if (!reply.ok) throw NoSuchFolder("cannot select " + folder + ": " + reply.status_line);
    folder_ = folder;
    FolderSummary summary;
    for (const Untagged& u : reply.untagged) {
      unsigned long n = 0;
      if (std::sscanf(u.line.c_str(), "* %lu EXISTS", &n) == 1) summary.total = n;
    }
    summary.unseen = search_unseen().size();
    return summary;
  } catch (const net::SocketError& e) {
    throw FetchFailure(std::string("select failed: ") + e.what());
  }
}

std::vector<std::uint32_t> ImapSession::search_unseen() {
  const Reply reply = run("UID SEARCH UNSEEN");
  if (!reply.ok) throw FetchFailure("search failed: " + reply.status_line);
  std::vector<std::uint32_t> uids;
  for (const Untagged& u : reply.untagged) {
    if (upper(u.line).rfind("* SEARCH", 0) != 0) continue;
    const char* p = u.line.c_str() + 8;
    char* end = nullptr;
    for (;;) {
      const unsigned long v = std::strtoul(p, &end, 10);
      if (end == p) break;
      uids.push_back(static_cast<std::uint32_t>(v));
      p = end;
    }
  }
  return uids;
}

std::vector<FetchedMessage> ImapSession::fetch_unseen_top(std::size_t top) {
  try {
    std::vector<std::uint32_t> uids = search_unseen();
    if (uids.empty() || top == 0) return {};

    std::string set;
    for (std::size_t i = 0; i < uids.size(); ++i) {
      if (i) set += ',';
      set += std::to_string(uids[i]);
    }
    const Reply dates = run("UID FETCH " + set + " (UID INTERNALDATE)");
    if (!dates.ok) throw FetchFailure("fetch dates failed: " + dates.status_line);

    struct Meta {
      std::uint32_t uid;
      std::chrono::system_clock::time_point date;
    };
    std::vector<Meta> metas;
    for (const Untagged& u : dates.untagged) {
      const auto uid = find_uid(u.line);
      if (!uid) continue;
      if (std::find(uids.begin(), uids.end(), *uid) == uids.end()) continue;
      Meta m{*uid, {}};
      if (const auto d = find_quoted_after(u.line, "INTERNALDATE "))
        m.date = parse_internal_date(*d);
      metas.push_back(m);
    }
    std::sort(metas.begin(), metas.end(), [](const Meta& a, const Meta& b) {
      if (a.date != b.date) return a.date > b.date;
      return a.uid > b.uid;
    });
    if (metas.size() > top) metas.resize(top);
    if (metas.empty()) return {};

    std::string want;
    for (std::size_t i = 0; i < metas.size(); ++i) {
      if (i) want += ',';
      want += std::to_string(metas[i].uid);
    }
    const Reply bodies = run("UID FETCH " + want + " (UID BODY.PEEK[])");
    if (!bodies.ok) throw FetchFailure("fetch bodies failed: " + bodies.status_line);

    std::vector<FetchedMessage> out;
    for (const Meta& m : metas) {
      const Untagged* found = nullptr;
      for (const Untagged& u : bodies.untagged) {
        const auto uid = find_uid(u.line);
        if (uid && *uid == m.uid && !u.literal.empty()) {
          found = &u;
          break;
        }
      }
      if (found == nullptr)
        throw FetchFailure("server returned no body for uid " + std::to_string(m.uid));
      FetchedMessage msg;
      msg.handle.store_uid = std::to_string(m.uid);
      msg.handle.folder = folder_;
      msg.handle.seen = false;
      msg.raw.source_handle = msg.handle.store_uid;
      msg.raw.bytes.assign(found->literal.begin(), found->literal.end());
      msg.received = m.date;
      out.push_back(std::move(msg));
    }
    return out;
  } catch (const net::SocketError& e) {
    throw FetchFailure(std::string("fetch failed: ") + e.what());
  }
}

void ImapSession::store_flag(const std::string& uid, const std::string& flag) {
  const Reply reply = run("UID STORE " + uid + " +FLAGS.SILENT (" + flag + ")");
  if (!reply.ok) throw ActionFailure("store " + flag + " failed: " + reply.status_line);
}

bool ImapSession::try_move_or_copy(const std::string& verb, const std::string& uid,
                                   const std::string& target, std::string* error) {
  const Reply reply = run("UID " + verb + " " + uid + " " + quote(target));
  if (reply.ok) return true;
  *error = reply.status_line;
  return false;
}

void ImapSession::move_with_fallback(const std::string& uid, const std::string& target) {
  // messages always land seen on the far side, matching offline move semantics
  store_flag(uid, "\\Seen");
  const std::string verb = has_move_ ? "MOVE" : "COPY";
  std::string error;
  bool done = try_move_or_copy(verb, uid, target, &error);
  if (!done && upper(error).find("[TRYCREATE]") != std::string::npos) {
    const Reply created = run("CREATE " + quote(target));
    if (!created.ok)
      throw ActionFailure("create " + target + " failed: " + created.status_line);
    done = try_move_or_copy(verb, uid, target, &error);
  }
  if (!done) throw ActionFailure(verb + " to " + target + " failed: " + error);
  if (!has_move_) {
    // fallback only: copy landed, now drop the original
    store_flag(uid, "\\Deleted");
    const Reply expunged = run("EXPUNGE");
    if (!expunged.ok) throw ActionFailure("expunge failed: " + expunged.status_line);
  }
}

void ImapSession::apply_action(const StoreAction& action) {
  try {
    switch (action.kind) {
      case ActionKind::mark_seen:
        store_flag(action.handle.store_uid, "\\Seen");
        return;
      case ActionKind::move_to_trash:
        move_with_fallback(action.handle.store_uid,
                           action.target.empty() ? "Trash" : action.target);
        return;
      case ActionKind::move_to_label:
        if (action.target.empty())
          throw ActionFailure("move_to_label requires a target folder");
        move_with_fallback(action.handle.store_uid, action.target);
        return;
    }
  } catch (const net::SocketError& e) {
    throw ActionFailure(std::string("store action failed: ") + e.what());
  }
}

void ImapSession::logout() {
  if (logged_out_ || !stream_) return;
  logged_out_ = true;
  try {
    run("LOGOUT");
  } catch (...) {
    // connection may already be gone; logout is best effort
  }
}

}  // namespace mailbot
