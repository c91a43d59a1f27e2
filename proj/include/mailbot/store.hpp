#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mailbot/message.hpp"

namespace mailbot {

class StoreError : public std::runtime_error {
 public:
  explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

class ConnectTimeout : public StoreError {
 public:
  using StoreError::StoreError;
};
class TlsFailure : public StoreError {
 public:
  using StoreError::StoreError;
};
class AuthFailure : public StoreError {
 public:
  using StoreError::StoreError;
};
class NoSuchFolder : public StoreError {
 public:
  using StoreError::StoreError;
};
// Protocol error mid-transfer; partial results are discarded and the run
// aborts (later decisions cannot be trusted without complete input).
class FetchFailure : public StoreError {
 public:
  using StoreError::StoreError;
};
// Store rejected a move/flag command; audit-logged, run continues.
class ActionFailure : public StoreError {
 public:
  using StoreError::StoreError;
};
class PortInUse : public StoreError {
 public:
  using StoreError::StoreError;
};

enum class StoreMode { imap_tls, fixture, loopback_plain };

// Table-of-parameters for mailbox access: server, port, folder, timeout,
// batch size.
struct StoreConfig {
  std::string server = "imap.gmail.com";
  int port = 993;
  std::string mail_folder = "Inbox";
  int timeout_ms = 30000;
  std::size_t top = 9;
  StoreMode mode = StoreMode::imap_tls;
  std::filesystem::path fixture_root;  // fixture mode only
  std::filesystem::path trace_path;    // optional IMAP wire trace (password redacted)
};

struct Credentials {
  std::string email;
  std::string password;  // never logged, never serialized
};

struct MessageHandle {
  std::string store_uid;  // stable within a session and folder
  std::string folder;
  bool seen = false;
};

enum class ActionKind { move_to_label, move_to_trash, mark_seen };

struct StoreAction {
  ActionKind kind = ActionKind::mark_seen;
  std::string target;  // required for moves
  MessageHandle handle;
};

const char* to_string(ActionKind kind);

struct FolderSummary {
  std::size_t total = 0;
  std::size_t unseen = 0;
};

struct FetchedMessage {
  MessageHandle handle;
  RawMessage raw;
  std::chrono::system_clock::time_point received{};  // store receive time
};

// One session, one owner; commands are sequential. Moved messages always
// land seen, so a successfully handled message is never fetched again.
class StoreSession {
 public:
  virtual ~StoreSession() = default;

  virtual FolderSummary select_folder(const std::string& folder) = 0;

  // Up to `top` unseen messages, newest first (date desc, then store name
  // desc). Fetching never marks messages seen.
  virtual std::vector<FetchedMessage> fetch_unseen_top(std::size_t top) = 0;

  virtual void apply_action(const StoreAction& action) = 0;

  virtual void logout() = 0;
};

// Dispatches on cfg.mode: TLS IMAP, plaintext IMAP to a loopback address, or
// the local fixture directory tree.
std::unique_ptr<StoreSession> connect_and_authenticate(const StoreConfig& cfg,
                                                       const Credentials& creds);

}  // namespace mailbot
