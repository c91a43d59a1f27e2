#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <thread>

#include "mailbot/net.hpp"

namespace mailbot {

// Minimal IMAP4rev1 server that fronts a maildir-style fixture tree on the
// loopback interface.  Plaintext only; never bind it to anything routable.
class LoopbackImapServer {
 public:
  struct Options {
    std::filesystem::path fixture_root;
    int port = 0;  // 0 picks an ephemeral port
    std::string user = "bot@example.com";
    std::string password = "loopback-secret";
    bool enable_move = true;  // advertise MOVE; off forces COPY+STORE+EXPUNGE
    int accept_poll_ms = 200;
  };

  explicit LoopbackImapServer(Options opts);
  ~LoopbackImapServer();

  LoopbackImapServer(const LoopbackImapServer&) = delete;
  LoopbackImapServer& operator=(const LoopbackImapServer&) = delete;

  // Binds the listener and spawns the accept loop.  Throws PortInUse when a
  // fixed port is already taken.
  void start();
  void stop();

  int port() const { return port_; }

 private:
  void serve();

  Options opts_;
  net::Listener listener_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  int port_ = 0;
};

}  // namespace mailbot
