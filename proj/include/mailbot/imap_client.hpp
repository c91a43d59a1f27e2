#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "mailbot/net.hpp"
#include "mailbot/store.hpp"

namespace mailbot {

// IMAP4rev1 client covering the subset the pipeline needs: LOGIN, LIST,
// SELECT, UID SEARCH UNSEEN, UID FETCH, UID STORE, UID COPY, UID MOVE,
// EXPUNGE, LOGOUT.  TLS is mandatory except toward loopback addresses.
class ImapSession : public StoreSession {
 public:
  ImapSession(const StoreConfig& cfg, const Credentials& creds);
  ~ImapSession() override;

  FolderSummary select_folder(const std::string& folder) override;
  std::vector<FetchedMessage> fetch_unseen_top(std::size_t top) override;
  void apply_action(const StoreAction& action) override;
  void logout() override;

  bool server_supports_move() const { return has_move_; }

 private:
  struct Untagged {
    std::string line;
    std::string literal;  // {n} payload, if the line carried one
    std::string trailer;  // remainder after the literal
  };
  struct Reply {
    bool ok = false;
    std::string status_line;
    std::vector<Untagged> untagged;
  };

  Reply run(const std::string& command, const std::string& trace_as = "");
  std::string next_tag();
  void trace(char dir, const std::string& line);
  std::vector<std::uint32_t> search_unseen();
  void store_flag(const std::string& uid, const std::string& flag);
  void move_with_fallback(const std::string& uid, const std::string& target);
  bool try_move_or_copy(const std::string& verb, const std::string& uid,
                        const std::string& target, std::string* error);

  std::unique_ptr<net::Stream> stream_;
  std::unique_ptr<net::LineReader> reader_;
  std::ofstream trace_out_;
  bool has_move_ = false;
  int tag_counter_ = 0;
  std::string folder_;
  bool logged_out_ = false;
};

}  // namespace mailbot
