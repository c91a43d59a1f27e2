#pragma once

#include <filesystem>

#include "mailbot/store.hpp"

namespace mailbot {

// Maildir-style offline mailbox: <root>/<Folder>/new/*.eml holds unseen
// messages, <root>/<Folder>/cur/*.eml seen ones. Moves are file renames.
class FixtureSession : public StoreSession {
 public:
  explicit FixtureSession(std::filesystem::path root);

  FolderSummary select_folder(const std::string& folder) override;
  std::vector<FetchedMessage> fetch_unseen_top(std::size_t top) override;
  void apply_action(const StoreAction& action) override;
  void logout() override {}

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path folder_dir(const std::string& folder) const;
  std::filesystem::path locate(const MessageHandle& handle) const;

  std::filesystem::path root_;
  std::string folder_;
};

// Shared with the loopback server: scans one maildir folder.
struct FixtureEntry {
  std::string name;  // file name, the store UID
  std::filesystem::path path;
  bool seen = false;
  std::chrono::system_clock::time_point date{};  // Date header, epoch if absent
};

// Entries of <root>/<folder>, newest first (date desc, name desc).
std::vector<FixtureEntry> scan_fixture_folder(const std::filesystem::path& root,
                                              const std::string& folder);

// Creates <root>/<folder>/{new,cur,tmp}; idempotent.
void ensure_fixture_folder(const std::filesystem::path& root, const std::string& folder);

}  // namespace mailbot
