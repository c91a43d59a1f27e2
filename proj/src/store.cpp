#include "mailbot/store.hpp"

#include "mailbot/fixture_store.hpp"
#include "mailbot/imap_client.hpp"

namespace mailbot {

std::unique_ptr<StoreSession> connect_and_authenticate(const StoreConfig& cfg,
                                                       const Credentials& creds) {
  switch (cfg.mode) {
    case StoreMode::fixture:
      if (cfg.fixture_root.empty())
        throw StoreError("fixture mode requires a fixture root directory");
      return std::make_unique<FixtureSession>(cfg.fixture_root);
    case StoreMode::loopback_plain:
    case StoreMode::imap_tls:
      return std::make_unique<ImapSession>(cfg, creds);
  }
  throw StoreError("unknown store mode");
}

}  // namespace mailbot
