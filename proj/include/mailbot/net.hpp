#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mailbot::net {

class SocketError : public std::runtime_error {
 public:
  explicit SocketError(const std::string& what) : std::runtime_error(what) {}
};

class SocketTimeout : public SocketError {
 public:
  using SocketError::SocketError;
};

class TlsError : public SocketError {
 public:
  using SocketError::SocketError;
};

// Byte stream shared by plain and TLS connections.
class Stream {
 public:
  virtual ~Stream() = default;
  virtual void send_all(std::string_view data) = 0;
  // Returns 0 on orderly close; throws SocketTimeout when the configured
  // timeout elapses.
  virtual std::size_t recv_some(char* buf, std::size_t cap) = 0;
};

class Socket : public Stream {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() override;

  // Non-blocking connect bounded by timeout_ms, then read/write timeouts of
  // the same duration on the connected socket.
  static Socket connect(const std::string& host, int port, int timeout_ms);

  void send_all(std::string_view data) override;
  std::size_t recv_some(char* buf, std::size_t cap) override;

  int fd() const { return fd_; }
  int release();
  bool valid() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

// Client-side TLS over an already-connected socket. Verifies the peer
// certificate against the system trust store.
class TlsClient : public Stream {
 public:
  TlsClient(Socket socket, const std::string& host_for_sni);
  ~TlsClient() override;
  TlsClient(const TlsClient&) = delete;
  TlsClient& operator=(const TlsClient&) = delete;

  void send_all(std::string_view data) override;
  std::size_t recv_some(char* buf, std::size_t cap) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Buffered reader for line-oriented protocols with {n} literals.
class LineReader {
 public:
  explicit LineReader(Stream& stream) : stream_(stream) {}

  // One line without its CRLF/LF terminator; throws on EOF before a line.
  std::string read_line();
  std::string read_exact(std::size_t n);

 private:
  void fill();

  Stream& stream_;
  std::string buffer_;
};

// Loopback-only listener for the test server.
class Listener {
 public:
  // port 0 binds an ephemeral port. Throws PortInUse-equivalent SocketError.
  static Listener bind_loopback(int port);

  Listener() = default;
  Listener(Listener&&) noexcept;
  Listener& operator=(Listener&&) noexcept;
  ~Listener();

  int port() const { return port_; }
  int fd() const { return fd_; }

  // Waits up to timeout_ms; returns an invalid Socket when nothing arrived.
  Socket accept(int timeout_ms);

 private:
  Listener(int fd, int port) : fd_(fd), port_(port) {}
  int fd_ = -1;
  int port_ = 0;
};

}  // namespace mailbot::net
