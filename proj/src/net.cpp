#include "mailbot/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/err.h>
#include <openssl/ssl.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace mailbot::net {

namespace {

std::string errno_message(const char* prefix) {
  return std::string(prefix) + ": " + std::strerror(errno);
}

void set_rw_timeout(int fd, int timeout_ms) {
  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

std::string openssl_errors(const char* prefix) {
  std::string msg(prefix);
  unsigned long code;
  while ((code = ERR_get_error()) != 0) {
    char buf[256];
    ERR_error_string_n(code, buf, sizeof(buf));
    msg += "; ";
    msg += buf;
  }
  return msg;
}

}  // namespace

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

int Socket::release() {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

Socket Socket::connect(const std::string& host, int port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  const std::string service = std::to_string(port);
  const int rc = getaddrinfo(host.c_str(), service.c_str(), &hints, &results);
  if (rc != 0) throw SocketError("cannot resolve " + host + ": " + gai_strerror(rc));

  int fd = -1;
  std::string last_error = "no addresses";
  for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) {
      last_error = errno_message("socket");
      continue;
    }
    const int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);

    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    if (errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      const int ready = ::poll(&pfd, 1, timeout_ms);
      if (ready == 0) {
        ::close(fd);
        freeaddrinfo(results);
        throw SocketTimeout("connect to " + host + ":" + service + " timed out");
      }
      int err = 0;
      socklen_t len = sizeof(err);
      getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      if (ready > 0 && err == 0) break;
      last_error = err != 0 ? std::strerror(err) : errno_message("poll");
    } else {
      last_error = errno_message("connect");
    }
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(results);
  if (fd < 0) throw SocketError("cannot connect to " + host + ":" + service + ": " + last_error);

  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);
  set_rw_timeout(fd, timeout_ms);
  return Socket(fd);
}

void Socket::send_all(std::string_view data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw SocketTimeout("send timed out");
      throw SocketError(errno_message("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::size_t Socket::recv_some(char* buf, std::size_t cap) {
  for (;;) {
    const ssize_t n = ::recv(fd_, buf, cap, 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) throw SocketTimeout("recv timed out");
    throw SocketError(errno_message("recv"));
  }
}

struct TlsClient::Impl {
  Socket socket;
  SSL_CTX* ctx = nullptr;
  SSL* ssl = nullptr;

  ~Impl() {
    if (ssl != nullptr) {
      SSL_shutdown(ssl);
      SSL_free(ssl);
    }
    if (ctx != nullptr) SSL_CTX_free(ctx);
  }
};

TlsClient::TlsClient(Socket socket, const std::string& host_for_sni)
    : impl_(std::make_unique<Impl>()) {
  impl_->socket = std::move(socket);
  impl_->ctx = SSL_CTX_new(TLS_client_method());
  if (impl_->ctx == nullptr) throw TlsError(openssl_errors("SSL_CTX_new"));
  SSL_CTX_set_default_verify_paths(impl_->ctx);
  SSL_CTX_set_verify(impl_->ctx, SSL_VERIFY_PEER, nullptr);
  SSL_CTX_set_min_proto_version(impl_->ctx, TLS1_2_VERSION);

  impl_->ssl = SSL_new(impl_->ctx);
  if (impl_->ssl == nullptr) throw TlsError(openssl_errors("SSL_new"));
  SSL_set_tlsext_host_name(impl_->ssl, host_for_sni.c_str());
  SSL_set1_host(impl_->ssl, host_for_sni.c_str());
  SSL_set_fd(impl_->ssl, impl_->socket.fd());
  if (SSL_connect(impl_->ssl) != 1)
    throw TlsError(openssl_errors("TLS handshake failed"));
}

TlsClient::~TlsClient() = default;

void TlsClient::send_all(std::string_view data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const int n = SSL_write(impl_->ssl, data.data() + sent,
                            static_cast<int>(data.size() - sent));
    if (n <= 0) {
      const int err = SSL_get_error(impl_->ssl, n);
      if (err == SSL_ERROR_SYSCALL && (errno == EAGAIN || errno == EWOULDBLOCK))
        throw SocketTimeout("TLS send timed out");
      throw TlsError(openssl_errors("SSL_write"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::size_t TlsClient::recv_some(char* buf, std::size_t cap) {
  const int n = SSL_read(impl_->ssl, buf, static_cast<int>(cap));
  if (n > 0) return static_cast<std::size_t>(n);
  const int err = SSL_get_error(impl_->ssl, n);
  if (err == SSL_ERROR_ZERO_RETURN) return 0;
  if (err == SSL_ERROR_SYSCALL && (errno == EAGAIN || errno == EWOULDBLOCK))
    throw SocketTimeout("TLS recv timed out");
  throw TlsError(openssl_errors("SSL_read"));
}

std::string LineReader::read_line() {
  for (;;) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    fill();
  }
}

std::string LineReader::read_exact(std::size_t n) {
  while (buffer_.size() < n) fill();
  std::string out = buffer_.substr(0, n);
  buffer_.erase(0, n);
  return out;
}

void LineReader::fill() {
  char chunk[4096];
  const std::size_t n = stream_.recv_some(chunk, sizeof(chunk));
  if (n == 0) throw SocketError("connection closed by peer");
  buffer_.append(chunk, n);
}

Listener::Listener(Listener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

Listener& Listener::operator=(Listener&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    port_ = other.port_;
    other.fd_ = -1;
  }
  return *this;
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Listener Listener::bind_loopback(int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw SocketError(errno_message("socket"));
  const int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string msg = errno_message("bind");
    ::close(fd);
    throw SocketError(msg);
  }
  if (::listen(fd, 8) != 0) {
    const std::string msg = errno_message("listen");
    ::close(fd);
    throw SocketError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  return Listener(fd, ntohs(bound.sin_port));
}

Socket Listener::accept(int timeout_ms) {
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, timeout_ms);
  if (ready <= 0) return Socket();
  const int client = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
  if (client < 0) return Socket();
  set_rw_timeout(client, 30000);
  return Socket(client);
}

}  // namespace mailbot::net
