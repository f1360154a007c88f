#include "kioskbot/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

[[noreturn]] void throw_io(const std::string& what) { throw Error(ErrorKind::Io, what + ": " + std::strerror(errno)); }

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

int connect_to(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res) {
    throw Error(ErrorKind::Io, "cannot resolve " + host);
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw_io("socket");
  }
  if (::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
    ::freeaddrinfo(res);
    ::close(fd);
    throw_io("connect to " + host + ":" + std::to_string(port));
  }
  ::freeaddrinfo(res);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

}  // namespace

struct TcpServer::Connection {
  int fd = -1;
  std::mutex write_mutex;
  std::thread thread;
  std::atomic<bool> done{false};
};

TcpServer::TcpServer(ServerCore& core, std::uint16_t port, const std::string& bind_address) : core_(core) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_io("socket");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(ErrorKind::Io, "bad bind address " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
    const int err = errno;
    ::close(listen_fd_);
    errno = err;
    throw_io("bind " + bind_address + ":" + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(mutex_);
    conns.swap(connections_);
  }
  for (auto& c : conns) ::shutdown(c->fd, SHUT_RDWR);
  for (auto& c : conns) {
    if (c->thread.joinable()) c->thread.join();
    ::close(c->fd);
  }
}

void TcpServer::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(mutex_);
    // Reap finished connections as new ones arrive.
    for (auto it = connections_.begin(); it != connections_.end();) {
      if ((*it)->done) {
        if ((*it)->thread.joinable()) (*it)->thread.join();
        ::close((*it)->fd);
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
    connections_.push_back(conn);
    conn->thread = std::thread([this, conn] { serve(conn); });
  }
}

void TcpServer::serve(std::shared_ptr<Connection> conn) {
  std::string head;
  char buf[65536];
  // Sniff the first four bytes to tell HTTP from framed traffic.
  while (head.size() < 4) {
    const ssize_t n = ::recv(conn->fd, buf, sizeof buf, 0);
    if (n <= 0) {
      conn->done = true;
      return;
    }
    head.append(buf, static_cast<std::size_t>(n));
  }
  if (head.rfind("GET ", 0) == 0) {
    serve_http(*conn, head);
    ::shutdown(conn->fd, SHUT_RDWR);
    conn->done = true;
    return;
  }
  std::weak_ptr<Connection> weak = conn;
  const ServerCore::LinkId link = core_.connect([weak](const Json& m) {
    auto c = weak.lock();
    if (!c) return;
    std::lock_guard lock(c->write_mutex);
    write_all(c->fd, encode_frame(m));
  });
  FrameDecoder decoder;
  decoder.feed(head);
  bool open = true;
  while (open) {
    try {
      while (auto m = decoder.next()) core_.handle(link, *m);
    } catch (const Error& e) {
      // A corrupt stream cannot be resynchronized; report and hang up.
      std::lock_guard lock(conn->write_mutex);
      write_all(conn->fd, encode_frame(msg::error(ReasonCode::Internal, e.what())));
      break;
    }
    const ssize_t n = ::recv(conn->fd, buf, sizeof buf, 0);
    if (n <= 0) {
      open = false;
    } else {
      decoder.feed({buf, static_cast<std::size_t>(n)});
    }
  }
  core_.disconnect(link);
  ::shutdown(conn->fd, SHUT_RDWR);
  conn->done = true;
}

void TcpServer::serve_http(Connection& conn, const std::string& request) {
  std::string req = request;
  char buf[4096];
  while (req.find("\r\n\r\n") == std::string::npos && req.find("\n\n") == std::string::npos && req.size() < 8192) {
    const ssize_t n = ::recv(conn.fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    req.append(buf, static_cast<std::size_t>(n));
  }
  const std::size_t sp = req.find(' ', 4);
  const std::string path = req.substr(4, sp == std::string::npos ? std::string::npos : sp - 4);
  int status = 200;
  Json body;
  if (path == "/health") {
    body = {{"status", "ok"}, {"sessions", core_.session_ids().size()}};
  } else if (path == "/interfaces") {
    Json ids = Json::array();
    for (const auto& i : core_.store().interfaces()) ids.push_back(i.record->interface_id);
    body = {{"interfaces", ids}};
  } else {
    status = 404;
    body = {{"error", "not found"}};
  }
  const std::string text = body.dump();
  std::string resp = "HTTP/1.0 " + std::to_string(status) + (status == 200 ? " OK" : " Not Found") +
                     "\r\nContent-Type: application/json\r\nContent-Length: " + std::to_string(text.size()) +
                     "\r\nConnection: close\r\n\r\n" + text;
  write_all(conn.fd, resp);
}

TcpLink::TcpLink(const std::string& host, std::uint16_t port) : fd_(connect_to(host, port)) {
  reader_ = std::thread([this] { read_loop(); });
}

TcpLink::~TcpLink() {
  close();
  if (reader_.joinable()) reader_.join();
  if (fd_ >= 0) ::close(fd_);
}

void TcpLink::send(const Json& message) {
  std::lock_guard lock(write_mutex_);
  if (!write_all(fd_, encode_frame(message))) throw Error(ErrorKind::Io, "connection closed");
}

std::optional<Json> TcpLink::receive(std::chrono::milliseconds timeout) { return inbox_.pop(timeout); }

void TcpLink::close() { ::shutdown(fd_, SHUT_RDWR); }

void TcpLink::read_loop() {
  FrameDecoder decoder;
  char buf[65536];
  for (;;) {
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n <= 0) break;
    decoder.feed({buf, static_cast<std::size_t>(n)});
    try {
      while (auto m = decoder.next()) inbox_.push(std::move(*m));
    } catch (const Error&) {
      break;
    }
  }
  inbox_.close();
}

std::pair<int, std::string> http_get(const std::string& host, std::uint16_t port, const std::string& path) {
  const int fd = connect_to(host, port);
  const std::string req = "GET " + path + " HTTP/1.0\r\nHost: " + host + "\r\n\r\n";
  if (!write_all(fd, req)) {
    ::close(fd);
    throw Error(ErrorKind::Io, "request failed");
  }
  std::string resp;
  char buf[4096];
  for (;;) {
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    resp.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fd);
  int status = 0;
  if (resp.rfind("HTTP/", 0) == 0) status = std::atoi(resp.c_str() + resp.find(' ') + 1);
  const std::size_t body = resp.find("\r\n\r\n");
  return {status, body == std::string::npos ? std::string() : resp.substr(body + 4)};
}

}  // namespace kioskbot
