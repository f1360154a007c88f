#pragma once

// Socket transport for ServerCore. One listening port carries both the framed
// message channel and plain HTTP GET (a connection whose first bytes are
// "GET " is answered as HTTP and closed).

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "kioskbot/protocol.hpp"
#include "kioskbot/server.hpp"

namespace kioskbot {

class TcpServer {
 public:
  /// Port 0 picks a free port. Throws Io when binding fails.
  TcpServer(ServerCore& core, std::uint16_t port, const std::string& bind_address = "127.0.0.1");
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  struct Connection;
  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void serve_http(Connection& conn, const std::string& request);

  ServerCore& core_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<std::shared_ptr<Connection>> connections_;
};

class TcpLink : public Link {
 public:
  /// Throws Io when the connection fails.
  TcpLink(const std::string& host, std::uint16_t port);
  ~TcpLink() override;

  void send(const Json& message) override;
  std::optional<Json> receive(std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  void read_loop();

  int fd_ = -1;
  std::mutex write_mutex_;
  Mailbox inbox_;
  std::thread reader_;
};

/// Minimal HTTP/1.0 GET; returns {status, body}. Throws Io.
std::pair<int, std::string> http_get(const std::string& host, std::uint16_t port, const std::string& path);

}  // namespace kioskbot
