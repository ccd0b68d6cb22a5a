#pragma once

// Loopback httplib server running on a background thread for one test.

#include <httplib.h>

#include <string>
#include <thread>

struct LoopbackServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url(const std::string& path = "") const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }
  ~LoopbackServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};
