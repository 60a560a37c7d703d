#pragma once

#include <httplib.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

// Local chat-completions server for gateway tests. The reply function gets
// the request body and the call number (1-based) and fills the response.
namespace mockllm {

inline std::string completion_body(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

class Server {
 public:
  using Reply = std::function<void(const nlohmann::json& req, int call, httplib::Response& res)>;

  explicit Server(Reply reply) : reply_(std::move(reply)) {
    srv_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      const int call = ++calls_;
      {
        std::lock_guard lk(mu_);
        auth_.push_back(req.get_header_value("Authorization"));
        bodies_.push_back(req.body);
      }
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      reply_(body, call, res);
      --in_flight_;
    });
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~Server() {
    srv_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }
  std::vector<std::string> auth_headers() {
    std::lock_guard lk(mu_);
    return auth_;
  }
  std::vector<std::string> bodies() {
    std::lock_guard lk(mu_);
    return bodies_;
  }

 private:
  Reply reply_;
  httplib::Server srv_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::mutex mu_;
  std::vector<std::string> auth_;
  std::vector<std::string> bodies_;
};

// Echoes the last user message back, so responses depend on the payload.
inline void echo(const nlohmann::json& req, int, httplib::Response& res) {
  std::string content = "ok";
  if (req.is_object() && req.contains("messages") && !req["messages"].empty())
    content = "reply to: " + req["messages"].back().value("content", "");
  res.set_content(completion_body(content), "application/json");
}

}  // namespace mockllm
