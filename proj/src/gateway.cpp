#include "iacsmell/gateway.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <thread>

#include "iacsmell/config.hpp"
#include "iacsmell/corpus.hpp"
#include "iacsmell/digest.hpp"
#include "iacsmell/error.hpp"
#include "iacsmell/eval.hpp"
#include "iacsmell/text.hpp"

namespace iacsmell {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kGenerateTemplate =
    "Write a script following the instructions provided and examine the script and report "
    "any security weaknesses.\n\n{payload}";
constexpr std::string_view kInspectTemplate =
    "Examine the script and report any security weaknesses.\n\n{payload}";
constexpr std::string_view kSynthLowTemplate =
    "Read the infrastructure script below and write one sentence that asks someone to write "
    "it. Reply with that sentence only.\n\n{payload}";
constexpr std::string_view kSynthHighTemplate =
    "Read the infrastructure script below and write numbered step-by-step instructions that "
    "would let someone rewrite it. Reply with the steps only.\n\n{payload}";
constexpr std::string_view kJudgeTemplate =
    "Rate how well the script fulfils the instruction on a scale of 0 to 4, where 0 means "
    "entirely incorrect and meaningless and 4 means fully correct. Reply with the integer "
    "only.\n\n{payload}";

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing '/'
};

Url split_url(const std::string& base) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(base, m, re)) throw ConfigError("gateway base_url is not an http(s) URL: " + base);
  Url u{m[1].str(), m[2].str()};
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

}  // namespace

std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::GenerateAndWarn: return "GenerateAndWarn";
    case PromptKind::InspectAndWarn: return "InspectAndWarn";
    case PromptKind::SynthLow: return "SynthLow";
    case PromptKind::SynthHigh: return "SynthHigh";
    case PromptKind::Judge: return "Judge";
  }
  return "?";
}

std::string_view prompt_template(PromptKind k) {
  switch (k) {
    case PromptKind::GenerateAndWarn: return kGenerateTemplate;
    case PromptKind::InspectAndWarn: return kInspectTemplate;
    case PromptKind::SynthLow: return kSynthLowTemplate;
    case PromptKind::SynthHigh: return kSynthHighTemplate;
    case PromptKind::Judge: return kJudgeTemplate;
  }
  return "{payload}";
}

std::string render_prompt(PromptKind k, std::string_view payload) {
  std::string t(prompt_template(k));
  const std::size_t at = t.find("{payload}");
  t.replace(at, 9, payload);
  return t;
}

double GatewayConfig::temperature_for(PromptKind k) const {
  if (temperature) return *temperature;
  return k == PromptKind::GenerateAndWarn ? 0.2 : 0.0;
}

GatewayConfig GatewayConfig::from_toml(std::string_view toml, const fs::path& base_dir) {
  const ConfigFile f = ConfigFile::parse(toml);
  auto key = [&](const std::string& k) { return f.has("gateway." + k) ? "gateway." + k : k; };
  for (const char* banned : {"api_key", "key", "token"}) {
    if (f.has(key(banned))) {
      throw ConfigError(std::string("'") + banned +
                        "' is not accepted in config files; set api_key_env and export the key");
    }
  }
  GatewayConfig c;
  if (auto v = f.get_string(key("base_url"))) c.base_url = *v;
  if (auto v = f.get_string(key("model"))) c.model_name = *v;
  if (auto v = f.get_string(key("model_name"))) c.model_name = *v;
  if (auto v = f.get_string(key("api_key_env"))) c.api_key_env = *v;
  if (auto v = f.get_double(key("temperature"))) c.temperature = *v;
  if (auto v = f.get_int(key("max_tokens"))) c.max_tokens = static_cast<int>(*v);
  if (auto v = f.get_double(key("timeout_s"))) c.timeout_s = *v;
  if (auto v = f.get_double(key("timeout"))) c.timeout_s = *v;
  if (auto v = f.get_int(key("max_retries"))) c.max_retries = static_cast<int>(*v);
  if (auto v = f.get_int(key("max_in_flight"))) c.max_in_flight = static_cast<int>(*v);
  if (auto v = f.get_int(key("backoff_ms"))) c.backoff_ms = static_cast<int>(*v);
  if (auto v = f.get_bool(key("cache"))) c.cache = *v;
  if (auto v = f.get_string(key("cache_dir"))) {
    fs::path p(*v);
    c.cache_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else if (!base_dir.empty()) {
    c.cache_dir = base_dir / c.cache_dir;
  }
  if (c.model_name.empty()) throw ConfigError("gateway config needs a model name");
  if (c.max_in_flight < 1 || c.max_in_flight > 1024) throw ConfigError("max_in_flight must be in 1..1024");
  if (c.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (c.timeout_s <= 0) throw ConfigError("timeout must be positive");
  split_url(c.base_url);
  return c;
}

GatewayConfig GatewayConfig::load(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return from_toml(text, path.parent_path());
}

Gateway::Gateway(GatewayConfig cfg, LogFn log)
    : cfg_(std::move(cfg)),
      log_(std::move(log)),
      slots_(std::make_unique<std::counting_semaphore<1024>>(std::clamp(cfg_.max_in_flight, 1, 1024))) {}

Gateway::~Gateway() = default;

void Gateway::log(const std::string& msg) const {
  if (log_) log_(msg);
}

fs::path Gateway::cache_path(PromptKind kind, std::string_view payload) const {
  std::string k = cfg_.model_name;
  k.push_back('\0');
  k += to_string(kind);
  k.push_back('\0');
  k += payload;
  return cfg_.cache_dir / (sha256_hex(k) + ".json");
}

std::optional<std::string> Gateway::cache_get(PromptKind kind, std::string_view payload) {
  if (!cfg_.cache) return std::nullopt;
  const fs::path p = cache_path(kind, payload);
  std::lock_guard lock(cache_mu_);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return std::nullopt;
  try {
    json j = json::parse(read_file(p));
    if (j.value("model", "") != cfg_.model_name || j.value("kind", "") != to_string(kind) ||
        j.value("payload_sha256", "") != sha256_hex(payload)) {
      return std::nullopt;
    }
    return j.at("response").get<std::string>();
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are refetched
  }
}

void Gateway::cache_put(PromptKind kind, std::string_view payload, const std::string& response) {
  if (!cfg_.cache) return;
  const fs::path p = cache_path(kind, payload);
  json j{{"model", cfg_.model_name},
         {"kind", std::string(to_string(kind))},
         {"payload_sha256", sha256_hex(payload)},
         {"response", response}};
  std::lock_guard lock(cache_mu_);
  const fs::path tmp = p.string() + ".tmp";
  write_file(tmp, j.dump(2) + "\n");
  fs::rename(tmp, p);
}

std::string Gateway::post(PromptKind kind, std::string_view payload, int& attempts) {
  const Url url = split_url(cfg_.base_url);
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  const std::string body = json{{"model", cfg_.model_name},
                                {"messages", json::array({json{{"role", "user"},
                                                               {"content", render_prompt(kind, payload)}}})},
                                {"temperature", cfg_.temperature_for(kind)},
                                {"max_tokens", cfg_.max_tokens}}
                               .dump();
  httplib::Headers headers;
  if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);

  const auto secs = static_cast<time_t>(cfg_.timeout_s);
  const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
  std::string last;
  bool last_timeout = false;
  for (int attempt = 1; attempt <= cfg_.max_retries + 1; ++attempt) {
    if (attempt > 1) {
      const long wait = static_cast<long>(cfg_.backoff_ms) << std::min(attempt - 2, 20);
      std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
    attempts = attempt;
    httplib::Result res;
    {
      slots_->acquire();
      ++requests_;
      httplib::Client cli(url.origin);
      cli.set_connection_timeout(secs, usecs);
      cli.set_read_timeout(secs, usecs);
      cli.set_write_timeout(secs, usecs);
      res = cli.Post(url.path + "/chat/completions", headers, body, "application/json");
      slots_->release();
    }
    if (!res) {
      const httplib::Error err = res.error();
      last_timeout = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
      last = "transport error: " + httplib::to_string(err);
      log(std::string(to_string(kind)) + " attempt " + std::to_string(attempt) + ": " + last);
      continue;
    }
    log(std::string(to_string(kind)) + " attempt " + std::to_string(attempt) + ": HTTP " +
        std::to_string(res->status));
    if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_timeout = false;
      last = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw GatewayError("endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
      json j = json::parse(res->body);
      const json& content = j.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw MalformedResponse("message content is not a string");
      return content.get<std::string>();
    } catch (const json::exception& e) {
      throw MalformedResponse(std::string("unexpected completion body: ") + e.what());
    }
  }
  const std::string msg = "giving up after " + std::to_string(attempts) + " attempts: " + last;
  if (last_timeout) throw Timeout(msg);
  if (last.starts_with("HTTP")) throw RateLimited(msg);
  throw GatewayError(msg);
}

Completion Gateway::complete_ex(PromptKind kind, std::string_view payload) {
  if (auto hit = cache_get(kind, payload)) {
    ++hits_;
    return Completion{*hit, 0, true};
  }
  Completion c;
  c.text = post(kind, payload, c.attempts);
  cache_put(kind, payload, c.text);
  return c;
}

double judge_functional(Gateway& gw, std::string_view instruction, std::string_view code) {
  return parse_judgment(gw.complete(PromptKind::Judge, judge_payload(instruction, code)));
}

InstructionSynth llm_instruction_synth(Gateway& gw) {
  return [&gw](const IrScript& s, Detail d) {
    std::string r = gw.complete(d == Detail::High ? PromptKind::SynthHigh : PromptKind::SynthLow, s.text());
    return std::string(text::trim(r));
  };
}

json BatchRow::to_json() const {
  json j{{"script_id", script_id},
         {"task", std::string(iacsmell::to_string(task))},
         {"detail", std::string(iacsmell::to_string(detail))},
         {"model", model},
         {"response", response},
         {"attempts", attempts}};
  if (error) j["error"] = *error;
  return j;
}

BatchRow BatchRow::from_json(const json& j) {
  BatchRow r;
  r.script_id = j.at("script_id").get<std::string>();
  if (auto t = task_from_string(j.value("task", "inspection"))) r.task = *t;
  if (auto d = detail_from_string(j.value("detail", "none"))) r.detail = *d;
  r.model = j.value("model", "");
  r.response = j.value("response", "");
  if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
  r.attempts = j.value("attempts", 0);
  return r;
}

std::string batch_to_jsonl(const std::vector<BatchRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.to_json().dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<BatchRow> batch_from_jsonl(std::string_view text) {
  std::vector<BatchRow> rows;
  std::size_t n = 0;
  for (const auto& line : split_lines(text)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      rows.push_back(BatchRow::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ManifestUnreadable("responses row " + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<BatchRow> run_eval_batch(Gateway& gw, const GroundTruthManifest& manifest,
                                     const BatchOptions& opt) {
  const Detail detail = opt.task == Task::Generation ? opt.detail : Detail::None;
  std::map<std::string, BatchRow> done;
  if (opt.out) {
    std::error_code ec;
    if (fs::is_regular_file(*opt.out, ec)) {
      for (auto& r : batch_from_jsonl(read_file(*opt.out))) {
        if (!r.error && manifest.find(r.script_id) && r.task == opt.task && r.detail == detail && r.model == gw.config().model_name) {
          done[r.script_id] = std::move(r);
        }
      }
    }
  }

  std::vector<const ManifestEntry*> todo;
  for (const auto& e : manifest.entries) {
    if (!done.contains(e.script_id)) todo.push_back(&e);
  }

  std::mutex mu;
  std::ofstream sink;
  if (opt.out && !todo.empty()) {
    if (opt.out->has_parent_path()) fs::create_directories(opt.out->parent_path());
    // keep only rows we reuse, then append as we go
    write_file(*opt.out, [&] {
      std::vector<BatchRow> keep;
      for (auto& [id, r] : done) keep.push_back(r);
      return batch_to_jsonl(keep);
    }());
    sink.open(*opt.out, std::ios::binary | std::ios::app);
  }

  std::vector<BatchRow> fresh(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const ManifestEntry& e = *todo[i];
      BatchRow row;
      row.script_id = e.script_id;
      row.task = opt.task;
      row.detail = detail;
      row.model = gw.config().model_name;
      try {
        std::string payload;
        PromptKind kind;
        if (opt.task == Task::Generation) {
          const auto& instr = detail == Detail::High ? e.instruction_high : e.instruction_low;
          if (!instr) throw Error("entry has no " + std::string(to_string(detail)) + "-detail instruction");
          payload = *instr;
          kind = PromptKind::GenerateAndWarn;
        } else {
          payload = read_file(resolve_script_path(e, opt.manifest_dir));
          kind = PromptKind::InspectAndWarn;
        }
        Completion c = gw.complete_ex(kind, payload);
        row.response = std::move(c.text);
        row.attempts = c.attempts;
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
      std::lock_guard lock(mu);
      if (sink.is_open()) {
        sink << row.to_json().dump() << '\n';
        sink.flush();
      }
      fresh[i] = std::move(row);
    }
  };
  unsigned jobs = opt.jobs ? opt.jobs : static_cast<unsigned>(gw.config().max_in_flight);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(todo.size(), 1))));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }
  sink.close();

  for (auto& r : fresh) done[r.script_id] = std::move(r);
  std::vector<BatchRow> rows;
  for (auto& [id, r] : done) rows.push_back(std::move(r));
  if (opt.out) write_file(*opt.out, batch_to_jsonl(rows));
  return rows;
}

}  // namespace iacsmell
