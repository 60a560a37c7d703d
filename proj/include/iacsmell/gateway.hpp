#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "iacsmell/dataset.hpp"
#include "iacsmell/manifest.hpp"

namespace iacsmell {

enum class PromptKind { GenerateAndWarn, InspectAndWarn, SynthLow, SynthHigh, Judge };

std::string_view to_string(PromptKind k);
/// Frozen template; `{payload}` marks where the payload goes.
std::string_view prompt_template(PromptKind k);
std::string render_prompt(PromptKind k, std::string_view payload);

struct GatewayConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name;
  std::string api_key_env = "OPENAI_API_KEY";
  std::optional<double> temperature;  // overrides the per-kind default
  int max_tokens = 1024;
  double timeout_s = 120;
  int max_retries = 3;
  int max_in_flight = 4;
  int backoff_ms = 500;
  std::filesystem::path cache_dir = ".iacsmell-cache";
  bool cache = true;

  /// 0.2 for generation, 0.0 otherwise, unless overridden.
  double temperature_for(PromptKind k) const;

  /// Reads a `[gateway]` table (bare keys work too). A relative cache_dir is
  /// resolved against `base_dir`. An `api_key` entry is rejected.
  static GatewayConfig from_toml(std::string_view text,
                                 const std::filesystem::path& base_dir = {});
  static GatewayConfig load(const std::filesystem::path& path);
};

struct Completion {
  std::string text;
  int attempts = 0;  // HTTP attempts; 0 on a cache hit
  bool cached = false;
};

using LogFn = std::function<void(const std::string&)>;

/// OpenAI-style chat-completions client with an on-disk response cache.
/// Safe to call from several threads; at most max_in_flight requests are
/// outstanding at once.
class Gateway {
 public:
  explicit Gateway(GatewayConfig cfg, LogFn log = {});
  ~Gateway();

  Completion complete_ex(PromptKind kind, std::string_view payload);
  std::string complete(PromptKind kind, std::string_view payload) {
    return complete_ex(kind, payload).text;
  }

  const GatewayConfig& config() const { return cfg_; }
  std::size_t requests_sent() const { return requests_.load(); }
  std::size_t cache_hits() const { return hits_.load(); }

  /// Cache file for a request: cache_dir/<sha256(model \0 kind \0 payload)>.json
  std::filesystem::path cache_path(PromptKind kind, std::string_view payload) const;

 private:
  std::optional<std::string> cache_get(PromptKind kind, std::string_view payload);
  void cache_put(PromptKind kind, std::string_view payload, const std::string& response);
  std::string post(PromptKind kind, std::string_view payload, int& attempts);
  void log(const std::string& msg) const;

  GatewayConfig cfg_;
  LogFn log_;
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
  std::mutex cache_mu_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> hits_{0};
};

/// Judge prompt, first integer 0..4 in the reply, divided by 4.
double judge_functional(Gateway& gw, std::string_view instruction, std::string_view code);

/// LLM instruction source for forge(); payload is the script text.
InstructionSynth llm_instruction_synth(Gateway& gw);

struct BatchRow {
  std::string script_id;
  Task task = Task::Inspection;
  Detail detail = Detail::None;
  std::string model;
  std::string response;
  std::optional<std::string> error;
  int attempts = 0;

  nlohmann::json to_json() const;
  static BatchRow from_json(const nlohmann::json& j);
};

std::string batch_to_jsonl(const std::vector<BatchRow>& rows);
std::vector<BatchRow> batch_from_jsonl(std::string_view text);

struct BatchOptions {
  Task task = Task::Inspection;
  Detail detail = Detail::Low;          // generation only
  std::filesystem::path manifest_dir;   // resolves script paths
  std::optional<std::filesystem::path> out;  // appended as rows finish
  unsigned jobs = 0;                    // 0 = max_in_flight
};

/// Sends one request per manifest entry. Rows already present in `out`
/// without an error are reused. Per-script failures are recorded in the row
/// and do not stop the batch. Rows are returned sorted by script_id, and
/// `out` is rewritten in that order at the end.
std::vector<BatchRow> run_eval_batch(Gateway& gw, const GroundTruthManifest& manifest,
                                     const BatchOptions& opt);

}  // namespace iacsmell
