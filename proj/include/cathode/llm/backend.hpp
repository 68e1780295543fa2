#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cathode/llm/prompts.hpp"

namespace cathode {

struct Sampling {
  double temperature = 1.0;
  double frequency_penalty = 0.2;
};

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

struct ChatRequest {
  TemplateId template_id = TemplateId::InitialRoundInitialCycle;
  PromptBindings bindings;
  std::string prompt;                // rendered text sent as the final user turn
  std::vector<ChatMessage> history;  // earlier turns of the same conversation
  Sampling sampling;
  std::string model_tag;

  // Throws InvalidArgument on non-finite sampling values or temperature < 0.
  void validate() const;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string send(const ChatRequest& request) = 0;
};

// Request matcher of one scripted exchange. Empty fields match anything.
struct ExchangeMatcher {
  std::optional<TemplateId> template_id;
  std::map<std::string, std::string> bindings;  // scalar bindings that must be equal
  std::optional<std::string> prompt_contains;

  bool matches(const ChatRequest& request) const;
  std::string describe() const;
};

struct ScriptedExchange {
  ExchangeMatcher match;
  std::string response;
};

nlohmann::json to_json(const ScriptedExchange& exchange);
ScriptedExchange exchange_from_json(const nlohmann::json& doc);

// Ordered list of exchanges, stored as JSON lines:
//   {"match":{"template":"voltage_compare","bindings":{"material_a":"..."}},"response":"..."}
struct Transcript {
  std::vector<ScriptedExchange> exchanges;

  // Throws FileUnreadable or TranscriptDrift (bad line, with its number).
  static Transcript load(const std::filesystem::path& path);
  static Transcript parse(const std::string& jsonl);
  std::string to_jsonl() const;
  void save(const std::filesystem::path& path) const;
};

// Plays a transcript strictly in order. Each request must satisfy the
// matcher of the next exchange (TranscriptDrift otherwise); running past the
// end throws TranscriptExhausted. Calls are serialized.
class ScriptedBackend final : public LlmBackend {
 public:
  explicit ScriptedBackend(Transcript transcript);

  std::string send(const ChatRequest& request) override;

  std::size_t position() const;
  // Skips already-consumed exchanges, e.g. after replaying a session log.
  void seek(std::size_t position);
  std::size_t size() const noexcept { return transcript_.exchanges.size(); }

 private:
  Transcript transcript_;
  mutable std::mutex mutex_;
  std::size_t cursor_ = 0;
};

// Forwards to another backend and records every exchange with a matcher
// pinned to the template and all scalar bindings.
class RecordingBackend final : public LlmBackend {
 public:
  explicit RecordingBackend(LlmBackend& inner) : inner_(inner) {}
  std::string send(const ChatRequest& request) override;
  Transcript transcript() const;

 private:
  LlmBackend& inner_;
  mutable std::mutex mutex_;
  Transcript recorded_;
};

struct HttpChatSettings {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 2;
  int timeout_seconds = 120;
};

// OpenAI-compatible chat-completions adapter. The model is taken from
// request.model_tag; the key is read from the environment on every call.
class HttpChatBackend final : public LlmBackend {
 public:
  explicit HttpChatBackend(HttpChatSettings settings);
  std::string send(const ChatRequest& request) override;

  // Request body for request (exposed for tests).
  static nlohmann::json request_body(const ChatRequest& request);
  // Extracts choices[0].message.content; throws BackendUnavailable.
  static std::string response_text(const std::string& body);

 private:
  HttpChatSettings settings_;
  std::mutex mutex_;
};

}  // namespace cathode
