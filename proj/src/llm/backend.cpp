#include "cathode/llm/backend.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cathode/error.hpp"

namespace cathode {

void ChatRequest::validate() const {
  if (!std::isfinite(sampling.temperature) || !std::isfinite(sampling.frequency_penalty)) {
    throw Error(ErrorKind::InvalidArgument, "sampling values must be finite");
  }
  if (sampling.temperature < 0.0) throw Error(ErrorKind::InvalidArgument, "temperature must be >= 0");
}

bool ExchangeMatcher::matches(const ChatRequest& request) const {
  if (template_id && *template_id != request.template_id) return false;
  for (const auto& [name, value] : bindings) {
    auto it = request.bindings.values.find(name);
    if (it == request.bindings.values.end() || it->second != value) return false;
  }
  if (prompt_contains && request.prompt.find(*prompt_contains) == std::string::npos) return false;
  return true;
}

std::string ExchangeMatcher::describe() const {
  return to_json(ScriptedExchange{*this, {}})["match"].dump();
}

nlohmann::json to_json(const ScriptedExchange& exchange) {
  nlohmann::json match = nlohmann::json::object();
  if (exchange.match.template_id) match["template"] = std::string(to_string(*exchange.match.template_id));
  if (!exchange.match.bindings.empty()) match["bindings"] = exchange.match.bindings;
  if (exchange.match.prompt_contains) match["prompt_contains"] = *exchange.match.prompt_contains;
  return {{"match", match}, {"response", exchange.response}};
}

ScriptedExchange exchange_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("response") || !doc["response"].is_string()) {
    throw Error(ErrorKind::TranscriptDrift, "exchange needs a string \"response\"");
  }
  ScriptedExchange ex;
  ex.response = doc["response"].get<std::string>();
  if (auto m = doc.find("match"); m != doc.end() && m->is_object()) {
    if (auto t = m->find("template"); t != m->end()) ex.match.template_id = template_id_from_string(t->get<std::string>());
    if (auto b = m->find("bindings"); b != m->end()) {
      ex.match.bindings = b->get<std::map<std::string, std::string>>();
    }
    if (auto p = m->find("prompt_contains"); p != m->end()) ex.match.prompt_contains = p->get<std::string>();
  }
  return ex;
}

Transcript Transcript::parse(const std::string& jsonl) {
  Transcript t;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      t.exchanges.push_back(exchange_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::TranscriptDrift, "transcript line " + std::to_string(number) + ": " + e.what());
    }
  }
  return t;
}

Transcript Transcript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileUnreadable, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& ex : exchanges) {
    out += to_json(ex).dump();
    out += '\n';
  }
  return out;
}

void Transcript::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::FileUnreadable, path.string());
  out << to_jsonl();
}

ScriptedBackend::ScriptedBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

std::string ScriptedBackend::send(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  if (cursor_ >= transcript_.exchanges.size()) {
    throw Error(ErrorKind::TranscriptExhausted,
                "no exchange left for " + std::string(to_string(request.template_id)) + " request #" +
                    std::to_string(cursor_ + 1));
  }
  const auto& ex = transcript_.exchanges[cursor_];
  if (!ex.match.matches(request)) {
    std::string actual = std::string(to_string(request.template_id));
    for (const auto& [k, v] : request.bindings.values) actual += " " + k + "=" + v;
    throw Error(ErrorKind::TranscriptDrift, "exchange #" + std::to_string(cursor_ + 1) + " expects " +
                                                ex.match.describe() + " but got " + actual);
  }
  ++cursor_;
  return ex.response;
}

std::size_t ScriptedBackend::position() const {
  std::lock_guard lock(mutex_);
  return cursor_;
}

void ScriptedBackend::seek(std::size_t position) {
  std::lock_guard lock(mutex_);
  if (position > transcript_.exchanges.size()) {
    throw Error(ErrorKind::TranscriptExhausted, "cannot seek past the end of the transcript");
  }
  cursor_ = position;
}

std::string RecordingBackend::send(const ChatRequest& request) {
  std::string response = inner_.send(request);
  std::lock_guard lock(mutex_);
  ScriptedExchange ex;
  ex.match.template_id = request.template_id;
  ex.match.bindings = request.bindings.values;
  ex.response = response;
  recorded_.exchanges.push_back(std::move(ex));
  return response;
}

Transcript RecordingBackend::transcript() const {
  std::lock_guard lock(mutex_);
  return recorded_;
}

}  // namespace cathode
