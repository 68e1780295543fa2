#include "cathode/llm/comparator.hpp"

#include <mutex>

#include "cathode/llm/response_parser.hpp"

namespace cathode {

std::pair<std::string, std::string> ComparatorCache::key(const Formula& a, const Formula& b) {
  auto ka = a.canonical_key();
  auto kb = b.canonical_key();
  if (kb < ka) std::swap(ka, kb);
  return {std::move(ka), std::move(kb)};
}

std::optional<ComparisonRecord> ComparatorCache::find(const Formula& a, const Formula& b) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ComparatorCache::store(ComparisonRecord record) {
  if (!(record.winner == record.first) && !(record.winner == record.second)) {
    throw Error(ErrorKind::InvalidArgument, "winner " + record.winner.render() + " is not part of the pair");
  }
  auto k = key(record.first, record.second);
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(std::move(k), std::move(record));
}

std::vector<ComparisonRecord> ComparatorCache::entries() const {
  std::shared_lock lock(mutex_);
  std::vector<ComparisonRecord> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(v);
  return out;
}

std::size_t ComparatorCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

ComparatorFailure::ComparatorFailure(Formula a, Formula b, std::string last_response, const std::string& reason)
    : Error(ErrorKind::ComparatorFailure, a.render() + " vs " + b.render() + ": " + reason),
      first_(std::move(a)),
      second_(std::move(b)),
      last_response_(std::move(last_response)) {}

Ordering compare_voltage(const Formula& a, const Formula& b, LlmBackend& backend, ComparatorCache& cache,
                         const CompareOptions& options,
                         const std::function<void(const ComparisonRecord&)>& on_verdict) {
  if (a == b) throw Error(ErrorKind::InvalidArgument, "cannot compare " + a.render() + " with itself");
  if (auto hit = cache.find(a, b)) return hit->winner == a ? Ordering::FirstWins : Ordering::SecondWins;

  ChatRequest request;
  request.template_id = TemplateId::VoltageCompare;
  request.bindings = voltage_bindings(a, b);
  request.prompt = render_prompt(TemplateId::VoltageCompare, request.bindings);
  request.sampling = options.sampling;
  request.model_tag = options.model_tag;

  std::string response;
  std::string reason;
  for (int attempt = 0; attempt < 2; ++attempt) {
    response = backend.send(request);
    try {
      Formula winner = parse_comparison_winner(response, a, b);
      ComparisonRecord record{a, b, winner, response, "llm"};
      cache.store(record);
      if (on_verdict) on_verdict(record);
      return winner == a ? Ordering::FirstWins : Ordering::SecondWins;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AmbiguousWinner && e.kind() != ErrorKind::NoMarkedLine) throw;
      reason = e.what();
    }
  }
  throw ComparatorFailure(a, b, response, reason);
}

}  // namespace cathode
