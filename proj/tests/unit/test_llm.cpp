#include <doctest.h>

#include <cstdlib>

#include "cathode/error.hpp"
#include "cathode/llm/backend.hpp"
#include "cathode/llm/comparator.hpp"
#include "cathode/llm/prompts.hpp"
#include "cathode/llm/response_parser.hpp"
#include "cathode/llm/template.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cathode;

namespace {

Formula F(const char* s) { return Formula::parse(s); }

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

// Backend that answers from a fixed queue and records what it saw.
class QueueBackend final : public LlmBackend {
 public:
  explicit QueueBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string send(const ChatRequest& request) override {
    seen.push_back(request);
    if (next_ >= replies_.size()) throw Error(ErrorKind::TranscriptExhausted, "queue empty");
    return replies_[next_++];
  }
  std::vector<ChatRequest> seen;

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

ChatRequest voltage_request(const Formula& a, const Formula& b) {
  ChatRequest r;
  r.template_id = TemplateId::VoltageCompare;
  r.bindings = voltage_bindings(a, b);
  r.prompt = render_prompt(r.template_id, r.bindings);
  return r;
}

}  // namespace

TEST_CASE("shipped prompts match the asset files") {
  for (TemplateId id : kAllTemplates) {
    const std::string path = std::string(CATHODE_PROMPT_ASSETS) + "/" + std::string(to_string(id)) + ".txt";
    CHECK(builtin_template(id).body() == testing::read_file(path));
    CHECK(template_id_from_string(to_string(id)) == id);
  }
  CHECK(kind_of([] { template_id_from_string("nope"); }) == ErrorKind::UnknownTemplate);
}

TEST_CASE("render the generation prompts") {
  const auto nmc = F("LiNi0.8Mn0.1Co0.1O2");
  const auto text = render_prompt(TemplateId::InitialRoundInitialCycle, initial_bindings(nmc));
  CHECK(text.starts_with("We have a Li cathode material LiNi0.8Mn0.1Co0.1O2."));
  CHECK(text.find("carbon group, alkaline earth metals group, and transition elements") != std::string::npos);
  CHECK_FALSE(contains_placeholder(text));

  const auto next = render_prompt(TemplateId::InitialRoundSubsequentCycle,
                                  subsequent_cycle_bindings(F("LiNi0.8Mn0.1Co0.1Si0.05O2"), nmc));
  CHECK(next.find("from the following groups: alkaline earth metals group, and transition elements,") !=
        std::string::npos);

  const auto voltage = render_prompt("voltage_compare", voltage_bindings(F("SiMg"), F("MgB")));
  CHECK(voltage.find("SiMg and MgB") != std::string::npos);
  CHECK(voltage.find("higher voltage vs. Li+/Li (V)") != std::string::npos);

  CHECK(kind_of([] { render_prompt(TemplateId::InitialRoundInitialCycle, PromptBindings{}); }) ==
        ErrorKind::MissingBinding);
}

TEST_CASE("subsequent round prompt lists") {
  const auto text = render_prompt(
      TemplateId::SubsequentRound,
      subsequent_round_bindings({F("LiCoO2")}, {{F("LiNiO2"), F("Li2MnO3")}, {F("LiFeO2"), std::nullopt}}));
  CHECK(text.find("These batteries have been discovered before:\n* LiCoO2\n") != std::string::npos);
  CHECK(text.find("* LiNiO2 (a retrieved similar and correct battery is Li2MnO3)\n") != std::string::npos);
  CHECK(text.find("* LiFeO2\n") != std::string::npos);

  const auto only_invalid = render_prompt(TemplateId::SubsequentRound, subsequent_round_bindings({}, {{F("LiFeO2"), {}}}));
  CHECK(only_invalid.find("discovered before") == std::string::npos);
  CHECK(only_invalid.find("These invalid batteries are:") != std::string::npos);
}

TEST_CASE("template language") {
  auto t = PromptTemplate::compile("a{x}b{?y}[{y}]{/y}{#l}<{v}{?w}!{/w}>{/l}{ not a placeholder }");
  CHECK(t.required_names() == std::set<std::string>{"x", "y", "l"});
  PromptBindings b;
  b.set("x", "1").set("y", "").set_list("l", {{{"v", "p"}}, {{"v", "q"}, {"w", "z"}}});
  CHECK(t.render(b) == "a1b<p><q!>{ not a placeholder }");
  b.set("y", "Y");
  CHECK(t.render(b) == "a1b[Y]<p><q!>{ not a placeholder }");
  CHECK(kind_of([] { PromptTemplate::compile("{#l}x"); }) == ErrorKind::TemplateSyntax);
  CHECK(kind_of([] { PromptTemplate::compile("{#l}x{/m}"); }) == ErrorKind::TemplateSyntax);
}

TEST_CASE("property: rendered prompts never keep placeholders") {
  testing::FormulaGen gen(2024);
  for (int i = 0; i < 300; ++i) {
    const auto a = gen.formula();
    auto b = gen.formula();
    while (b == a) b = gen.formula();
    std::vector<Formula> existing;
    std::vector<InvalidEntry> invalid;
    for (std::size_t k = gen.uniform(0, 3); k > 0; --k) existing.push_back(gen.formula());
    for (std::size_t k = gen.uniform(0, 3); k > 0; --k) {
      invalid.push_back({gen.formula(), gen.uniform(0, 1) ? std::optional<Formula>(gen.formula()) : std::nullopt});
    }
    for (const auto& text : {render_prompt(TemplateId::InitialRoundInitialCycle, initial_bindings(a)),
                             render_prompt(TemplateId::InitialRoundSubsequentCycle, subsequent_cycle_bindings(a, b)),
                             render_prompt(TemplateId::SubsequentRound, subsequent_round_bindings(existing, invalid)),
                             render_prompt(TemplateId::VoltageCompare, voltage_bindings(a, b))}) {
      CHECK_FALSE(contains_placeholder(text));
    }
  }
}

TEST_CASE("prompt overrides") {
  const auto ok = validate_override(TemplateId::VoltageCompare, "Which is higher, {material_a} or {material_b}?");
  CHECK(ok.render(voltage_bindings(F("SiMg"), F("MgB"))) == "Which is higher, SiMg or MgB?");
  CHECK(kind_of([] { validate_override(TemplateId::VoltageCompare, "Only {material_a}"); }) ==
        ErrorKind::MissingBinding);
  CHECK(kind_of([] { validate_override(TemplateId::VoltageCompare, "{material_a}{material_b}{extra}"); }) ==
        ErrorKind::MissingBinding);
  CHECK(kind_of([] { validate_override(TemplateId::SubsequentRound, "{?existing}x"); }) == ErrorKind::TemplateSyntax);
}

TEST_CASE("allowed groups") {
  const auto nmc = F("LiNi0.8Mn0.1Co0.1O2");
  CHECK(allowed_groups_text(nmc, nmc) == "carbon group, alkaline earth metals group, and transition elements");
  CHECK(allowed_groups_text(F("LiNi0.8Mn0.1Co0.1Mg0.05O2"), nmc) == "carbon group, and transition elements");
  CHECK(allowed_groups_text(F("LiNi0.8Mn0.1Co0.1Mg0.05Si0.05Ti0.02O2"), nmc) ==
        "carbon group, alkaline earth metals group, and transition elements");
  CHECK(family_of(*Element::from_symbol("Sn")) == ElementFamily::CarbonGroup);
  CHECK_FALSE(family_of(*Element::from_symbol("O")).has_value());
}

TEST_CASE("candidate bullets") {
  const std::string response =
      "Here are five options:\n"
      "* LiNi0.8Mn0.1Co0.05Al0.05O2: Al stabilises the layers.\n"
      "  More detail on the same candidate.\n"
      "* **LiNi0.8Mn0.1Co0.1Mg0.02O2** - Mg pillars.\n"
      "- LiCoO2 is not a bullet\n"
      "* A bullet without a formula\n"
      "* Li1.2Ni0.6Mn0.2O2.\n";
  const auto parsed = parse_candidate_bullets(response);
  REQUIRE(parsed.candidates.size() == 3);
  CHECK(parsed.candidates[0].formula == F("LiNi0.8Mn0.1Co0.05Al0.05O2"));
  CHECK(parsed.candidates[0].reasoning.find("More detail") != std::string::npos);
  CHECK(parsed.candidates[1].formula == F("LiNi0.8Mn0.1Co0.1Mg0.02O2"));
  CHECK(parsed.candidates[2].formula == F("Li1.2Ni0.6Mn0.2O2"));
  CHECK(parsed.skipped.size() == 1);
  CHECK(kind_of([] { parse_candidate_bullets("no bullets here\n- LiCoO2\n"); }) == ErrorKind::NoCandidatesFound);

  const auto found = extract_formulas("Compare LiCoO2 with Li2MnO3, not Li or O.");
  REQUIRE(found.size() == 2);
  CHECK(found[1] == F("Li2MnO3"));
}

TEST_CASE("comparison winner") {
  const auto a = F("SiMg");
  const auto b = F("MgB");
  CHECK(parse_comparison_winner("SiMg is discussed first.\nMgB next.\n* SiMg", a, b) == a);
  CHECK(parse_comparison_winner("* SiMg seemed good\nbut\n* MgB\nfinal words", a, b) == b);
  CHECK(kind_of([&] { parse_comparison_winner("SiMg wins", a, b); }) == ErrorKind::NoMarkedLine);
  CHECK(kind_of([&] { parse_comparison_winner("* SiMg beats MgB", a, b); }) == ErrorKind::AmbiguousWinner);
  CHECK(kind_of([&] { parse_comparison_winner("* LiCoO2", a, b); }) == ErrorKind::AmbiguousWinner);
}

TEST_CASE("comparator cache and retries") {
  const auto a = F("SiMg");
  const auto b = F("MgB");
  ComparatorCache cache;
  QueueBackend backend({"unclear", "* MgB"});
  std::vector<ComparisonRecord> verdicts;
  auto on_verdict = [&](const ComparisonRecord& r) { verdicts.push_back(r); };
  CHECK(compare_voltage(a, b, backend, cache, {}, on_verdict) == Ordering::SecondWins);
  CHECK(backend.seen.size() == 2);
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].winner == b);
  // Cached in either orientation, no further calls.
  CHECK(compare_voltage(b, a, backend, cache, {}, on_verdict) == Ordering::FirstWins);
  CHECK(compare_voltage(a, b, backend, cache) == Ordering::SecondWins);
  CHECK(backend.seen.size() == 2);
  CHECK(cache.size() == 1);

  QueueBackend stubborn({"no idea", "* SiMg or SiCa"});
  try {
    compare_voltage(a, F("SiCa"), stubborn, cache);
    FAIL("expected ComparatorFailure");
  } catch (const ComparatorFailure& e) {
    CHECK(e.kind() == ErrorKind::ComparatorFailure);
    CHECK(e.first() == a);
    CHECK(e.last_response() == "* SiMg or SiCa");
  }
  CHECK(stubborn.seen.size() == 2);
  CHECK(kind_of([&] { cache.store({a, b, F("LiCoO2"), "", "operator"}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("scripted backend") {
  Transcript t;
  ExchangeMatcher m1;
  m1.template_id = TemplateId::VoltageCompare;
  m1.bindings = {{"material_a", "SiMg"}};
  t.exchanges.push_back({m1, "* SiMg"});
  ExchangeMatcher m2;
  m2.prompt_contains = "MgB";
  t.exchanges.push_back({m2, "* MgB"});

  const auto round_trip = Transcript::parse(t.to_jsonl());
  REQUIRE(round_trip.exchanges.size() == 2);
  CHECK(round_trip.exchanges[0].match.bindings.at("material_a") == "SiMg");

  ScriptedBackend backend(t);
  CHECK(backend.send(voltage_request(F("SiMg"), F("MgB"))) == "* SiMg");
  CHECK(backend.position() == 1);
  CHECK(backend.send(voltage_request(F("SiCa"), F("MgB"))) == "* MgB");
  CHECK(kind_of([&] { backend.send(voltage_request(F("SiCa"), F("MgB"))); }) == ErrorKind::TranscriptExhausted);

  ScriptedBackend drifting(t);
  CHECK(kind_of([&] { drifting.send(voltage_request(F("MgB"), F("SiMg"))); }) == ErrorKind::TranscriptDrift);
  CHECK(drifting.position() == 0);
  drifting.seek(1);
  CHECK(drifting.send(voltage_request(F("MgB"), F("SiMg"))) == "* MgB");
  CHECK(kind_of([&] { drifting.seek(3); }) == ErrorKind::TranscriptExhausted);

  CHECK(kind_of([] { Transcript::parse("{\"match\":{}}\n"); }) == ErrorKind::TranscriptDrift);
  CHECK(kind_of([] { Transcript::load("/nonexistent.jsonl"); }) == ErrorKind::FileUnreadable);
}

TEST_CASE("recording backend replays what it saw") {
  QueueBackend inner({"* SiMg", "* MgB"});
  RecordingBackend recorder(inner);
  recorder.send(voltage_request(F("SiMg"), F("MgB")));
  recorder.send(voltage_request(F("SiCa"), F("MgB")));
  ScriptedBackend replay(recorder.transcript());
  CHECK(replay.send(voltage_request(F("SiMg"), F("MgB"))) == "* SiMg");
  CHECK(kind_of([&] { replay.send(voltage_request(F("SiMg"), F("MgB"))); }) == ErrorKind::TranscriptDrift);
}

TEST_CASE("shipped transcripts load") {
  CHECK(Transcript::load(testing::data_path("explore_nmc811.jsonl")).exchanges.size() == 24);
  CHECK(Transcript::load(testing::data_path("explore_k2c2n3.jsonl")).exchanges.size() == 9);
  CHECK(Transcript::load(testing::data_path("voltage_nmc811.jsonl")).exchanges.size() == 67);
}

TEST_CASE("http chat adapter") {
  ChatRequest r = voltage_request(F("SiMg"), F("MgB"));
  r.model_tag = "gpt-4";
  r.history.push_back({"user", "earlier"});
  r.history.push_back({"assistant", "reply"});
  const auto body = HttpChatBackend::request_body(r);
  CHECK(body["model"] == "gpt-4");
  CHECK(body["temperature"] == 1.0);
  CHECK(body["frequency_penalty"] == 0.2);
  REQUIRE(body["messages"].size() == 3);
  CHECK(body["messages"][2]["content"] == r.prompt);
  CHECK(HttpChatBackend::response_text(R"({"choices":[{"message":{"content":"* SiMg"}}]})") == "* SiMg");
  CHECK(kind_of([] { HttpChatBackend::response_text("{}"); }) == ErrorKind::BackendUnavailable);
  CHECK(kind_of([] { HttpChatBackend::response_text("<html>"); }) == ErrorKind::BackendUnavailable);

  HttpChatSettings settings;
  settings.api_key_env = "CATHODE_TEST_KEY_THAT_IS_UNSET";
  HttpChatBackend backend(settings);
  CHECK(kind_of([&] { backend.send(r); }) == ErrorKind::BackendUnavailable);

  r.sampling.temperature = -1;
  CHECK(kind_of([&] { r.validate(); }) == ErrorKind::InvalidArgument);
}
