#include "cathode/llm/response_parser.hpp"

#include "cathode/error.hpp"

namespace cathode {
namespace {

bool is_token_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.';
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool is_bullet(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first != std::string_view::npos && line[first] == '*';
}

std::string trim_reasoning(std::string_view s) {
  const auto first = s.find_first_not_of(" \t*:;,-");
  if (first == std::string_view::npos) return {};
  s.remove_prefix(first);
  // Dashes written as UTF-8 em/en dash.
  for (std::string_view dash : {"\xE2\x80\x94", "\xE2\x80\x93"}) {
    if (s.starts_with(dash)) s.remove_prefix(dash.size());
  }
  const auto f2 = s.find_first_not_of(" \t*:;,-");
  if (f2 == std::string_view::npos) return {};
  s.remove_prefix(f2);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

struct Located {
  Formula formula;
  std::size_t end;  // offset just past the token
};

std::vector<Located> locate_formulas(std::string_view line) {
  std::vector<Located> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    if (!is_token_char(line[pos])) {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < line.size() && is_token_char(line[end])) ++end;
    std::size_t begin = pos;
    while (begin < end && !(line[begin] >= 'A' && line[begin] <= 'Z')) ++begin;
    std::size_t stop = end;
    while (stop > begin && line[stop - 1] == '.') --stop;
    if (stop > begin) {
      try {
        Formula f = Formula::parse(line.substr(begin, stop - begin));
        if (f.species_count() >= 2) out.push_back({std::move(f), stop});
      } catch (const Error&) {
      }
    }
    pos = end;
  }
  return out;
}

}  // namespace

std::vector<Formula> extract_formulas(std::string_view line) {
  std::vector<Formula> out;
  for (auto& l : locate_formulas(line)) out.push_back(std::move(l.formula));
  return out;
}

BulletParse parse_candidate_bullets(std::string_view response) {
  BulletParse result;
  const auto lines = split_lines(response);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_bullet(lines[i])) continue;
    auto found = locate_formulas(lines[i]);
    if (found.empty()) {
      result.skipped.emplace_back(lines[i]);
      continue;
    }
    std::string reasoning = trim_reasoning(lines[i].substr(found.front().end));
    for (std::size_t j = i + 1; j < lines.size() && !is_bullet(lines[j]); ++j) {
      const std::string more = trim_reasoning(lines[j]);
      if (more.empty()) continue;
      if (!reasoning.empty()) reasoning += ' ';
      reasoning += more;
    }
    result.candidates.push_back({std::move(found.front().formula), std::move(reasoning)});
  }
  if (result.candidates.empty()) {
    throw Error(ErrorKind::NoCandidatesFound, "response contains no '*' bullet with a formula");
  }
  return result;
}

Formula parse_comparison_winner(std::string_view response, const Formula& a, const Formula& b) {
  const auto lines = split_lines(response);
  bool any_marked = false;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (!is_bullet(*it)) continue;
    any_marked = true;
    bool names_a = false;
    bool names_b = false;
    for (const auto& f : extract_formulas(*it)) {
      names_a = names_a || f == a;
      names_b = names_b || f == b;
    }
    if (names_a && names_b) {
      throw Error(ErrorKind::AmbiguousWinner, "marked line names both " + a.render() + " and " + b.render());
    }
    if (names_a) return a;
    if (names_b) return b;
  }
  if (!any_marked) throw Error(ErrorKind::NoMarkedLine, "response has no '*' line");
  throw Error(ErrorKind::AmbiguousWinner, "no marked line names " + a.render() + " or " + b.render());
}

}  // namespace cathode
