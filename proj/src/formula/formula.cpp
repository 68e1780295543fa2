#include "cathode/formula/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "cathode/error.hpp"

namespace cathode {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void merge_into(std::vector<Term>& terms, Term term, bool& merged) {
  for (auto& existing : terms) {
    if (existing.element == term.element) {
      existing.coefficient += term.coefficient;
      merged = true;
      return;
    }
  }
  terms.push_back(term);
}

}  // namespace

Formula Formula::parse(std::string_view text) {
  const std::string_view body = trim(text);
  if (body.empty()) throw Error(ErrorKind::EmptyFormula, "formula text is empty");

  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (!(is_upper(c) || is_lower(c) || is_digit(c) || c == '.')) {
      throw Error(ErrorKind::InvalidCharacter,
                  "unexpected character '" + std::string(1, c) + "' at position " + std::to_string(i));
    }
  }

  Formula f;
  f.source_text_ = std::string(text);
  std::vector<Term> raw;
  std::size_t pos = 0;
  while (pos < body.size()) {
    if (!is_upper(body[pos])) {
      if (is_lower(body[pos])) {
        throw Error(ErrorKind::UnknownElement, std::string(body.substr(pos, 1)));
      }
      throw Error(ErrorKind::MalformedCoefficient,
                  "number without element at position " + std::to_string(pos));
    }
    std::optional<Element> element;
    std::size_t symbol_len = 1;
    if (pos + 1 < body.size() && is_lower(body[pos + 1])) {
      symbol_len = 2;
      element = Element::from_symbol(body.substr(pos, 2));
    } else {
      element = Element::from_symbol(body.substr(pos, 1));
    }
    if (!element) throw Error(ErrorKind::UnknownElement, std::string(body.substr(pos, symbol_len)));
    pos += symbol_len;

    const std::size_t number_start = pos;
    int dots = 0;
    int digits = 0;
    while (pos < body.size() && (is_digit(body[pos]) || body[pos] == '.')) {
      if (body[pos] == '.') {
        ++dots;
      } else {
        ++digits;
      }
      ++pos;
    }
    double value = 1.0;
    if (pos > number_start) {
      if (dots > 1 || digits == 0) {
        throw Error(ErrorKind::MalformedCoefficient,
                    "bad number at position " + std::to_string(number_start));
      }
      std::string number(body.substr(number_start, pos - number_start));
      if (number.front() == '.') number.insert(number.begin(), '0');
      const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
      if (ec != std::errc{} || end != number.data() + number.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::MalformedCoefficient,
                    "bad number at position " + std::to_string(number_start));
      }
    }
    raw.push_back({*element, value});
  }

  for (const Term& t : raw) merge_into(f.terms_, t, f.merged_duplicates_);
  std::erase_if(f.terms_, [](const Term& t) { return t.coefficient == 0.0; });
  if (f.terms_.empty()) throw Error(ErrorKind::EmptyFormula, "all coefficients are zero");
  return f;
}

Formula Formula::from_terms(std::span<const Term> terms) {
  Formula f;
  for (const Term& t : terms) {
    if (!std::isfinite(t.coefficient) || t.coefficient < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "coefficient must be finite and nonnegative");
    }
    merge_into(f.terms_, t, f.merged_duplicates_);
  }
  std::erase_if(f.terms_, [](const Term& t) { return t.coefficient == 0.0; });
  if (f.terms_.empty()) throw Error(ErrorKind::EmptyFormula, "no positive terms");
  f.source_text_ = f.render();
  return f;
}

double Formula::coefficient(Element e) const noexcept {
  for (const Term& t : terms_) {
    if (t.element == e) return t.coefficient;
  }
  return 0.0;
}

double Formula::coefficient(std::string_view symbol) const noexcept {
  const auto e = Element::from_symbol(symbol);
  return e ? coefficient(*e) : 0.0;
}

bool Formula::contains(Element e) const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [e](const Term& t) { return t.element == e; });
}

std::string format_coefficient(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 10);
  if (ec != std::errc{}) return std::to_string(value);
  std::string out(buf, end);
  if (out.find('.') != std::string::npos) {
    while (!out.empty() && out.back() == '0') out.pop_back();
    if (!out.empty() && out.back() == '.') out.pop_back();
  }
  return out;
}

std::string Formula::render() const {
  std::string out;
  for (const Term& t : terms_) {
    out += t.element.symbol();
    const std::string number = format_coefficient(t.coefficient);
    if (number != "1") out += number;
  }
  return out;
}

std::string Formula::canonical_key() const {
  std::vector<Term> sorted = terms_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Term& a, const Term& b) { return a.element < b.element; });
  std::string key;
  for (const Term& t : sorted) {
    key += t.element.symbol();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", t.coefficient);
    key += buf;
  }
  return key;
}

Formula Formula::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  }
  Formula f = *this;
  for (Term& t : f.terms_) t.coefficient *= factor;
  f.source_text_ = f.render();
  return f;
}

Formula Formula::combined(const Formula& other) const {
  std::vector<Term> all(terms_.begin(), terms_.end());
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return from_terms(all);
}

bool Formula::equivalent(const Formula& other, double tolerance) const {
  if (terms_.size() != other.terms_.size()) return false;
  for (const Term& t : terms_) {
    if (!other.contains(t.element)) return false;
    if (std::abs(t.coefficient - other.coefficient(t.element)) > tolerance) return false;
  }
  return true;
}

double molecular_weight(const Formula& f, const PeriodicTable& table) {
  double total = 0.0;
  for (const Term& t : f.terms()) {
    const auto mass = table.mass(t.element);
    if (!mass) throw Error(ErrorKind::UnknownElement, std::string(t.element.symbol()));
    total += t.coefficient * *mass;
  }
  return total;
}

}  // namespace cathode
