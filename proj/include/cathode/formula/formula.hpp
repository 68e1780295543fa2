#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cathode/formula/element.hpp"
#include "cathode/formula/periodic_table.hpp"

namespace cathode {

// Absolute per-coefficient tolerance used for formula equality.
inline constexpr double kCoefficientTolerance = 1e-9;

struct Term {
  Element element;
  double coefficient;
};

// A flat stoichiometric formula such as "LiNi0.8Mn0.1Co0.1O2".
//
// Terms keep the order in which elements first appear in the source text.
// Repeated elements are merged by summing their coefficients and zero
// coefficients are dropped, so every stored term is unique and positive.
class Formula {
 public:
  // Empty placeholder; parse() and from_terms() never return one.
  Formula() = default;

  // Grammar: (Symbol Number?)+ where Symbol = [A-Z][a-z]? (two-letter
  // symbols win when they name an element) and Number = digits with at most
  // one '.', e.g. "2", "0.05", ".5". Surrounding whitespace is ignored.
  static Formula parse(std::string_view text);

  // Builds a formula from terms; duplicates are merged and zeros dropped.
  // Throws InvalidArgument on negative or non-finite coefficients and
  // EmptyFormula when nothing remains.
  static Formula from_terms(std::span<const Term> terms);

  std::span<const Term> terms() const noexcept { return terms_; }
  const std::string& source_text() const noexcept { return source_text_; }
  bool merged_duplicates() const noexcept { return merged_duplicates_; }

  double coefficient(Element e) const noexcept;
  double coefficient(std::string_view symbol) const noexcept;
  std::size_t species_count() const noexcept { return terms_.size(); }
  bool contains(Element e) const noexcept;

  // Stored order, coefficient 1 omitted, trailing zeros trimmed.
  std::string render() const;

  // Order-independent key: elements by atomic number, coefficients rounded
  // to 1e-9. Equal keys imply equivalent formulas.
  std::string canonical_key() const;

  // Every coefficient multiplied by factor (> 0).
  Formula scaled(double factor) const;
  // Term-wise union with summed coefficients; this formula's order first.
  Formula combined(const Formula& other) const;

  // Same element set, coefficients equal within tolerance.
  bool equivalent(const Formula& other, double tolerance = kCoefficientTolerance) const;
  friend bool operator==(const Formula& a, const Formula& b) { return a.equivalent(b); }

 private:
  std::vector<Term> terms_;
  std::string source_text_;
  bool merged_duplicates_ = false;
};

inline Formula parse_formula(std::string_view text) { return Formula::parse(text); }
inline std::string render_formula(const Formula& f) { return f.render(); }

// Sum of coefficient * atomic mass. Throws UnknownElement when the table
// lacks an element of f.
double molecular_weight(const Formula& f, const PeriodicTable& table = PeriodicTable::standard());

inline double coefficient(const Formula& f, Element e) { return f.coefficient(e); }
inline std::size_t species_count(const Formula& f) { return f.species_count(); }

// Coefficient rendering used by render(): shortest fixed notation, at most
// ten decimals, no trailing zeros.
std::string format_coefficient(double value);

}  // namespace cathode
