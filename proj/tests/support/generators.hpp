#pragma once

#include <random>
#include <string>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode::testing {

// Seeded random formulas over the elements that show up in cathode work.
class FormulaGen {
 public:
  explicit FormulaGen(std::uint32_t seed) : rng_(seed) {}

  static const std::vector<std::string>& pool() {
    static const std::vector<std::string> symbols = {"Li", "Ni", "Mn", "Co", "O",  "Si", "Mg", "Ca", "Al", "Ti",
                                                     "Fe", "B",  "C",  "Zr", "V",  "Zn", "Sr", "Cu", "Cr", "Sn",
                                                     "Na", "K",  "P",  "F",  "S",  "Y",  "Sc", "Ba", "Mo", "W"};
    return symbols;
  }

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  // Coefficients on a 0.01 grid in (0, 4], or exactly 1.
  double coefficient() {
    if (uniform(0, 4) == 0) return 1.0;
    return static_cast<double>(uniform(1, 400)) / 100.0;
  }

  std::vector<Term> terms(bool with_lithium = true) {
    std::vector<std::string> symbols = pool();
    std::shuffle(symbols.begin(), symbols.end(), rng_);
    const std::size_t n = uniform(1, 7);
    std::vector<Term> out;
    if (with_lithium) out.push_back({*Element::from_symbol("Li"), coefficient()});
    for (std::size_t i = 0; out.size() < n + (with_lithium ? 1 : 0) && i < symbols.size(); ++i) {
      if (symbols[i] == "Li") continue;
      out.push_back({*Element::from_symbol(symbols[i]), coefficient()});
    }
    return out;
  }

  Formula formula(bool with_lithium = true) { return Formula::from_terms(terms(with_lithium)); }

  // Source text with random spelling choices: explicit "1", trailing zeros,
  // leading-dot decimals and repeated elements.
  std::string text(const std::vector<Term>& ts) {
    std::string s;
    for (const auto& t : ts) {
      s += t.element.symbol();
      std::string c = format_coefficient(t.coefficient);
      if (c == "1" && uniform(0, 1) == 0) c.clear();
      else if (c.find('.') != std::string::npos && uniform(0, 2) == 0) c += "0";
      if (c.rfind("0.", 0) == 0 && uniform(0, 3) == 0) c.erase(0, 1);
      s += c;
    }
    return s;
  }

  // A near copy of f: each coefficient nudged by up to `spread` relative.
  Formula perturbed(const Formula& f, double spread) {
    std::vector<Term> out;
    for (const auto& t : f.terms()) {
      const double factor = 1.0 + spread * (2.0 * unit() - 1.0);
      out.push_back({t.element, t.coefficient * factor});
    }
    return Formula::from_terms(out);
  }

  std::mt19937& rng() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace cathode::testing
