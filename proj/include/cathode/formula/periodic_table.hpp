#pragma once

#include <array>
#include <map>
#include <optional>

#include "cathode/formula/element.hpp"

namespace cathode {

// Atomic masses in g/mol, keyed by element.
class PeriodicTable {
 public:
  // Conventional standard atomic weights for all 118 elements; for elements
  // without a stable isotope the mass number of the longest-lived isotope.
  static const PeriodicTable& standard();

  // A custom table; throws InvalidArgument on non-positive masses.
  explicit PeriodicTable(const std::map<Element, double>& masses);

  std::optional<double> mass(Element e) const noexcept;
  bool contains(Element e) const noexcept { return mass(e).has_value(); }

 private:
  PeriodicTable() = default;
  std::array<double, kElementCount + 1> masses_{};  // 0 = absent
};

}  // namespace cathode
