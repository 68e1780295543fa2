#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cathode {

inline constexpr int kElementCount = 118;

// A chemical element, identified by atomic number. Only the 118 known
// elements can be constructed.
class Element {
 public:
  static std::optional<Element> from_symbol(std::string_view symbol);
  static std::optional<Element> from_atomic_number(int z);

  int atomic_number() const noexcept { return z_; }
  std::string_view symbol() const noexcept;

  friend constexpr auto operator<=>(Element, Element) = default;

 private:
  explicit constexpr Element(std::uint8_t z) : z_(z) {}
  std::uint8_t z_;
};

}  // namespace cathode
