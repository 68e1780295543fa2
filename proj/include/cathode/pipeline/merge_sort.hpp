#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cathode {

// Top-down stable merge sort driven by a binary oracle: first_wins(a, b)
// returns true when a must precede b. The left half holds the first n/2
// items and, within a merge, the left head is always passed first. Uses at
// most n*ceil(log2 n) oracle calls.
template <class T, class FirstWins>
std::vector<T> merge_sort_by_comparator(std::vector<T> items, FirstWins&& first_wins) {
  if (items.size() < 2) return items;
  const std::size_t mid = items.size() / 2;
  std::vector<T> left(std::make_move_iterator(items.begin()),
                      std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(mid)));
  std::vector<T> right(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(mid)),
                       std::make_move_iterator(items.end()));
  left = merge_sort_by_comparator(std::move(left), first_wins);
  right = merge_sort_by_comparator(std::move(right), first_wins);

  std::vector<T> out;
  out.reserve(left.size() + right.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < left.size() && j < right.size()) {
    if (first_wins(left[i], right[j])) out.push_back(std::move(left[i++]));
    else out.push_back(std::move(right[j++]));
  }
  while (i < left.size()) out.push_back(std::move(left[i++]));
  while (j < right.size()) out.push_back(std::move(right[j++]));
  return out;
}

}  // namespace cathode
