#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode {

struct CandidateBullet {
  Formula formula;
  std::string reasoning;  // prose following the formula, continuation lines included
};

struct BulletParse {
  std::vector<CandidateBullet> candidates;
  std::vector<std::string> skipped;  // '*' lines without a usable formula
};

// Formula-looking tokens of a line, in order: maximal [A-Za-z0-9.] runs,
// trimmed to start at an uppercase letter and to drop trailing dots, that
// parse and contain at least two elements.
std::vector<Formula> extract_formulas(std::string_view line);

// One candidate per line whose first non-space character is '*'. Throws
// NoCandidatesFound when no bullet yields a formula.
BulletParse parse_candidate_bullets(std::string_view response);

// Winner of a pairwise comparison: scanning upward from the last line, the
// first '*'-marked line naming a or b decides. Throws NoMarkedLine when the
// response has no marked line and AmbiguousWinner when the deciding line
// names both, or no marked line names either.
Formula parse_comparison_winner(std::string_view response, const Formula& a, const Formula& b);

}  // namespace cathode
