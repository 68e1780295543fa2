#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cathode/formula/formula.hpp"
#include "cathode/llm/template.hpp"

namespace cathode {

enum class TemplateId {
  InitialRoundInitialCycle,
  SubsequentRound,
  InitialRoundSubsequentCycle,
  VoltageCompare,
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::InitialRoundInitialCycle,
    TemplateId::SubsequentRound,
    TemplateId::InitialRoundSubsequentCycle,
    TemplateId::VoltageCompare,
};

std::string_view to_string(TemplateId id);
// Throws UnknownTemplate.
TemplateId template_id_from_string(std::string_view name);

// Shipped template for id (compiled once).
const PromptTemplate& builtin_template(TemplateId id);

// Renders the shipped template. Throws MissingBinding.
std::string render_prompt(TemplateId id, const PromptBindings& bindings);
std::string render_prompt(std::string_view id, const PromptBindings& bindings);

// Compiles an operator-edited body and checks that it references exactly the
// placeholders of the shipped template. Throws TemplateSyntax or
// MissingBinding (naming the absent or unknown placeholder).
PromptTemplate validate_override(TemplateId id, std::string body);

// Element families named in the generation prompts.
enum class ElementFamily { CarbonGroup, AlkalineEarthMetals, TransitionElements };
std::optional<ElementFamily> family_of(Element e);

// Family list for the subsequent-cycle prompt: the three families minus those
// of elements in cycle_input that the seed does not contain. Falls back to
// all three when every family would be excluded.
std::string allowed_groups_text(const Formula& cycle_input, const Formula& seed);

struct InvalidEntry {
  Formula formula;
  std::optional<Formula> hint;
};

PromptBindings initial_bindings(const Formula& material);
PromptBindings subsequent_cycle_bindings(const Formula& material, const Formula& seed);
PromptBindings subsequent_round_bindings(const std::vector<Formula>& existing,
                                         const std::vector<InvalidEntry>& invalid);
PromptBindings voltage_bindings(const Formula& a, const Formula& b);

}  // namespace cathode
