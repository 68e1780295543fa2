#include "cathode/llm/prompts.hpp"

#include <algorithm>
#include <array>

#include "cathode/error.hpp"

namespace cathode {
namespace detail {
std::string_view prompt_asset(std::string_view name);
}  // namespace detail

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::InitialRoundInitialCycle: return "initial_round_initial_cycle";
    case TemplateId::SubsequentRound: return "subsequent_round";
    case TemplateId::InitialRoundSubsequentCycle: return "initial_round_subsequent_cycle";
    case TemplateId::VoltageCompare: return "voltage_compare";
  }
  return "unknown";
}

TemplateId template_id_from_string(std::string_view name) {
  for (TemplateId id : kAllTemplates) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorKind::UnknownTemplate, std::string(name));
}

const PromptTemplate& builtin_template(TemplateId id) {
  static const std::array<PromptTemplate, std::size(kAllTemplates)> templates = [] {
    std::array<PromptTemplate, std::size(kAllTemplates)> out;
    for (TemplateId t : kAllTemplates) {
      out[static_cast<std::size_t>(t)] = PromptTemplate::compile(std::string(detail::prompt_asset(to_string(t))));
    }
    return out;
  }();
  return templates[static_cast<std::size_t>(id)];
}

std::string render_prompt(TemplateId id, const PromptBindings& bindings) {
  return builtin_template(id).render(bindings);
}

std::string render_prompt(std::string_view id, const PromptBindings& bindings) {
  return render_prompt(template_id_from_string(id), bindings);
}

PromptTemplate validate_override(TemplateId id, std::string body) {
  PromptTemplate t = PromptTemplate::compile(std::move(body));
  const auto& expected = builtin_template(id).required_names();
  for (const auto& name : expected) {
    if (!t.required_names().contains(name)) {
      throw Error(ErrorKind::MissingBinding, "override lacks placeholder {" + name + "}");
    }
  }
  for (const auto& name : t.required_names()) {
    if (!expected.contains(name)) {
      throw Error(ErrorKind::MissingBinding, "override uses unknown placeholder {" + name + "}");
    }
  }
  return t;
}

std::optional<ElementFamily> family_of(Element e) {
  const int z = e.atomic_number();
  switch (z) {
    case 6: case 14: case 32: case 50: case 82: case 114:
      return ElementFamily::CarbonGroup;
    case 4: case 12: case 20: case 38: case 56: case 88:
      return ElementFamily::AlkalineEarthMetals;
    default: break;
  }
  // d-block: groups 3-12 of periods 4-7 (lanthanides/actinides excluded).
  if ((z >= 21 && z <= 30) || (z >= 39 && z <= 48) || (z >= 72 && z <= 80) || (z >= 104 && z <= 112)) {
    return ElementFamily::TransitionElements;
  }
  return std::nullopt;
}

std::string allowed_groups_text(const Formula& cycle_input, const Formula& seed) {
  static constexpr std::pair<ElementFamily, std::string_view> kFamilies[] = {
      {ElementFamily::CarbonGroup, "carbon group"},
      {ElementFamily::AlkalineEarthMetals, "alkaline earth metals group"},
      {ElementFamily::TransitionElements, "transition elements"},
  };
  std::vector<ElementFamily> excluded;
  for (const Term& t : cycle_input.terms()) {
    if (seed.contains(t.element)) continue;
    if (auto fam = family_of(t.element)) excluded.push_back(*fam);
  }
  std::vector<std::string_view> allowed;
  for (const auto& [family, name] : kFamilies) {
    if (std::find(excluded.begin(), excluded.end(), family) == excluded.end()) allowed.push_back(name);
  }
  if (allowed.empty()) {
    for (const auto& [family, name] : kFamilies) allowed.push_back(name);
  }
  std::string out;
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    if (i > 0) out += i + 1 == allowed.size() ? ", and " : ", ";
    out += allowed[i];
  }
  return out;
}

PromptBindings initial_bindings(const Formula& material) {
  return PromptBindings{}.set("material", material.render());
}

PromptBindings subsequent_cycle_bindings(const Formula& material, const Formula& seed) {
  return PromptBindings{}
      .set("material", material.render())
      .set("allowed_groups", allowed_groups_text(material, seed));
}

PromptBindings subsequent_round_bindings(const std::vector<Formula>& existing,
                                         const std::vector<InvalidEntry>& invalid) {
  std::vector<BindingItem> existing_items;
  for (const auto& f : existing) existing_items.push_back({{"formula", f.render()}});
  std::vector<BindingItem> invalid_items;
  for (const auto& entry : invalid) {
    BindingItem item{{"formula", entry.formula.render()}};
    if (entry.hint) item["hint"] = entry.hint->render();
    invalid_items.push_back(std::move(item));
  }
  return PromptBindings{}.set_list("existing", std::move(existing_items)).set_list("invalid", std::move(invalid_items));
}

PromptBindings voltage_bindings(const Formula& a, const Formula& b) {
  return PromptBindings{}.set("material_a", a.render()).set("material_b", b.render());
}

}  // namespace cathode
