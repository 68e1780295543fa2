#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace cathode {

using BindingItem = std::map<std::string, std::string>;

// Values substituted into a prompt template. Scalars fill {name}; lists
// drive {#name}...{/name} loops whose items expose their own fields.
struct PromptBindings {
  std::map<std::string, std::string> values;
  std::map<std::string, std::vector<BindingItem>> lists;

  PromptBindings& set(std::string name, std::string value) {
    values[std::move(name)] = std::move(value);
    return *this;
  }
  PromptBindings& set_list(std::string name, std::vector<BindingItem> items) {
    lists[std::move(name)] = std::move(items);
    return *this;
  }
};

// Minimal placeholder language:
//
//   {name}          substitute a value
//   {?name}...{/name}  emit the block once if name is a non-empty value or list
//   {#name}...{/name}  emit the block for every item of list name
//
// Any other brace text is literal. Top-level names must be bound
// (MissingBinding otherwise); inside a loop, fields missing from the item
// fall back to top-level values and a missing {?field} is simply false.
class PromptTemplate {
 public:
  // Throws TemplateSyntax on unbalanced sections.
  static PromptTemplate compile(std::string body);

  std::string render(const PromptBindings& bindings) const;

  const std::string& body() const noexcept { return body_; }
  // Names referenced outside any loop, i.e. the bindings a caller supplies.
  const std::set<std::string>& required_names() const noexcept { return required_; }

  struct Node;

 private:
  std::string body_;
  std::shared_ptr<const std::vector<Node>> nodes_;
  std::set<std::string> required_;
};

struct PromptTemplate::Node {
  enum class Kind { Text, Value, Conditional, Loop };
  Kind kind;
  std::string text;  // literal text or placeholder name
  std::vector<Node> children;
};

// True when text still contains a {name}, {?name}, {#name} or {/name} token.
bool contains_placeholder(const std::string& text);

}  // namespace cathode
