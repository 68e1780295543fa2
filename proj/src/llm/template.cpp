#include "cathode/llm/template.hpp"

#include <optional>

#include "cathode/error.hpp"

namespace cathode {
namespace {

using Node = PromptTemplate::Node;

bool is_name_char(char c, bool first) {
  if (c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  return !first && c >= '0' && c <= '9';
}

struct Tag {
  char sigil = 0;  // 0, '?', '#', '/'
  std::string name;
  std::size_t length = 0;
};

// Recognizes a tag starting at text[pos] == '{'.
std::optional<Tag> read_tag(const std::string& text, std::size_t pos) {
  std::size_t i = pos + 1;
  Tag tag;
  if (i < text.size() && (text[i] == '?' || text[i] == '#' || text[i] == '/')) tag.sigil = text[i++];
  const std::size_t name_start = i;
  while (i < text.size() && is_name_char(text[i], i == name_start)) ++i;
  if (i == name_start || i >= text.size() || text[i] != '}') return std::nullopt;
  tag.name = text.substr(name_start, i - name_start);
  tag.length = i + 1 - pos;
  return tag;
}

struct Frame {
  std::vector<Node> nodes;
  Node::Kind kind = Node::Kind::Text;
  std::string name;
};

void collect_required(const std::vector<Node>& nodes, std::set<std::string>& out) {
  for (const auto& n : nodes) {
    switch (n.kind) {
      case Node::Kind::Text: break;
      case Node::Kind::Value: out.insert(n.text); break;
      case Node::Kind::Conditional:
        out.insert(n.text);
        collect_required(n.children, out);
        break;
      case Node::Kind::Loop: out.insert(n.text); break;
    }
  }
}

struct Scope {
  const PromptBindings& top;
  const BindingItem* item = nullptr;
};

void render_nodes(const std::vector<Node>& nodes, const Scope& scope, std::string& out) {
  for (const auto& n : nodes) {
    switch (n.kind) {
      case Node::Kind::Text: out += n.text; break;
      case Node::Kind::Value: {
        if (scope.item != nullptr) {
          if (auto it = scope.item->find(n.text); it != scope.item->end()) {
            out += it->second;
            break;
          }
        }
        auto it = scope.top.values.find(n.text);
        if (it == scope.top.values.end()) throw Error(ErrorKind::MissingBinding, n.text);
        out += it->second;
        break;
      }
      case Node::Kind::Conditional: {
        bool present = false;
        bool resolved = false;
        if (scope.item != nullptr) {
          if (auto it = scope.item->find(n.text); it != scope.item->end()) {
            present = !it->second.empty();
            resolved = true;
          }
        }
        if (!resolved) {
          if (auto it = scope.top.values.find(n.text); it != scope.top.values.end()) {
            present = !it->second.empty();
            resolved = true;
          } else if (auto lt = scope.top.lists.find(n.text); lt != scope.top.lists.end()) {
            present = !lt->second.empty();
            resolved = true;
          }
        }
        if (!resolved && scope.item == nullptr) throw Error(ErrorKind::MissingBinding, n.text);
        if (present) render_nodes(n.children, scope, out);
        break;
      }
      case Node::Kind::Loop: {
        auto it = scope.top.lists.find(n.text);
        if (it == scope.top.lists.end()) throw Error(ErrorKind::MissingBinding, n.text);
        for (const auto& item : it->second) render_nodes(n.children, Scope{scope.top, &item}, out);
        break;
      }
    }
  }
}

}  // namespace

PromptTemplate PromptTemplate::compile(std::string body) {
  std::vector<Frame> stack(1);
  std::string text;
  auto flush = [&] {
    if (!text.empty()) {
      stack.back().nodes.push_back(Node{Node::Kind::Text, std::move(text), {}});
      text.clear();
    }
  };

  std::size_t pos = 0;
  while (pos < body.size()) {
    if (body[pos] != '{') {
      text += body[pos++];
      continue;
    }
    auto tag = read_tag(body, pos);
    if (!tag) {
      text += body[pos++];
      continue;
    }
    flush();
    pos += tag->length;
    if (tag->sigil == 0) {
      stack.back().nodes.push_back(Node{Node::Kind::Value, tag->name, {}});
    } else if (tag->sigil == '?' || tag->sigil == '#') {
      Frame f;
      f.kind = tag->sigil == '?' ? Node::Kind::Conditional : Node::Kind::Loop;
      f.name = tag->name;
      stack.push_back(std::move(f));
    } else {
      if (stack.size() < 2 || stack.back().name != tag->name) {
        throw Error(ErrorKind::TemplateSyntax, "unexpected {/" + tag->name + "}");
      }
      Frame done = std::move(stack.back());
      stack.pop_back();
      stack.back().nodes.push_back(Node{done.kind, done.name, std::move(done.nodes)});
    }
  }
  flush();
  if (stack.size() != 1) throw Error(ErrorKind::TemplateSyntax, "unclosed section {" + stack.back().name + "}");

  PromptTemplate t;
  t.body_ = std::move(body);
  collect_required(stack.front().nodes, t.required_);
  t.nodes_ = std::make_shared<const std::vector<Node>>(std::move(stack.front().nodes));
  return t;
}

std::string PromptTemplate::render(const PromptBindings& bindings) const {
  std::string out;
  out.reserve(body_.size() + 256);
  render_nodes(*nodes_, Scope{bindings}, out);
  return out;
}

bool contains_placeholder(const std::string& text) {
  for (std::size_t pos = text.find('{'); pos != std::string::npos; pos = text.find('{', pos + 1)) {
    if (read_tag(text, pos)) return true;
  }
  return false;
}

}  // namespace cathode
