#include "cathode/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cathode/error.hpp"

namespace cathode {
namespace {

Element element(std::string_view symbol) {
  auto e = Element::from_symbol(symbol);
  if (!e) throw Error(ErrorKind::UnknownElement, std::string(symbol));
  return *e;
}

std::vector<Element> elements(std::initializer_list<std::string_view> symbols) {
  std::vector<Element> out;
  for (auto s : symbols) out.push_back(element(s));
  return out;
}

}  // namespace

const ValenceTable& ValenceTable::standard() {
  static const ValenceTable table = [] {
    const std::pair<std::string_view, int> entries[] = {
        {"C", 4},  {"Si", 4}, {"Ge", 4}, {"Sn", 4}, {"Pb", 4}, {"Be", 2}, {"Mg", 2}, {"Ca", 2},
        {"Sr", 2}, {"Ba", 2}, {"Sc", 3}, {"Ti", 4}, {"V", 3},  {"Cr", 3}, {"Mn", 3}, {"Fe", 3},
        {"Co", 3}, {"Ni", 3}, {"Cu", 2}, {"Zn", 2}, {"Mo", 6}, {"Zr", 4}, {"Y", 3},  {"Li", 1},
        {"O", -2}, {"Na", 1}, {"K", 1},  {"B", 3},  {"Al", 3}, {"Ga", 3},
    };
    std::map<Element, int> map;
    for (const auto& [symbol, valence] : entries) map.emplace(element(symbol), valence);
    return ValenceTable(std::move(map));
  }();
  return table;
}

ValenceTable ValenceTable::with(Element e, int valence) const {
  ValenceTable copy = *this;
  copy.entries_[e] = valence;
  return copy;
}

std::optional<int> ValenceTable::valence(Element e) const {
  auto it = entries_.find(e);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const GroupWeights& GroupWeights::standard() {
  static const GroupWeights weights = [] {
    GroupWeights w;
    w.groups = {
        elements({"Li"}),
        elements({"Mn", "Co", "Ni"}),
        elements({"Fe", "Cu", "Zn", "V", "Cr", "Ti", "Mo"}),
        elements({"O", "P", "F", "S", "Cl", "Br", "I"}),
        elements({"Mg", "Al", "Si", "B", "Zr", "C", "Be", "Ca", "Na", "K", "Sn", "Sr"}),
    };
    return w;
  }();
  return weights;
}

void GroupWeights::validate() const {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvalidArgument, "distance weights must be finite and nonnegative");
    }
  }
  std::set<Element> seen;
  for (const auto& group : groups) {
    for (Element e : group) {
      if (!seen.insert(e).second) {
        throw Error(ErrorKind::InvalidArgument,
                    "element " + std::string(e.symbol()) + " appears in more than one distance group");
      }
    }
  }
}

std::array<double, GroupWeights::kLevels> GroupWeights::levels(const Formula& f) const {
  std::array<double, kLevels> out{};
  for (const Term& t : f.terms()) {
    std::size_t level = kGroups;  // "everything else"
    for (std::size_t g = 0; g < kGroups; ++g) {
      if (std::find(groups[g].begin(), groups[g].end(), t.element) != groups[g].end()) {
        level = g;
        break;
      }
    }
    out[level] += t.coefficient;
  }
  out[kLevels - 1] = static_cast<double>(f.species_count());
  return out;
}

double theoretical_capacity(const Formula& f, const PeriodicTable& table) {
  const double lithium = f.coefficient(element("Li"));
  const double weight = molecular_weight(f, table);
  if (lithium == 0.0) return 0.0;
  return lithium * kFaraday / (3.6 * weight);
}

double total_charge(const Formula& f, const ValenceTable& valences) {
  double charge = 0.0;
  for (const Term& t : f.terms()) {
    const auto v = valences.valence(t.element);
    if (!v) {
      throw Error(ErrorKind::UnknownValence,
                  std::string(t.element.symbol()) + " in " + f.render());
    }
    charge += t.coefficient * *v;
  }
  return charge;
}

double formula_distance(const Formula& a, const Formula& b, const GroupWeights& weights) {
  const auto la = weights.levels(a);
  const auto lb = weights.levels(b);
  double d = 0.0;
  for (std::size_t i = 0; i < GroupWeights::kLevels; ++i) d += weights.weights[i] * std::abs(la[i] - lb[i]);
  return d;
}

bool range_match(const Formula& a, const Formula& b, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "tau must lie in (0, 1)");
  auto within = [tau](double x, double y) {
    const double hi = std::max(x, y);
    return std::abs(x - y) / hi <= tau;
  };
  for (const Term& t : a.terms()) {
    if (!within(t.coefficient, b.coefficient(t.element))) return false;
  }
  for (const Term& t : b.terms()) {
    if (!a.contains(t.element)) return false;
  }
  return true;
}

bool decide(const Formula& input, const Formula& output, const PeriodicTable& table) {
  return theoretical_capacity(output, table) > theoretical_capacity(input, table);
}

}  // namespace cathode
