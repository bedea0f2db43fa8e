#include "dcxg/type_hierarchy.h"

#include <algorithm>
#include <functional>

#include "dcxg/errors.h"

namespace dcxg {

namespace {
const std::vector<std::string> kNoSupertypes;
}  // namespace

TypeHierarchy::TypeHierarchy() = default;

TypeHierarchy::TypeHierarchy(
    const std::vector<std::pair<std::string, std::vector<std::string>>>
        &declarations) {
  std::vector<ValidationIssue> issues;
  for (const auto &[name, supers] : declarations) {
    if (name == kTopType) continue;
    if (index_.count(name)) {
      issues.push_back({name, "type declared twice"});
      continue;
    }
    index_.emplace(name, declarations_.size());
    std::vector<std::string> filtered;
    for (const std::string &s : supers) {
      if (s != kTopType) filtered.push_back(s);
    }
    declarations_.emplace_back(name, std::move(filtered));
  }
  for (const auto &[name, supers] : declarations_) {
    for (const std::string &s : supers) {
      if (!index_.count(s)) issues.push_back({name, "unknown supertype " + s});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  // Depth-first closure with cycle detection.
  ancestors_.resize(declarations_.size());
  std::vector<int> state(declarations_.size(), 0);  // 0 new, 1 open, 2 done
  std::function<void(size_t)> visit = [&](size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) {
      issues.push_back({declarations_[i].first, "type hierarchy has a cycle"});
      return;
    }
    state[i] = 1;
    for (const std::string &s : declarations_[i].second) {
      size_t j = index_.find(s)->second;
      visit(j);
      ancestors_[i].insert(s);
      ancestors_[i].insert(ancestors_[j].begin(), ancestors_[j].end());
    }
    state[i] = 2;
  };
  for (size_t i = 0; i < declarations_.size(); ++i) {
    visit(i);
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }
}

bool TypeHierarchy::Declared(std::string_view type) const {
  return type == kTopType || index_.count(type) > 0;
}

bool TypeHierarchy::IsSubtype(std::string_view sub,
                              std::string_view super) const {
  if (super == kTopType || sub == super) return true;
  auto it = index_.find(sub);
  if (it == index_.end()) return false;
  return ancestors_[it->second].count(super) > 0;
}

std::vector<std::string> TypeHierarchy::MaximalCommonSubtypes(
    std::string_view a, std::string_view b) const {
  if (IsSubtype(a, b)) return {std::string(a)};
  if (IsSubtype(b, a)) return {std::string(b)};
  std::vector<std::string> common;
  for (const auto &[name, supers] : declarations_) {
    if (IsSubtype(name, a) && IsSubtype(name, b)) common.push_back(name);
  }
  std::vector<std::string> maximal;
  for (const std::string &t : common) {
    bool dominated = std::any_of(common.begin(), common.end(),
                                 [&](const std::string &u) {
                                   return u != t && IsSubtype(t, u);
                                 });
    if (!dominated) maximal.push_back(t);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

std::optional<std::string> TypeHierarchy::Glb(std::string_view a,
                                               std::string_view b) const {
  std::vector<std::string> bounds = MaximalCommonSubtypes(a, b);
  if (bounds.size() != 1) return std::nullopt;
  return bounds.front();
}

const std::vector<std::string> &TypeHierarchy::Supertypes(
    std::string_view type) const {
  auto it = index_.find(type);
  if (it == index_.end()) return kNoSupertypes;
  return declarations_[it->second].second;
}

std::vector<std::string> TypeHierarchy::Ancestors(std::string_view type) const {
  auto it = index_.find(type);
  if (it == index_.end()) return {};
  const auto &closure = ancestors_[it->second];
  // Kahn's algorithm restricted to the closure; ready nodes are taken in
  // declaration order.
  std::vector<std::string> order;
  std::set<std::string, std::less<>> placed;
  while (order.size() < closure.size()) {
    for (const auto &[name, supers] : declarations_) {
      if (!closure.count(name) || placed.count(name)) continue;
      bool ready = std::all_of(supers.begin(), supers.end(),
                               [&](const std::string &s) { return placed.count(s) > 0; });
      if (ready) {
        order.push_back(name);
        placed.insert(name);
        break;
      }
    }
  }
  return order;
}

}  // namespace dcxg
