#ifndef DCXG_TYPE_HIERARCHY_H_
#define DCXG_TYPE_HIERARCHY_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dcxg {

// The unique most general sort.
inline constexpr std::string_view kTopType = "*top*";

// Partial order over type tags with multiple inheritance. Types that were
// never declared behave as leaves directly below the top sort, so two
// distinct undeclared atoms are incompatible.
class TypeHierarchy {
 public:
  // A hierarchy containing only the top sort.
  TypeHierarchy();

  // Each entry maps a type to its immediate supertypes. An empty supertype
  // list means "directly below top". Throws ValidationError when a
  // supertype is undeclared or the declarations form a cycle.
  explicit TypeHierarchy(
      const std::vector<std::pair<std::string, std::vector<std::string>>>
          &declarations);

  bool Declared(std::string_view type) const;

  // Reflexive: IsSubtype(t, t) holds, and every type is below top.
  bool IsSubtype(std::string_view sub, std::string_view super) const;

  // Maximal types below both a and b. Empty when incompatible.
  std::vector<std::string> MaximalCommonSubtypes(std::string_view a,
                                                 std::string_view b) const;

  // The unique greatest lower bound, or nullopt when a and b are
  // incompatible or their lower bound is not unique.
  std::optional<std::string> Glb(std::string_view a, std::string_view b) const;

  const std::vector<std::string> &Supertypes(std::string_view type) const;

  // All proper ancestors (excluding top), most generic first. Ties are
  // broken by declaration order.
  std::vector<std::string> Ancestors(std::string_view type) const;

  // Declarations in their original order (top excluded).
  const std::vector<std::pair<std::string, std::vector<std::string>>>
      &declarations() const {
    return declarations_;
  }

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> declarations_;
  std::map<std::string, size_t, std::less<>> index_;
  // Transitive proper supertypes of each declared type.
  std::vector<std::set<std::string, std::less<>>> ancestors_;
};

}  // namespace dcxg

#endif  // DCXG_TYPE_HIERARCHY_H_
