#ifndef DCXG_AVM_JSON_H_
#define DCXG_AVM_JSON_H_

#include <map>
#include <set>
#include <string>

#include "dcxg/feature_structure.h"
#include "json.hpp"

namespace dcxg {

using Json = nlohmann::ordered_json;

// Feature structure read from the grammar file's JSON notation:
//
//   "NP"                 atom (type tag without features)
//   null                 unspecified
//   "#3"                 reference to tag 3
//   {"#3": value}        binds tag 3 to value
//   {"@type": "np", ...} typed structure; other keys are features
//   [a, b, "..."]        list; a trailing "..." leaves the tail open
//   {"vec": "book"}      vector-ref; "fillers": [["student", 1.0], ...]
//                        turns it into a prototype
//   {"@text": "..."}     string value
//   numbers, true/false  number, atoms "+" / "-"
//
// `tags` maps each tag number to the first path (features in name order)
// that reaches its node.
struct ParsedAvm {
  FeatureStructure fs;
  std::map<int, Path> tags;
};

// Throws ParseError with `location` (a JSON pointer prefix) on bad syntax,
// a tag bound twice, or a cyclic tag binding.
ParsedAvm ParseAvm(const Json &json, const std::string &location);

// Inverse of ParseAvm. Declared tags keep their numbers; other shared
// nodes get fresh numbers above the largest declared one. Tags whose node
// is reached once are still emitted as bindings so references from
// outside the structure survive a round trip.
Json AvmToJson(const FeatureStructure &fs, const std::map<int, Path> &tags);

// First path (features in name order, then list items) reaching each node
// reachable from the root; indexed by node.
std::vector<std::optional<Path>> FirstPaths(const FeatureStructure &fs);

// Parses "#12" into 12; nullopt for anything else.
std::optional<int> ParseTagRef(std::string_view text);

}  // namespace dcxg

#endif  // DCXG_AVM_JSON_H_
