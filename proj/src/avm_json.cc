#include "dcxg/avm_json.h"

#include <charconv>
#include <functional>

#include "dcxg/errors.h"

namespace dcxg {

using internal::Graph;
using internal::Node;

std::optional<int> ParseTagRef(std::string_view text) {
  if (text.size() < 2 || text[0] != '#') return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    return std::nullopt;
  }
  return value;
}

namespace {

std::string Escape(const std::string &key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

class AvmReader {
 public:
  int Read(const Json &json, const std::string &loc) {
    if (json.is_null()) return Add(Node{});
    if (json.is_boolean()) return AddAtom(json.get<bool>() ? "+" : "-");
    if (json.is_number()) {
      Node n;
      n.kind = Node::Kind::kNumber;
      n.label.clear();
      n.number = json.get<double>();
      return Add(std::move(n));
    }
    if (json.is_string()) {
      const std::string &s = json.get_ref<const std::string &>();
      if (auto tag = ParseTagRef(s)) return Reference(*tag);
      if (s.empty() || s == "..." || s[0] == '#') {
        throw ParseError(loc, "invalid atom '" + s + "'");
      }
      return AddAtom(s);
    }
    if (json.is_array()) return ReadList(json, loc);
    return ReadObject(json, loc);
  }

  Graph &graph() { return graph_; }
  const std::map<int, int> &tags() const { return tags_; }

 private:
  int Add(Node node) {
    graph_.push_back(std::move(node));
    return static_cast<int>(graph_.size() - 1);
  }

  int AddAtom(const std::string &type) {
    Node n;
    n.label = type;
    return Add(std::move(n));
  }

  int Reference(int tag) {
    auto it = tags_.find(tag);
    if (it != tags_.end()) return it->second;
    int node = Add(Node{});
    tags_.emplace(tag, node);
    return node;
  }

  int ReadList(const Json &json, const std::string &loc) {
    Node list;
    list.kind = Node::Kind::kList;
    list.label.clear();
    std::vector<int> items;
    for (size_t i = 0; i < json.size(); ++i) {
      const Json &item = json[i];
      if (item.is_string() && item.get_ref<const std::string &>() == "...") {
        if (i + 1 != json.size()) {
          throw ParseError(loc + "/" + std::to_string(i), "'...' must end the list");
        }
        list.open_tail = true;
        continue;
      }
      items.push_back(Read(item, loc + "/" + std::to_string(i)));
    }
    list.items = std::move(items);
    return Add(std::move(list));
  }

  int ReadObject(const Json &json, const std::string &loc) {
    if (json.size() == 1) {
      const std::string &key = json.begin().key();
      if (auto tag = ParseTagRef(key)) return Bind(*tag, json.begin().value(), loc + "/" + Escape(key));
    }
    if (json.contains("@text")) {
      if (json.size() != 1 || !json["@text"].is_string()) {
        throw ParseError(loc, "@text takes a single string");
      }
      Node n;
      n.kind = Node::Kind::kText;
      n.label = json["@text"].get<std::string>();
      return Add(std::move(n));
    }
    if (json.contains("vec")) return ReadVector(json, loc);

    Node n;
    std::vector<std::pair<std::string, int>> features;
    for (auto it = json.begin(); it != json.end(); ++it) {
      const std::string &key = it.key();
      std::string here = loc + "/" + Escape(key);
      if (key == "@type") {
        if (!it.value().is_string() || it.value().get<std::string>().empty()) {
          throw ParseError(here, "@type must be a non-empty string");
        }
        n.label = it.value().get<std::string>();
        continue;
      }
      if (key.empty() || key[0] == '#' || key[0] == '@') {
        throw ParseError(here, "invalid feature name '" + key + "'");
      }
      features.emplace_back(key, Read(it.value(), here));
    }
    std::sort(features.begin(), features.end());
    n.features = std::move(features);
    return Add(std::move(n));
  }

  int ReadVector(const Json &json, const std::string &loc) {
    Node n;
    n.kind = Node::Kind::kVector;
    n.label.clear();
    for (auto it = json.begin(); it != json.end(); ++it) {
      std::string here = loc + "/" + Escape(it.key());
      if (it.key() == "vec") {
        if (!it.value().is_string() || it.value().get<std::string>().empty()) {
          throw ParseError(here, "vec must name a word");
        }
        n.vector.key = it.value().get<std::string>();
      } else if (it.key() == "fillers") {
        if (!it.value().is_array() || it.value().empty()) {
          throw ParseError(here, "fillers must be a non-empty array");
        }
        for (size_t i = 0; i < it.value().size(); ++i) {
          const Json &f = it.value()[i];
          WeightedForm form;
          if (f.is_string()) {
            form.form = f.get<std::string>();
          } else if (f.is_array() && f.size() == 2 && f[0].is_string() && f[1].is_number()) {
            form.form = f[0].get<std::string>();
            form.weight = f[1].get<double>();
          } else {
            throw ParseError(here + "/" + std::to_string(i),
                             "filler must be a word or [word, weight]");
          }
          if (!(form.weight > 0.0)) {
            throw ParseError(here + "/" + std::to_string(i), "filler weight must be positive");
          }
          n.vector.fillers.push_back(std::move(form));
        }
      } else {
        throw ParseError(here, "unexpected key in vector-ref");
      }
    }
    return Add(std::move(n));
  }

  int Bind(int tag, const Json &value, const std::string &loc) {
    if (bound_.count(tag)) throw ParseError(loc, "tag #" + std::to_string(tag) + " bound twice");
    bound_.insert(tag);
    int content = Read(value, loc);
    auto it = tags_.find(tag);
    if (it == tags_.end()) {
      tags_.emplace(tag, content);
      return content;
    }
    // Earlier references created a placeholder; give it the bound content.
    graph_[it->second] = graph_[content];
    return it->second;
  }

  Graph graph_;
  std::map<int, int> tags_;
  std::set<int> bound_;
};

}  // namespace

std::vector<std::optional<Path>> FirstPaths(const FeatureStructure &fs) {
  const Graph &graph = fs.graph();
  std::vector<std::optional<Path>> paths(graph.size());
  Path current;
  std::function<void(int)> visit = [&](int node) {
    if (paths[node]) return;
    paths[node] = current;
    for (const auto &[name, child] : graph[node].features) {
      current.emplace_back(name);
      visit(child);
      current.pop_back();
    }
    for (size_t i = 0; i < graph[node].items.size(); ++i) {
      current.emplace_back(static_cast<int>(i));
      visit(graph[node].items[i]);
      current.pop_back();
    }
  };
  visit(fs.root());
  return paths;
}

ParsedAvm ParseAvm(const Json &json, const std::string &location) {
  AvmReader reader;
  int root = reader.Read(json, location);
  std::vector<int> roots{root};
  std::vector<int> tag_numbers;
  for (const auto &[tag, node] : reader.tags()) {
    roots.push_back(node);
    tag_numbers.push_back(tag);
  }
  std::vector<int> new_roots;
  std::shared_ptr<const Graph> graph;
  try {
    graph = CompactGraph(reader.graph(), roots, &new_roots);
  } catch (const StructureError &) {
    throw ParseError(location, "tag bindings form a cycle");
  }
  ParsedAvm parsed;
  parsed.fs = FeatureStructure(graph, new_roots[0]);
  auto paths = FirstPaths(parsed.fs);
  for (size_t i = 0; i < tag_numbers.size(); ++i) {
    const auto &path = paths[new_roots[i + 1]];
    if (!path) {
      throw ParseError(location, "tag #" + std::to_string(tag_numbers[i]) + " is unreachable");
    }
    parsed.tags.emplace(tag_numbers[i], *path);
  }
  return parsed;
}

Json AvmToJson(const FeatureStructure &fs, const std::map<int, Path> &tags) {
  const Graph &graph = fs.graph();
  std::vector<int> indegree(graph.size(), 0);
  std::vector<char> seen(graph.size(), 0);
  std::function<void(int)> count = [&](int node) {
    if (seen[node]++) return;
    for (const auto &f : graph[node].features) {
      ++indegree[f.second];
      count(f.second);
    }
    for (int item : graph[node].items) {
      ++indegree[item];
      count(item);
    }
  };
  count(fs.root());

  std::vector<int> number(graph.size(), -1);
  int next = 1;
  for (const auto &[tag, path] : tags) {
    auto node = ResolvePath(fs, path);
    if (node) number[node->root()] = tag;
    next = std::max(next, tag + 1);
  }
  std::vector<char> emitted(graph.size(), 0);

  std::function<Json(int)> write = [&](int index) -> Json {
    const Node &n = graph[index];
    if (indegree[index] > 1 && number[index] < 0) number[index] = next++;
    if (number[index] >= 0) {
      std::string ref = "#" + std::to_string(number[index]);
      if (emitted[index]) return ref;
      emitted[index] = 1;
      bool bare = n.kind == Node::Kind::kTyped && n.features.empty() && n.label == kTopType;
      if (bare) return ref;
    }
    Json out;
    switch (n.kind) {
      case Node::Kind::kTyped:
        if (n.features.empty()) {
          out = n.label == kTopType ? Json(nullptr) : Json(n.label);
        } else {
          out = Json::object();
          if (n.label != kTopType) out["@type"] = n.label;
          for (const auto &[name, child] : n.features) out[name] = write(child);
        }
        break;
      case Node::Kind::kText:
        out = Json::object({{"@text", n.label}});
        break;
      case Node::Kind::kNumber:
        out = n.number;
        break;
      case Node::Kind::kList:
        out = Json::array();
        for (int item : n.items) out.push_back(write(item));
        if (n.open_tail) out.push_back("...");
        break;
      case Node::Kind::kVector:
        out = Json::object({{"vec", n.vector.key}});
        if (n.vector.is_prototype()) {
          Json fillers = Json::array();
          for (const auto &f : n.vector.fillers) fillers.push_back(Json::array({f.form, f.weight}));
          out["fillers"] = fillers;
        }
        break;
    }
    if (number[index] >= 0) {
      Json binding = Json::object();
      binding["#" + std::to_string(number[index])] = std::move(out);
      return binding;
    }
    return out;
  };
  return write(fs.root());
}

}  // namespace dcxg
