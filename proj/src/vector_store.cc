#include "dcxg/vector_store.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "dcxg/errors.h"

namespace dcxg {

namespace {

// Splits on single spaces. A trailing space (common in word2vec output) is
// tolerated; empty interior fields are not.
bool SplitFields(std::string_view line, std::vector<std::string_view> *fields) {
  fields->clear();
  if (!line.empty() && line.back() == ' ') line.remove_suffix(1);
  size_t start = 0;
  while (start <= line.size()) {
    size_t end = line.find(' ', start);
    if (end == std::string_view::npos) end = line.size();
    if (end == start) return false;
    fields->push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return true;
}

bool ParseDouble(std::string_view text, double *out) {
  const char *first = text.data();
  const char *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last && std::isfinite(*out);
}

bool ParseCount(std::string_view text, size_t *out) {
  const char *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, *out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string FoldCase(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

VectorStore VectorStore::Load(std::istream &in) {
  VectorStore store;
  std::string line;
  std::vector<std::string_view> fields;
  if (!std::getline(in, line)) throw FormatError(1, "missing header");
  if (!SplitFields(line, &fields) || fields.size() != 2) {
    throw FormatError(1, "header must be '<count> <dim>'");
  }
  size_t count = 0;
  if (!ParseCount(fields[0], &count) || !ParseCount(fields[1], &store.dim_) ||
      store.dim_ == 0) {
    throw FormatError(1, "header must hold two positive integers");
  }

  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) throw FormatError(line_number, "empty line");
    if (!SplitFields(line, &fields)) {
      throw FormatError(line_number, "fields must be separated by one space");
    }
    if (fields.size() - 1 != store.dim_) {
      throw DimensionMismatch(line_number, store.dim_, fields.size() - 1);
    }
    Vector values(store.dim_);
    for (size_t i = 0; i < store.dim_; ++i) {
      if (!ParseDouble(fields[i + 1], &values[i])) {
        throw FormatError(line_number,
                          "bad number '" + std::string(fields[i + 1]) + "'");
      }
    }
    store.Add(line_number, std::string(fields[0]), std::move(values));
  }
  if (store.size() != count) {
    throw FormatError(line_number, "header declares " + std::to_string(count) +
                                       " rows, found " +
                                       std::to_string(store.size()));
  }
  return store;
}

VectorStore VectorStore::LoadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vector file " + path);
  return Load(in);
}

VectorStore VectorStore::FromRows(
    const std::vector<std::pair<std::string, Vector>> &rows) {
  VectorStore store;
  int line = 0;
  for (const auto &[word, values] : rows) {
    ++line;
    if (store.dim_ == 0) store.dim_ = values.size();
    if (values.size() != store.dim_ || values.empty()) {
      throw DimensionMismatch(line, store.dim_, values.size());
    }
    store.Add(line, word, values);
  }
  return store;
}

void VectorStore::Add(int line, std::string word, Vector values) {
  std::string key = FoldCase(word);
  if (vectors_.count(key)) throw FormatError(line, "duplicate word '" + word + "'");
  double norm = 0.0;
  for (double x : values) norm += x * x;
  if (norm == 0.0) throw FormatError(line, "all-zero vector for '" + word + "'");
  norm = std::sqrt(norm);
  for (double &x : values) x /= norm;
  words_.push_back(key);
  vectors_.emplace(std::move(key), std::move(values));
}

const Vector *VectorStore::Find(std::string_view word) const {
  auto it = vectors_.find(FoldCase(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

double Cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionMismatch(0, u.size(), v.size());
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector();
  // sqrt(uu) * sqrt(vv) is symmetric in u and v under IEEE multiplication.
  double score = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(score, -1.0, 1.0);
}

Vector Normalize(std::span<const double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) throw ZeroVector();
  norm = std::sqrt(norm);
  Vector out(v.begin(), v.end());
  for (double &x : out) x /= norm;
  return out;
}

Prototype BuildPrototype(std::span<const WeightedForm> fillers,
                         const VectorStore &store) {
  if (fillers.empty()) throw EmptyFillerList();
  Prototype proto;
  proto.vector.assign(store.dim(), 0.0);
  double total = 0.0;
  for (const WeightedForm &filler : fillers) {
    if (!(filler.weight > 0.0)) {
      throw DomainError("filler weight must be positive: " + filler.form);
    }
    const Vector *v = store.Find(filler.form);
    if (v == nullptr) throw OutOfVocabulary(filler.form);
    // Store vectors are already unit length.
    for (size_t i = 0; i < v->size(); ++i) proto.vector[i] += filler.weight * (*v)[i];
    total += filler.weight;
    proto.source_fillers.push_back(filler);
  }
  for (double &x : proto.vector) x /= total;
  return proto;
}

double ThematicFit(std::string_view word, const Prototype &proto,
                   const VectorStore &store) {
  const Vector *v = store.Find(word);
  if (v == nullptr) throw OutOfVocabulary(std::string(word));
  return Cosine(*v, proto.vector);
}

}  // namespace dcxg
