#ifndef DCXG_VECTOR_STORE_H_
#define DCXG_VECTOR_STORE_H_

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dcxg {

using Vector = std::vector<double>;

// Lowercases ASCII letters; lookup keys are folded with this.
std::string FoldCase(std::string_view text);

// A lexical form with a salience weight, used to build prototypes.
struct WeightedForm {
  std::string form;
  double weight = 1.0;

  bool operator==(const WeightedForm &other) const = default;
};

// Distributional vectors keyed by case-folded lexical form. Vectors are
// L2-normalized at load time. Immutable once loaded.
class VectorStore {
 public:
  VectorStore() = default;

  // Parses the plain-text embedding format:
  //   <count> <dim>\n
  //   <word> <f1> ... <f_dim>\n
  // Throws FormatError or DimensionMismatch with the offending line.
  static VectorStore Load(std::istream &in);
  static VectorStore LoadFile(const std::string &path);

  // Builds a store from in-memory rows (normalized on insert). Same
  // validation as Load; line numbers count rows from 1.
  static VectorStore FromRows(
      const std::vector<std::pair<std::string, Vector>> &rows);

  size_t dim() const { return dim_; }
  size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }

  // Normalized vector for a word, or nullptr when out of vocabulary.
  const Vector *Find(std::string_view word) const;
  bool Contains(std::string_view word) const { return Find(word) != nullptr; }

 private:
  void Add(int line, std::string word, Vector values);

  size_t dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, Vector> vectors_;
};

// Cosine similarity clamped to [-1, 1]. Throws DimensionMismatch or
// ZeroVector.
double Cosine(std::span<const double> u, std::span<const double> v);

// Returns v / |v|. Throws ZeroVector.
Vector Normalize(std::span<const double> v);

// Weighted centroid of the fillers' normalized vectors.
struct Prototype {
  Vector vector;
  std::vector<WeightedForm> source_fillers;
};

// Throws EmptyFillerList, OutOfVocabulary, or DomainError on a nonpositive
// weight.
Prototype BuildPrototype(std::span<const WeightedForm> fillers,
                         const VectorStore &store);

// Cosine between a word's vector and the prototype. Throws OutOfVocabulary.
double ThematicFit(std::string_view word, const Prototype &proto,
                   const VectorStore &store);

}  // namespace dcxg

#endif  // DCXG_VECTOR_STORE_H_
