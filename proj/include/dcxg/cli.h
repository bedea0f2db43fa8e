#ifndef DCXG_CLI_H_
#define DCXG_CLI_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dcxg {

enum class OutputMode { kSummary, kTrace, kStructured };

struct RunConfig {
  std::string grammar_path;
  std::string vectors_path;
  std::optional<std::string> params_path;
  // Inline sentences; when empty, sentences come from `input_file` or,
  // failing that, the input stream. One sentence per line.
  std::vector<std::string> sentences;
  std::optional<std::string> input_file;
  OutputMode mode = OutputMode::kSummary;
  std::optional<double> threshold;
  std::optional<double> sim_threshold;
  std::optional<double> mas;
  unsigned seed = 0;  // reserved; processing is deterministic
  int threads = 1;
};

// Exit status: 0 on success, 1 on a load or validation error.
int Run(const RunConfig &config, std::istream &in, std::ostream &out, std::ostream &err);

// Parses the command line and runs. Exit status 2 on a usage error.
int Main(int argc, char **argv, std::istream &in, std::ostream &out, std::ostream &err);

}  // namespace dcxg

#endif  // DCXG_CLI_H_
