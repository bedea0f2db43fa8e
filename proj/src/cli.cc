#include "dcxg/cli.h"

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dcxg/errors.h"
#include "dcxg/grammar.h"
#include "dcxg/processor.h"

namespace dcxg {

namespace {

std::vector<std::string> ReadLines(std::istream &in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

void PrintIssues(const ValidationError &e, std::ostream &err) {
  for (const auto &issue : e.issues()) {
    err << "  " << issue.object << ": " << issue.rule << "\n";
  }
}

}  // namespace

int Run(const RunConfig &config, std::istream &in, std::ostream &out, std::ostream &err) {
  Grammar grammar;
  VectorStore vectors;
  ActivationParams params;
  try {
    grammar = LoadGrammarFile(config.grammar_path);
  } catch (const ValidationError &e) {
    err << "error: " << config.grammar_path << ": invalid grammar\n";
    PrintIssues(e, err);
    return 1;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    vectors = VectorStore::LoadFile(config.vectors_path);
  } catch (const Error &e) {
    err << "error: " << config.vectors_path << ": " << e.what() << "\n";
    return 1;
  }
  try {
    ValidateVocabulary(grammar, vectors);
  } catch (const ValidationError &e) {
    err << "error: " << config.grammar_path << ": words missing from " << config.vectors_path << "\n";
    PrintIssues(e, err);
    return 1;
  }
  try {
    if (config.params_path) {
      std::ifstream pin(*config.params_path);
      if (!pin) throw Error("cannot open parameters file " + *config.params_path);
      Json j;
      try {
        j = Json::parse(pin);
      } catch (const Json::parse_error &e) {
        throw ParseError(*config.params_path + ": byte " + std::to_string(e.byte), e.what());
      }
      params = ActivationParams::FromJson(j);
    }
    if (config.threshold) params.recognition_threshold = *config.threshold;
    if (config.sim_threshold) params.sim_threshold = *config.sim_threshold;
    if (config.mas) params.mas = *config.mas;
    params.Validate();
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<std::string> sentences = config.sentences;
  if (sentences.empty()) {
    if (config.input_file) {
      std::ifstream fin(*config.input_file);
      if (!fin) {
        err << "error: cannot open input file " << *config.input_file << "\n";
        return 1;
      }
      sentences = ReadLines(fin);
    } else {
      sentences = ReadLines(in);
    }
  }

  Processor processor(grammar, vectors, params);
  std::vector<std::string> blocks(sentences.size());
  std::vector<Json> docs(sentences.size());
  auto work = [&](size_t i) {
    const std::string &s = sentences[i];
    try {
      Interpretation interp = processor.Interpret(s);
      if (config.mode == OutputMode::kStructured) {
        docs[i] = InterpretationToJson(interp, s);
        return;
      }
      std::ostringstream os;
      if (config.mode == OutputMode::kTrace) {
        for (const TraceRecord &r : interp.trace) os << r.ToLine() << "\n";
      }
      os << RenderSummary(interp, s);
      blocks[i] = os.str();
    } catch (const EmptyInput &) {
      Json j = Json::object();
      j["sentence"] = s;
      j["error"] = "empty input";
      docs[i] = j;
      blocks[i] = "sentence: " + s + "\nerror: empty input\n";
    }
  };
  int threads = std::max(1, config.threads);
  if (threads == 1 || sentences.size() < 2) {
    for (size_t i = 0; i < sentences.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < sentences.size(); i = next++) work(i);
      });
    }
    for (auto &th : pool) th.join();
  }

  if (config.mode == OutputMode::kStructured) {
    Json doc = Json::object();
    doc["params"] = params.ToJson();
    doc["sentences"] = docs;
    out << doc.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < blocks.size(); ++i) {
      if (i) out << "\n";
      out << blocks[i];
    }
  }
  return 0;
}

int Main(int argc, char **argv, std::istream &in, std::ostream &out, std::ostream &err) {
  CLI::App app{"Distributional construction grammar interpreter"};
  RunConfig config;
  bool trace = false;
  bool structured = false;
  app.add_option("--grammar", config.grammar_path, "Grammar file (JSON)")->required();
  app.add_option("--vectors", config.vectors_path, "Word vector file")->required();
  app.add_option("--params", config.params_path, "Activation parameters file (JSON)");
  app.add_option("--file", config.input_file, "Read sentences from a file, one per line");
  app.add_flag("--trace", trace, "Print the trace before each summary");
  app.add_flag("--structured", structured, "Print one JSON document");
  app.add_option("--threshold", config.threshold, "Recognition threshold");
  app.add_option("--sim-threshold", config.sim_threshold, "Similarity threshold for loose unification");
  app.add_option("--mas", config.mas, "Maximum associative strength");
  app.add_option("--seed", config.seed, "Reserved; processing is deterministic");
  app.add_option("--threads", config.threads, "Sentences processed in parallel")
      ->check(CLI::PositiveNumber);
  app.add_option("sentences", config.sentences, "Sentences to interpret");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (trace && structured) {
    err << "usage error: --trace and --structured are exclusive\n";
    return 2;
  }
  if (structured) config.mode = OutputMode::kStructured;
  if (trace) config.mode = OutputMode::kTrace;
  return Run(config, in, out, err);
}

}  // namespace dcxg
