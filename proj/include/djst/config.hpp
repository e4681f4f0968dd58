#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "djst/errors.hpp"
#include "djst/hyper.hpp"

namespace djst {

// Flat key=value run configuration. Every key can be overridden by a
// same-named command-line flag; flags win.
struct RunConfig {
  std::string corpus_dir;
  std::string stopwords;
  std::string lexicon_positive;
  std::string lexicon_negative;
  std::string out_dir = "out";
  std::string corpus_snapshot;  // defaults to <out_dir>/corpus.snap
  std::string expert_labels;
  int chunk_tokens = 1000;
  int top_words = 20;
  int chains = 1;
  bool quiet = false;
  // synthetic-corpus generation
  int synth_docs = 100;
  int synth_doc_len = 200;
  int synth_epochs = 1;
  int synth_vocab = 200;
  Hyperparams hyper;

  std::string corpus_snapshot_path() const {
    return corpus_snapshot.empty() ? out_dir + "/corpus.snap" : corpus_snapshot;
  }

  void validate() const {
    hyper.validate();
    if (chunk_tokens < 0) throw ValidationError("chunk_tokens must be >= 0");
    if (top_words < 0) throw ValidationError("top_words must be >= 0");
    if (chains < 1) throw ValidationError("chains must be >= 1");
    if (synth_docs < 0 || synth_doc_len < 0 || synth_epochs < 1 || synth_vocab < 1)
      throw ValidationError("synthetic corpus sizes must be non-negative (epochs/vocab >= 1)");
  }
};

namespace detail {

inline bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ValidationError("boolean expected for " + key + ", got: " + value);
}

}  // namespace detail

inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "corpus_dir") cfg.corpus_dir = value;
    else if (key == "stopwords") cfg.stopwords = value;
    else if (key == "lexicon_positive") cfg.lexicon_positive = value;
    else if (key == "lexicon_negative") cfg.lexicon_negative = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "corpus_snapshot") cfg.corpus_snapshot = value;
    else if (key == "expert_labels") cfg.expert_labels = value;
    else if (key == "chunk_tokens") cfg.chunk_tokens = std::stoi(value);
    else if (key == "top_words") cfg.top_words = std::stoi(value);
    else if (key == "chains") cfg.chains = std::stoi(value);
    else if (key == "quiet") cfg.quiet = detail::parse_bool(value, key);
    else if (key == "synth_docs") cfg.synth_docs = std::stoi(value);
    else if (key == "synth_doc_len") cfg.synth_doc_len = std::stoi(value);
    else if (key == "synth_epochs") cfg.synth_epochs = std::stoi(value);
    else if (key == "synth_vocab") cfg.synth_vocab = std::stoi(value);
    else if (key == "sentiment_labels") cfg.hyper.sentiment_labels = std::stoi(value);
    else if (key == "topics") cfg.hyper.topics = std::stoi(value);
    else if (key == "window") cfg.hyper.window = std::stoi(value);
    else if (key == "gamma") cfg.hyper.gamma = std::stod(value);
    else if (key == "alpha") cfg.hyper.alpha_init = std::stod(value);
    else if (key == "nu") cfg.hyper.nu = std::stod(value);
    else if (key == "beta_base") cfg.hyper.beta_base = std::stod(value);
    else if (key == "kappa") cfg.hyper.kappa = std::stod(value);
    else if (key == "sweeps") cfg.hyper.sweeps = std::stoi(value);
    else if (key == "burn_in") cfg.hyper.burn_in = std::stoi(value);
    else if (key == "seed") cfg.hyper.seed = std::stoull(value);
    else if (key == "mu_scheme") cfg.hyper.mu_scheme = mu_scheme_from_string(value);
    else if (key == "sample_alpha") cfg.hyper.sample_alpha = detail::parse_bool(value, key);
    else if (key == "reapply_lambda") cfg.hyper.reapply_lambda = detail::parse_bool(value, key);
    else if (key == "estimator") cfg.hyper.estimator = estimator_from_string(value);
    else throw ValidationError("unknown configuration key: " + key);
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad value for " + key + ": " + value);
  } catch (const std::out_of_range&) {
    throw ValidationError("value out of range for " + key + ": " + value);
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    const std::size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw ValidationError("expected key=value at " + path + ":" + std::to_string(lineno));
    std::string key = line.substr(start, eq - start);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
      std::size_t b = s.find_first_not_of(" \t");
      if (b == std::string::npos) s.clear();
      else s.erase(0, b);
    };
    trim(key);
    trim(value);
    apply_config_value(cfg, key, value);
  }
  return cfg;
}

// Serializes the effective configuration; re-running from this text
// reproduces the run.
inline std::string dump_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "corpus_dir=" << cfg.corpus_dir << "\n";
  out << "stopwords=" << cfg.stopwords << "\n";
  out << "lexicon_positive=" << cfg.lexicon_positive << "\n";
  out << "lexicon_negative=" << cfg.lexicon_negative << "\n";
  out << "out_dir=" << cfg.out_dir << "\n";
  out << "corpus_snapshot=" << cfg.corpus_snapshot << "\n";
  out << "expert_labels=" << cfg.expert_labels << "\n";
  out << "chunk_tokens=" << cfg.chunk_tokens << "\n";
  out << "top_words=" << cfg.top_words << "\n";
  out << "chains=" << cfg.chains << "\n";
  out << "quiet=" << (cfg.quiet ? 1 : 0) << "\n";
  out << "synth_docs=" << cfg.synth_docs << "\n";
  out << "synth_doc_len=" << cfg.synth_doc_len << "\n";
  out << "synth_epochs=" << cfg.synth_epochs << "\n";
  out << "synth_vocab=" << cfg.synth_vocab << "\n";
  out << "sentiment_labels=" << cfg.hyper.sentiment_labels << "\n";
  out << "topics=" << cfg.hyper.topics << "\n";
  out << "window=" << cfg.hyper.window << "\n";
  out << "gamma=" << cfg.hyper.gamma << "\n";
  out << "alpha=" << cfg.hyper.alpha_init << "\n";
  out << "nu=" << cfg.hyper.nu << "\n";
  out << "beta_base=" << cfg.hyper.beta_base << "\n";
  out << "kappa=" << cfg.hyper.kappa << "\n";
  out << "sweeps=" << cfg.hyper.sweeps << "\n";
  out << "burn_in=" << cfg.hyper.burn_in << "\n";
  out << "seed=" << cfg.hyper.seed << "\n";
  out << "mu_scheme=" << to_string(cfg.hyper.mu_scheme) << "\n";
  out << "sample_alpha=" << (cfg.hyper.sample_alpha ? 1 : 0) << "\n";
  out << "reapply_lambda=" << (cfg.hyper.reapply_lambda ? 1 : 0) << "\n";
  out << "estimator=" << to_string(cfg.hyper.estimator) << "\n";
  return out.str();
}

}  // namespace djst
