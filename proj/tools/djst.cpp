// Command-line front end: ingest -> train -> report -> eval, plus a
// synthetic-corpus generator for benchmarks. Logs go to stderr; data
// artifacts go to files under the configured output directory.

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "djst/config.hpp"
#include "djst/corpus.hpp"
#include "djst/dump.hpp"
#include "djst/errors.hpp"
#include "djst/lexicon.hpp"
#include "djst/model.hpp"
#include "djst/report.hpp"
#include "djst/snapshot.hpp"
#include "djst/synthetic.hpp"

namespace fs = std::filesystem;
using namespace djst;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

const std::vector<std::string> kConfigKeys = {
    "corpus_dir", "stopwords", "lexicon_positive", "lexicon_negative", "out_dir",
    "corpus_snapshot", "expert_labels", "chunk_tokens", "top_words", "chains",
    "synth_docs", "synth_doc_len", "synth_epochs", "synth_vocab", "sentiment_labels",
    "topics", "window", "gamma", "alpha", "nu", "beta_base", "kappa", "sweeps", "burn_in",
    "seed", "mu_scheme", "sample_alpha", "reapply_lambda", "estimator"};

struct CommandArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_common_options(CLI::App* sub, CommandArgs& args) {
  sub->add_option("--config", args.config_path, "run configuration file (key=value lines)");
  for (const std::string& key : kConfigKeys) {
    sub->add_option(
        "--" + key,
        [&args, key](const std::vector<std::string>& values) {
          args.overrides[key] = values.back();
          return true;
        },
        "override config key " + key);
  }
  sub->add_option(
      "--out",
      [&args](const std::vector<std::string>& values) {
        args.overrides["out_dir"] = values.back();
        return true;
      },
      "alias for --out_dir");
  sub->add_flag(
      "--quiet,-q",
      [&args](std::int64_t) { args.overrides["quiet"] = "1"; },
      "suppress progress notes");
}

RunConfig resolve_config(const CommandArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
  for (const auto& [key, value] : args.overrides) apply_config_value(cfg, key, value);
  cfg.validate();
  return cfg;
}

void note(const RunConfig& cfg, const std::string& msg) {
  if (!cfg.quiet) std::cerr << "djst: " << msg << "\n";
}

void warn(const std::string& msg) { std::cerr << "djst: warning: " << msg << "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

LambdaMatrix load_lambda_for(const RunConfig& cfg, const Vocabulary& vocab) {
  if (cfg.lexicon_positive.empty() && cfg.lexicon_negative.empty()) {
    warn("no lexicon configured; sentiment labels carry no word prior");
    return LambdaMatrix(cfg.hyper.sentiment_labels, vocab.size());
  }
  if (cfg.lexicon_positive.empty() || cfg.lexicon_negative.empty())
    throw ValidationError("both lexicon_positive and lexicon_negative must be set");
  LexiconLoad load = load_lexicon(cfg.lexicon_positive, cfg.lexicon_negative);
  for (const std::string& w : load.warnings) warn(w);
  return build_lambda(load.lexicon, vocab, cfg.hyper.sentiment_labels);
}

int cmd_ingest(const RunConfig& cfg) {
  if (cfg.corpus_dir.empty()) throw ValidationError("corpus_dir is required for ingest");
  if (cfg.stopwords.empty()) throw ValidationError("stopwords is required for ingest");
  const std::vector<SessionText> sessions = read_session_dir(cfg.corpus_dir);
  if (sessions.empty()) throw ValidationError("no session_<NN>.txt files in " + cfg.corpus_dir);
  const StopwordSet stopwords = load_stopwords(cfg.stopwords);
  IngestResult result = ingest(sessions, stopwords, cfg.chunk_tokens);
  for (const std::string& w : result.warnings) warn(w);
  fs::create_directories(cfg.out_dir);
  save_corpus_snapshot(cfg.corpus_snapshot_path(), result.vocab, result.stream);
  note(cfg, "ingested " + std::to_string(sessions.size()) + " sessions, vocabulary " +
                std::to_string(result.vocab.size()) + ", tokens " +
                std::to_string(result.stream.total_tokens()));
  note(cfg, "corpus snapshot: " + cfg.corpus_snapshot_path());
  return kExitOk;
}

// One full training pass; writes per-epoch snapshots, the posterior dump,
// and the manifest into dir. Returns the outcomes for summary use.
std::vector<EpochOutcome> run_chain(const RunConfig& cfg, const EpochStream& stream,
                                    const Vocabulary& vocab, const LambdaMatrix& lambda,
                                    const std::string& dir, std::uint64_t seed) {
  Hyperparams hp = cfg.hyper;
  hp.seed = seed;
  fs::create_directories(dir);
  Model model(&stream, vocab.size(), lambda, hp);
  std::vector<EpochOutcome> outcomes;
  std::vector<std::string> manifest;
  for (int t = 0; t < model.num_epochs(); ++t) {
    EpochOutcome out = model.train_epoch(t);
    SnapshotData snap;
    snap.epoch_index = t;
    snap.session_label = out.session_label;
    snap.hyper = hp;
    snap.priors = model.priors();
    if (const SamplerState* state = model.last_state()) {
      snap.lab = state->label_table();
      snap.top = state->topic_table();
    }
    snap.rng_state = model.rng_state();
    const std::string name = "model_" + std::to_string(t) + ".snap";
    save_model_snapshot(dir + "/" + name, snap);
    manifest.push_back(name);
    outcomes.push_back(std::move(out));
  }
  save_posterior_dump(dir + "/posterior.txt", outcomes);
  manifest.push_back("posterior.txt");
  std::string manifest_text;
  for (const std::string& line : manifest) manifest_text += line + "\n";
  write_text_file(dir + "/manifest.txt", manifest_text);
  return outcomes;
}

int cmd_train(const RunConfig& cfg) {
  auto [vocab, stream] = load_corpus_snapshot(cfg.corpus_snapshot_path());
  if (stream.epochs.empty()) throw ValidationError("corpus snapshot holds no epochs");
  const LambdaMatrix lambda = load_lambda_for(cfg, vocab);
  fs::create_directories(cfg.out_dir);
  // The effective config pins the resolved snapshot path so rerunning from it
  // reproduces this run.
  RunConfig effective = cfg;
  effective.corpus_snapshot = cfg.corpus_snapshot_path();
  write_text_file(cfg.out_dir + "/config.effective", dump_config(effective));

  if (cfg.chains == 1) {
    note(cfg, "training " + std::to_string(stream.epochs.size()) + " epochs (seed " +
                  std::to_string(cfg.hyper.seed) + ")");
    run_chain(cfg, stream, vocab, lambda, cfg.out_dir, cfg.hyper.seed);
    note(cfg, "posterior dump: " + cfg.out_dir + "/posterior.txt");
    return kExitOk;
  }

  // Independent chains share the immutable corpus and priors; each one owns
  // its sampler and output directory.
  note(cfg, "training " + std::to_string(cfg.chains) + " chains");
  std::vector<std::vector<EpochOutcome>> chain_outcomes(static_cast<std::size_t>(cfg.chains));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(cfg.chains));
  std::vector<std::thread> workers;
  for (int c = 0; c < cfg.chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        const std::string dir = cfg.out_dir + "/chain_" + std::to_string(c);
        chain_outcomes[static_cast<std::size_t>(c)] =
            run_chain(cfg, stream, vocab, lambda, dir, cfg.hyper.seed + static_cast<std::uint64_t>(c));
      } catch (...) {
        failures[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (std::thread& w : workers) w.join();
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // Across-chain spread of the per-session negative-sentiment probability.
  std::ofstream summary(cfg.out_dir + "/chains_summary.csv");
  if (!summary) throw IoError("cannot write chains summary");
  summary << "session";
  for (int c = 0; c < cfg.chains; ++c) summary << ",chain" << c << "_p_negative";
  summary << ",mean_p_negative,sd_p_negative\n";
  std::vector<std::vector<TrendPoint>> trends;
  for (const auto& outcomes : chain_outcomes) trends.push_back(build_trend(outcomes, stream));
  char buf[32];
  for (std::size_t t = 0; t < stream.epochs.size(); ++t) {
    summary << stream.epochs[t].session_label;
    double sum = 0.0, sq = 0.0;
    int have = 0;
    for (const auto& trend : trends) {
      if (trend[t].dominant == kNoData) {
        summary << ",";
      } else {
        const double p = trend[t].p_by_label[kNegative];
        std::snprintf(buf, sizeof buf, ",%.6f", p);
        summary << buf;
        sum += p;
        sq += p * p;
        ++have;
      }
    }
    if (have > 0) {
      const double mean = sum / have;
      const double var = std::max(0.0, sq / have - mean * mean);
      std::snprintf(buf, sizeof buf, ",%.6f,%.6f", mean, std::sqrt(var));
      summary << buf << "\n";
    } else {
      summary << ",,\n";
    }
  }
  note(cfg, "chain summary: " + cfg.out_dir + "/chains_summary.csv");
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  auto [vocab, stream] = load_corpus_snapshot(cfg.corpus_snapshot_path());
  const std::vector<EpochOutcome> outcomes = load_posterior_dump(cfg.out_dir + "/posterior.txt");
  if (outcomes.size() != stream.epochs.size())
    throw ValidationError("posterior dump and corpus snapshot disagree on epoch count");
  fs::create_directories(cfg.out_dir);

  const std::vector<TrendPoint> trend = build_trend(outcomes, stream);
  emit_trend_csv(trend, cfg.out_dir + "/trend.csv");

  // Topic tables come from the most recent epoch that carried data.
  const EpochOutcome* last_with_data = nullptr;
  for (const EpochOutcome& eo : outcomes) {
    if (eo.has_data) last_with_data = &eo;
  }
  std::vector<TopicSummary> summaries;
  if (last_with_data != nullptr) {
    for (int l = 0; l < last_with_data->posterior.labels; ++l) {
      for (int z = 0; z < last_with_data->posterior.topics; ++z) {
        summaries.push_back(top_words(last_with_data->posterior, l, z, vocab, cfg.top_words));
      }
    }
  }
  write_text_file(cfg.out_dir + "/topics.json", topics_to_json(summaries).dump(2) + "\n");
  note(cfg, "trend: " + cfg.out_dir + "/trend.csv");
  note(cfg, "topics: " + cfg.out_dir + "/topics.json");
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::string trend_path, std::string expert_path) {
  if (trend_path.empty()) trend_path = cfg.out_dir + "/trend.csv";
  if (expert_path.empty()) expert_path = cfg.expert_labels;
  if (expert_path.empty()) throw ValidationError("expert labels csv required (positional or expert_labels key)");
  const std::vector<TrendPoint> trend = load_trend_csv(trend_path);
  const auto expert = load_expert_csv(expert_path);
  const ExpertComparison cmp = compare_to_expert(trend_label_sequence(trend), expert);

  std::ostringstream report;
  report << "session model expert match\n";
  for (const SessionMatch& m : cmp.per_session) {
    report << m.session_label << " " << m.model_label << " " << m.expert_label << " "
           << (m.model_label != "-" && m.expert_label != "-" ? (m.match ? "yes" : "NO") : "-")
           << "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "accuracy %.6f (%d/%d)", cmp.accuracy, cmp.matches, cmp.compared);
  report << buf << "\n";
  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/eval.txt", report.str());
  std::cout << buf << "\n";
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg) {
  const Hyperparams& hp = cfg.hyper;
  const std::vector<double> phi = make_block_phi(hp.sentiment_labels, hp.topics, cfg.synth_vocab);
  EpochStream stream;
  Vocabulary vocab;
  std::vector<SyntheticTruth> truths;
  for (int e = 0; e < cfg.synth_epochs; ++e) {
    SyntheticResult part = generate_synthetic(phi, hp, cfg.synth_docs, cfg.synth_doc_len,
                                              hp.seed + static_cast<std::uint64_t>(e));
    if (e == 0) vocab = std::move(part.vocab);
    Epoch& epoch = part.stream.epochs.front();
    epoch.session_label = std::to_string(e + 1);
    for (Document& doc : epoch.docs) {
      doc.epoch = e;
      doc.doc_id = "e" + std::to_string(e + 1) + "_" + doc.doc_id;
    }
    stream.epochs.push_back(std::move(epoch));
    truths.push_back(std::move(part.truth));
  }
  fs::create_directories(cfg.out_dir);
  save_corpus_snapshot(cfg.corpus_snapshot_path(), vocab, stream);

  // Ground truth: planted word distributions plus per-document draws.
  std::ofstream truth(cfg.out_dir + "/truth.txt");
  if (!truth) throw IoError("cannot write truth file");
  truth << "djst-truth 1\n";
  truth << "dims " << hp.sentiment_labels << " " << hp.topics << " " << cfg.synth_vocab << " "
        << cfg.synth_epochs << "\n";
  for (int c = 0; c < hp.clusters(); ++c) {
    truth << "phi " << c;
    for (int w = 0; w < cfg.synth_vocab; ++w)
      truth << ' ' << detail::fmt_double(phi[static_cast<std::size_t>(c) * cfg.synth_vocab + w]);
    truth << "\n";
  }
  for (int e = 0; e < cfg.synth_epochs; ++e) {
    const SyntheticTruth& t = truths[static_cast<std::size_t>(e)];
    for (std::size_t d = 0; d < t.pi.size(); ++d) {
      truth << "doc " << e << " " << d << " pi";
      for (double p : t.pi[d]) truth << ' ' << detail::fmt_double(p);
      truth << "\nassign";
      for (std::size_t n = 0; n < t.lab[d].size(); ++n)
        truth << ' ' << t.lab[d][n] << ':' << t.top[d][n];
      truth << "\n";
    }
  }
  truth << "end\n";
  if (!truth) throw IoError("write failed: truth file");

  // A lexicon consistent with the planted stripes, for end-to-end runs. Only
  // words inside a cluster's own stripe qualify, so the polarity files never
  // overlap.
  const int stripe = cfg.synth_vocab / hp.clusters();
  for (int l = 0; l < 2; ++l) {
    std::ostringstream words;
    words << "; generated from planted word distributions\n";
    for (int z = 0; z < hp.topics; ++z) {
      const int c = l * hp.topics + z;
      std::vector<int> order(static_cast<std::size_t>(cfg.synth_vocab));
      for (int w = 0; w < cfg.synth_vocab; ++w) order[static_cast<std::size_t>(w)] = w;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return phi[static_cast<std::size_t>(c) * cfg.synth_vocab + a] >
               phi[static_cast<std::size_t>(c) * cfg.synth_vocab + b];
      });
      for (int i = 0; i < std::min(5, stripe); ++i)
        words << vocab.term(order[static_cast<std::size_t>(i)]) << "\n";
    }
    write_text_file(cfg.out_dir + (l == kPositive ? "/lexicon_positive.txt" : "/lexicon_negative.txt"),
                    words.str());
  }
  note(cfg, "synthetic corpus: " + cfg.corpus_snapshot_path());
  note(cfg, "ground truth: " + cfg.out_dir + "/truth.txt");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic joint sentiment-topic tracking over ordered session transcripts"};
  app.require_subcommand(1);

  CommandArgs ingest_args, train_args, report_args, eval_args, synth_args;
  std::string eval_trend, eval_expert;

  CLI::App* ingest_cmd = app.add_subcommand("ingest", "preprocess a client directory into a corpus snapshot");
  add_common_options(ingest_cmd, ingest_args);
  CLI::App* train_cmd = app.add_subcommand("train", "run the sampler over every epoch of a corpus snapshot");
  add_common_options(train_cmd, train_args);
  CLI::App* report_cmd = app.add_subcommand("report", "emit the sentiment trend CSV and topic JSON");
  add_common_options(report_cmd, report_args);
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a trend CSV against expert session labels");
  add_common_options(eval_cmd, eval_args);
  eval_cmd->add_option("trend", eval_trend, "trend CSV (default <out_dir>/trend.csv)");
  eval_cmd->add_option("expert", eval_expert, "expert labels CSV (default expert_labels key)");
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a planted synthetic corpus with ground truth");
  add_common_options(synth_cmd, synth_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(resolve_config(ingest_args));
    if (train_cmd->parsed()) return cmd_train(resolve_config(train_args));
    if (report_cmd->parsed()) return cmd_report(resolve_config(report_args));
    if (eval_cmd->parsed()) return cmd_eval(resolve_config(eval_args), eval_trend, eval_expert);
    if (synth_cmd->parsed()) return cmd_synth(resolve_config(synth_args));
  } catch (const IoError& e) {
    std::cerr << "djst: io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "djst: error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "djst: unexpected error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
