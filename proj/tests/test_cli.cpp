#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <json.hpp>

#include "djst/corpus.hpp"
#include "djst/dump.hpp"
#include "support/harness.hpp"

using namespace djst;
using testsupport::CliResult;
using testsupport::TempDir;
using testsupport::read_file;
using testsupport::run_cli;
using testsupport::write_file;

namespace {

const std::string kFixtures = DJST_FIXTURE_DIR;
const std::string kData = DJST_DATA_DIR;

void write_client_dir(const TempDir& dir, int sessions) {
  for (int s = 1; s <= sessions; ++s) {
    const std::string name = dir.file("session_0" + std::to_string(s) + ".txt");
    std::string text = "C: I felt pain and worry in week " + std::to_string(s) + "\n";
    text += "T: and how did that feel\n";
    text += "it was hard but some hope too, session " + std::to_string(s) + "\n";
    write_file(name, text);
  }
}

std::string train_flags(const std::string& out) {
  return " --out_dir " + out + " --lexicon_positive " + kData + "/lexicon_positive.txt" +
         " --lexicon_negative " + kData + "/lexicon_negative.txt" +
         " --topics 2 --sweeps 40 --burn_in 10";
}

}  // namespace

TEST_CASE("ingest writes a snapshot with one epoch per session", "[cli]") {
  TempDir dir("cli_ingest");
  write_client_dir(dir, 5);
  const std::string out = dir.file("out");
  const CliResult r = run_cli("ingest --corpus_dir " + dir.str() + " --stopwords " + kData +
                                  "/stopwords_en.txt --out_dir " + out,
                              dir);
  REQUIRE(r.code == 0);
  const auto [vocab, stream] = load_corpus_snapshot(out + "/corpus.snap");
  CHECK(stream.epochs.size() == 5);
  CHECK(vocab.size() > 0);
}

TEST_CASE("ingest maps missing directories to exit 3", "[cli]") {
  TempDir dir("cli_ingest_err");
  const CliResult r = run_cli("ingest --corpus_dir " + dir.file("nowhere") + " --stopwords " +
                                  kData + "/stopwords_en.txt --out_dir " + dir.file("out"),
                              dir);
  CHECK(r.code == 3);
  CHECK(r.err.find("nowhere") != std::string::npos);
}

TEST_CASE("ingest rejects a corpus that is entirely stopwords", "[cli]") {
  TempDir dir("cli_ingest_empty");
  write_file(dir.file("session_01.txt"), "the and of\n");
  write_file(dir.file("session_02.txt"), "a an\n");
  const CliResult r = run_cli("ingest --corpus_dir " + dir.str() + " --stopwords " + kData +
                                  "/stopwords_en.txt --out_dir " + dir.file("out"),
                              dir);
  CHECK(r.code == 2);
}

TEST_CASE("train is byte-deterministic and leaves a full artifact set", "[cli]") {
  TempDir dir("cli_train");
  const std::string out_a = dir.file("a"), out_b = dir.file("b");
  const std::string synth =
      " --synth_docs 6 --synth_doc_len 40 --synth_epochs 3 --synth_vocab 40 --topics 2 --seed 5";
  REQUIRE(run_cli("synth --out_dir " + out_a + synth, dir).code == 0);
  REQUIRE(run_cli("synth --out_dir " + out_b + synth, dir).code == 0);
  CHECK(read_file(out_a + "/corpus.snap") == read_file(out_b + "/corpus.snap"));

  REQUIRE(run_cli("train" + train_flags(out_a) + " --seed 5", dir).code == 0);
  REQUIRE(run_cli("train" + train_flags(out_b) + " --seed 5", dir).code == 0);
  const std::string dump_a = read_file(out_a + "/posterior.txt");
  CHECK(!dump_a.empty());
  CHECK(dump_a == read_file(out_b + "/posterior.txt"));

  CHECK(read_file(out_a + "/manifest.txt").find("model_2.snap") != std::string::npos);
  CHECK(read_file(out_a + "/config.effective").find("seed=5") != std::string::npos);
}

TEST_CASE("the posterior dump carries one cluster row per sentiment-topic pair", "[cli]") {
  TempDir dir("cli_clusters");
  const std::string out = dir.file("out");
  REQUIRE(run_cli("synth --out_dir " + out +
                      " --synth_docs 4 --synth_doc_len 30 --synth_epochs 1 --synth_vocab 50"
                      " --topics 5 --seed 2",
                  dir)
              .code == 0);
  REQUIRE(run_cli("train --out_dir " + out + " --lexicon_positive " + out +
                      "/lexicon_positive.txt --lexicon_negative " + out +
                      "/lexicon_negative.txt --topics 5 --sweeps 30 --burn_in 5 --seed 2",
                  dir)
              .code == 0);
  const auto outcomes = load_posterior_dump(out + "/posterior.txt");
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes.front().posterior.clusters() == 10);
}

TEST_CASE("report emits one trend row per session including gaps", "[cli]") {
  TempDir dir("cli_report");
  write_client_dir(dir, 3);
  write_file(dir.file("session_09.txt"), "T: only therapist talk\n");
  const std::string out = dir.file("out");
  REQUIRE(run_cli("ingest --corpus_dir " + dir.str() + " --stopwords " + kData +
                      "/stopwords_en.txt --out_dir " + out,
                  dir)
              .code == 0);
  REQUIRE(run_cli("train" + train_flags(out) + " --seed 3", dir).code == 0);
  REQUIRE(run_cli("report --out_dir " + out + " --top_words 4", dir).code == 0);

  const std::string trend = read_file(out + "/trend.csv");
  CHECK(trend.find("session,p_positive,p_negative,dominant,tokens") == 0);
  int rows = 0;
  for (char c : trend) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 5);  // header + 4 sessions
  CHECK(trend.find("9,,,no data,0") != std::string::npos);

  const std::string topics = read_file(out + "/topics.json");
  CHECK(topics.find("\"sentiment\"") != std::string::npos);
  const auto parsed = nlohmann::json::parse(topics);
  REQUIRE(parsed.size() == 4);  // 2 labels x 2 topics
  for (const auto& cluster : parsed) CHECK(cluster["words"].size() == 4);
}

TEST_CASE("eval scores the reference cases", "[cli]") {
  TempDir dir("cli_eval");
  const std::string cases = kFixtures + "/expert_cases";
  const CliResult bryan =
      run_cli("eval " + cases + "/bryan_model.csv " + cases + "/bryan_expert.csv --out_dir " +
                  dir.file("out"),
              dir);
  REQUIRE(bryan.code == 0);
  CHECK(bryan.out.find("accuracy 1.000000 (9/9)") != std::string::npos);

  const CliResult frank =
      run_cli("eval " + cases + "/frank_model.csv " + cases + "/frank_expert.csv --out_dir " +
                  dir.file("out"),
              dir);
  REQUIRE(frank.code == 0);
  CHECK(frank.out.find("accuracy 0.800000 (4/5)") != std::string::npos);
  CHECK(read_file(dir.file("out") + "/eval.txt").find("5 N P NO") != std::string::npos);
}

TEST_CASE("eval with no shared labels is a validation failure", "[cli]") {
  TempDir dir("cli_eval_err");
  write_file(dir.file("model.csv"),
             "session,p_positive,p_negative,dominant,tokens\n1,,,no data,0\n");
  write_file(dir.file("expert.csv"), "session,label\n7,N\n");
  const CliResult r =
      run_cli("eval " + dir.file("model.csv") + " " + dir.file("expert.csv") + " --out_dir " +
                  dir.file("out"),
              dir);
  CHECK(r.code == 2);
}

TEST_CASE("synth with zero documents still writes a corpus", "[cli]") {
  TempDir dir("cli_synth0");
  const std::string out = dir.file("out");
  const CliResult r = run_cli(
      "synth --out_dir " + out + " --synth_docs 0 --synth_doc_len 0 --synth_vocab 12 --topics 2",
      dir);
  REQUIRE(r.code == 0);
  const auto [vocab, stream] = load_corpus_snapshot(out + "/corpus.snap");
  CHECK(vocab.size() == 12);
  REQUIRE(stream.epochs.size() == 1);
  CHECK(stream.epochs.front().docs.empty());
}

TEST_CASE("flags override config file values", "[cli]") {
  TempDir dir("cli_config");
  const std::string out = dir.file("out");
  write_file(dir.file("run.conf"), "seed=1\ntopics=2\nsynth_docs=3\nsynth_doc_len=10\n"
                                   "synth_vocab=16\nout_dir=" + out + "\n");
  REQUIRE(run_cli("synth --config " + dir.file("run.conf") + " --seed 9", dir).code == 0);
  REQUIRE(run_cli("train --config " + dir.file("run.conf") + " --seed 9 --sweeps 20 --burn_in 5" +
                      " --lexicon_positive " + out + "/lexicon_positive.txt" +
                      " --lexicon_negative " + out + "/lexicon_negative.txt",
                  dir)
              .code == 0);
  const std::string effective = read_file(out + "/config.effective");
  CHECK(effective.find("seed=9") != std::string::npos);
  CHECK(effective.find("topics=2") != std::string::npos);
}

TEST_CASE("ingest output is byte-identical across reruns", "[cli]") {
  TempDir dir("cli_ingest_det");
  write_client_dir(dir, 3);
  const std::string out_a = dir.file("a"), out_b = dir.file("b");
  const std::string common = "ingest --corpus_dir " + dir.str() + " --stopwords " + kData +
                             "/stopwords_en.txt --out_dir ";
  REQUIRE(run_cli(common + out_a, dir).code == 0);
  REQUIRE(run_cli(common + out_b, dir).code == 0);
  CHECK(read_file(out_a + "/corpus.snap") == read_file(out_b + "/corpus.snap"));
}

TEST_CASE("rerunning from the effective config reproduces the outputs", "[cli]") {
  TempDir dir("cli_roundtrip");
  const std::string out = dir.file("out");
  REQUIRE(run_cli("synth --out_dir " + out +
                      " --synth_docs 5 --synth_doc_len 25 --synth_epochs 2 --synth_vocab 24"
                      " --topics 2 --seed 12",
                  dir)
              .code == 0);
  REQUIRE(run_cli("train" + train_flags(out) + " --seed 12", dir).code == 0);

  const std::string replay = dir.file("replay");
  REQUIRE(run_cli("train --config " + out + "/config.effective --out_dir " + replay, dir).code == 0);
  CHECK(read_file(out + "/posterior.txt") == read_file(replay + "/posterior.txt"));
}

TEST_CASE("unknown keys and bad values are usage errors", "[cli]") {
  TempDir dir("cli_badcfg");
  write_file(dir.file("bad.conf"), "not_a_key=1\n");
  CHECK(run_cli("train --config " + dir.file("bad.conf"), dir).code == 2);
  write_file(dir.file("bad2.conf"), "sweeps=ten\n");
  CHECK(run_cli("train --config " + dir.file("bad2.conf"), dir).code == 2);
}

TEST_CASE("independent chains match standalone runs seed for seed", "[cli][slow]") {
  TempDir dir("cli_chains");
  const std::string out = dir.file("out");
  REQUIRE(run_cli("synth --out_dir " + out +
                      " --synth_docs 5 --synth_doc_len 30 --synth_epochs 2 --synth_vocab 30"
                      " --topics 2 --seed 21",
                  dir)
              .code == 0);
  REQUIRE(run_cli("train" + train_flags(out) + " --seed 21 --chains 2", dir).code == 0);
  CHECK(read_file(out + "/chains_summary.csv").find("session,chain0_p_negative") == 0);

  // chain 0 must equal a plain run with the same seed
  const std::string solo = dir.file("solo");
  REQUIRE(run_cli("synth --out_dir " + solo +
                      " --synth_docs 5 --synth_doc_len 30 --synth_epochs 2 --synth_vocab 30"
                      " --topics 2 --seed 21",
                  dir)
              .code == 0);
  REQUIRE(run_cli("train" + train_flags(solo) + " --seed 21", dir).code == 0);
  CHECK(read_file(out + "/chain_0/posterior.txt") == read_file(solo + "/posterior.txt"));

  // chain 1 used seed+1
  const std::string shifted = dir.file("shifted");
  REQUIRE(run_cli("synth --out_dir " + shifted +
                      " --synth_docs 5 --synth_doc_len 30 --synth_epochs 2 --synth_vocab 30"
                      " --topics 2 --seed 21",
                  dir)
              .code == 0);
  REQUIRE(run_cli("train" + train_flags(shifted) + " --seed 22", dir).code == 0);
  CHECK(read_file(out + "/chain_1/posterior.txt") == read_file(shifted + "/posterior.txt"));
}
