#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "djst/model.hpp"
#include "djst/snapshot.hpp"
#include "support/harness.hpp"

using namespace djst;
using Catch::Matchers::WithinAbs;
using testsupport::TempDir;

namespace {

EpochStream random_stream(int epochs, int docs, int len, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  EpochStream stream;
  for (int t = 0; t < epochs; ++t) {
    Epoch epoch;
    epoch.session_label = std::to_string(t + 1);
    for (int d = 0; d < docs; ++d) {
      Document doc;
      doc.doc_id = "e" + std::to_string(t) + "_d" + std::to_string(d);
      doc.epoch = t;
      for (int n = 0; n < len; ++n) doc.tokens.push_back(rng.uniform_index(vocab));
      epoch.docs.push_back(std::move(doc));
    }
    stream.epochs.push_back(std::move(epoch));
  }
  return stream;
}

Hyperparams small_hyper() {
  Hyperparams hp;
  hp.topics = 2;
  hp.window = 3;
  hp.sweeps = 40;
  hp.burn_in = 10;
  hp.seed = 11;
  return hp;
}

}  // namespace

TEST_CASE("with a window of one the next prior equals the last estimate", "[model]") {
  const EpochStream stream = random_stream(5, 2, 30, 8, 77);
  Hyperparams hp = small_hyper();
  hp.window = 1;
  Model model(&stream, 8, LambdaMatrix(2, 8), hp);
  for (int t = 0; t + 1 < model.num_epochs(); ++t) {
    const EpochOutcome out = model.train_epoch(t);
    const PriorState& ps = model.priors();
    for (std::size_t i = 0; i < ps.beta.size(); ++i) {
      REQUIRE_THAT(ps.beta[i], WithinAbs(out.posterior.phi[i], 1e-12));
    }
  }
}

TEST_CASE("history holds at most the window length", "[model]") {
  const EpochStream stream = random_stream(5, 2, 20, 6, 31);
  const Hyperparams hp = small_hyper();  // window 3
  Model model(&stream, 6, LambdaMatrix(2, 6), hp);
  model.run();
  for (const auto& hist : model.priors().history) {
    CHECK(hist.size() == 3);  // four pushes happened, capped at the window
  }
  CHECK(model.priors().mu.size() == 3);
}

TEST_CASE("alpha is carried unchanged in deterministic mode", "[model]") {
  const EpochStream stream = random_stream(4, 2, 20, 6, 13);
  const Hyperparams hp = small_hyper();
  Model model(&stream, 6, LambdaMatrix(2, 6), hp);
  const std::vector<double> before = model.priors().alpha;
  model.run();
  CHECK(model.priors().alpha == before);
}

TEST_CASE("sampled alpha stays positive and remains deterministic", "[model]") {
  const EpochStream stream = random_stream(4, 2, 20, 6, 13);
  Hyperparams hp = small_hyper();
  hp.sample_alpha = true;
  hp.nu = 4.0;
  Model a(&stream, 6, LambdaMatrix(2, 6), hp);
  Model b(&stream, 6, LambdaMatrix(2, 6), hp);
  a.run();
  b.run();
  CHECK(a.priors().alpha == b.priors().alpha);
  bool changed = false;
  for (std::size_t i = 0; i < a.priors().alpha.size(); ++i) {
    CHECK(a.priors().alpha[i] > 0.0);
    if (a.priors().alpha[i] != hp.initial_alpha()) changed = true;
  }
  CHECK(changed);
}

TEST_CASE("a skipped session leaves the priors untouched", "[model]") {
  EpochStream stream = random_stream(3, 2, 20, 6, 19);
  stream.epochs[1].docs.clear();  // gap in the case file
  const Hyperparams hp = small_hyper();
  Model model(&stream, 6, LambdaMatrix(2, 6), hp);
  const EpochOutcome first = model.train_epoch(0);
  CHECK(first.has_data);
  const std::vector<double> beta_after_first = model.priors().beta;
  const std::size_t history_len = model.priors().history.front().size();

  const EpochOutcome gap = model.train_epoch(1);
  CHECK(!gap.has_data);
  CHECK(gap.token_count == 0);
  CHECK(model.priors().beta == beta_after_first);
  CHECK(model.priors().history.front().size() == history_len);

  const EpochOutcome last = model.train_epoch(2);
  CHECK(last.has_data);
}

TEST_CASE("a one-epoch corpus trains from the seed prior alone", "[model]") {
  const EpochStream stream = random_stream(1, 2, 25, 6, 23);
  const Hyperparams hp = small_hyper();
  Model model(&stream, 6, LambdaMatrix(2, 6), hp);
  const std::vector<double> seeded = model.priors().beta;
  const std::vector<EpochOutcome> outcomes = model.run();
  REQUIRE(outcomes.size() == 1);
  CHECK(model.priors().beta == seeded);  // no successor epoch, no evolution
  CHECK(model.priors().history.front().empty());
}

TEST_CASE("identical seeds reproduce the posterior bit for bit", "[model]") {
  const EpochStream stream = random_stream(3, 3, 30, 10, 41);
  const Hyperparams hp = small_hyper();
  Model a(&stream, 10, LambdaMatrix(2, 10), hp);
  Model b(&stream, 10, LambdaMatrix(2, 10), hp);
  const auto out_a = a.run();
  const auto out_b = b.run();
  REQUIRE(out_a.size() == out_b.size());
  for (std::size_t t = 0; t < out_a.size(); ++t) {
    CHECK(out_a[t].posterior.phi == out_b[t].posterior.phi);
    CHECK(out_a[t].posterior.theta == out_b[t].posterior.theta);
    CHECK(out_a[t].posterior.pi == out_b[t].posterior.pi);
  }
}

TEST_CASE("normalization holds for every epoch of a run", "[model]") {
  const EpochStream stream = random_stream(5, 2, 25, 8, 53);
  Hyperparams hp = small_hyper();
  hp.estimator = EstimatorMode::averaged;
  Model model(&stream, 8, LambdaMatrix(2, 8), hp);
  const auto outcomes = model.run();
  for (const auto& out : outcomes) {
    const Posterior& post = out.posterior;
    for (int l = 0; l < post.labels; ++l) {
      for (int z = 0; z < post.topics; ++z) {
        double sum = 0.0;
        for (int w = 0; w < post.vocab; ++w) sum += post.phi_at(l, z, w);
        CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
      }
    }
    for (int d = 0; d < post.docs; ++d) {
      double pi_sum = 0.0;
      for (int l = 0; l < post.labels; ++l) pi_sum += post.pi_at(d, l);
      CHECK_THAT(pi_sum, WithinAbs(1.0, 1e-9));
    }
  }
  const PriorState& ps = model.priors();
  double mu_sum = 0.0;
  for (double m : ps.mu) mu_sum += m;
  CHECK_THAT(mu_sum, WithinAbs(1.0, 1e-12));
  for (const auto& hist : ps.history) {
    for (const auto& sigma : hist) {
      double sum = 0.0;
      for (double v : sigma) {
        CHECK(v > 0.0);
        sum += v;
      }
      CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
    }
  }
}

TEST_CASE("epochs must be trained in order", "[model]") {
  const EpochStream stream = random_stream(2, 1, 10, 4, 3);
  Model model(&stream, 4, LambdaMatrix(2, 4), small_hyper());
  CHECK_THROWS_AS(model.train_epoch(1), ValidationError);
}

TEST_CASE("model snapshots round-trip exactly", "[model][snapshot]") {
  TempDir dir("snap");
  const EpochStream stream = random_stream(3, 2, 20, 6, 67);
  const Hyperparams hp = small_hyper();
  Model model(&stream, 6, LambdaMatrix(2, 6), hp);
  model.train_epoch(0);

  SnapshotData snap;
  snap.epoch_index = 0;
  snap.session_label = "1";
  snap.hyper = hp;
  snap.priors = model.priors();
  snap.lab = model.last_state()->label_table();
  snap.top = model.last_state()->topic_table();
  snap.rng_state = model.rng_state();

  const std::string path = dir.file("model_0.snap");
  save_model_snapshot(path, snap);
  const SnapshotData loaded = load_model_snapshot(path);

  CHECK(loaded.epoch_index == 0);
  CHECK(loaded.session_label == "1");
  CHECK(loaded.priors.beta == snap.priors.beta);
  CHECK(loaded.priors.alpha == snap.priors.alpha);
  CHECK(loaded.priors.mu == snap.priors.mu);
  REQUIRE(loaded.priors.history.size() == snap.priors.history.size());
  for (std::size_t c = 0; c < snap.priors.history.size(); ++c) {
    REQUIRE(loaded.priors.history[c].size() == snap.priors.history[c].size());
    for (std::size_t s = 0; s < snap.priors.history[c].size(); ++s)
      CHECK(loaded.priors.history[c][s] == snap.priors.history[c][s]);
  }
  CHECK(loaded.lab == snap.lab);
  CHECK(loaded.top == snap.top);
  CHECK(loaded.rng_state == snap.rng_state);
  CHECK(loaded.hyper.seed == hp.seed);
  CHECK(loaded.hyper.mu_scheme == hp.mu_scheme);
}

TEST_CASE("resuming from a snapshot restores bit-identical sampling", "[model][snapshot]") {
  TempDir dir("resume");
  const EpochStream stream = random_stream(3, 2, 25, 8, 71);
  const Hyperparams hp = small_hyper();
  const LambdaMatrix lambda(2, 8);

  // Uninterrupted reference run.
  Model full(&stream, 8, lambda, hp);
  std::vector<EpochOutcome> reference = full.run();

  // Stop after epoch 1, snapshot, reload, finish.
  Model partial(&stream, 8, lambda, hp);
  partial.train_epoch(0);
  partial.train_epoch(1);
  SnapshotData snap;
  snap.epoch_index = 1;
  snap.session_label = "2";
  snap.hyper = hp;
  snap.priors = partial.priors();
  snap.lab = partial.last_state()->label_table();
  snap.top = partial.last_state()->topic_table();
  snap.rng_state = partial.rng_state();
  const std::string path = dir.file("model_1.snap");
  save_model_snapshot(path, snap);

  const SnapshotData loaded = load_model_snapshot(path);
  Model resumed(&stream, lambda, loaded.hyper, loaded.priors, loaded.epoch_index + 1,
                loaded.rng_state);
  const EpochOutcome final_epoch = resumed.train_epoch(2);

  CHECK(final_epoch.posterior.phi == reference[2].posterior.phi);
  CHECK(final_epoch.posterior.theta == reference[2].posterior.theta);
  CHECK(final_epoch.posterior.pi == reference[2].posterior.pi);
}

TEST_CASE("restored assignments can continue a raw sampler", "[model][snapshot]") {
  const EpochStream stream = random_stream(1, 2, 20, 6, 91);
  const Epoch& epoch = stream.epochs.front();
  PriorState ps;
  Hyperparams hp = small_hyper();
  ps = seed_priors(LambdaMatrix(2, 6), hp, 6);

  SamplerState a(&epoch, 2, hp.topics, 6, Rng(5));
  init_assignments(a, ps, nullptr);
  for (int i = 0; i < 10; ++i) gibbs_sweep(a, ps, hp.gamma);
  const auto saved_lab = a.label_table();
  const auto saved_top = a.topic_table();
  const std::string saved_rng = a.rng().state_text();
  for (int i = 0; i < 10; ++i) gibbs_sweep(a, ps, hp.gamma);

  SamplerState b(&epoch, 2, hp.topics, 6, Rng(0));
  b.restore_assignments(saved_lab, saved_top);
  b.rng().restore(saved_rng);
  REQUIRE(b.recount_matches());
  for (int i = 0; i < 10; ++i) gibbs_sweep(b, ps, hp.gamma);
  CHECK(a.label_table() == b.label_table());
  CHECK(a.topic_table() == b.topic_table());
}
