#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "djst/corpus.hpp"
#include "djst/hyper.hpp"
#include "djst/lexicon.hpp"
#include "djst/priors.hpp"
#include "djst/sampler.hpp"

namespace djst {

// Rolls the evolutionary state forward after an epoch finishes: the epoch's
// estimated word distributions become the newest history slice, the weights
// are recomputed for the new history length, and the next priors are the
// weighted average of the stored slices. Alpha is carried (the mean of its
// evolution draw) unless sampling is switched on.
inline void advance_epoch(PriorState& ps, const std::vector<double>& phi_hat,
                          const Hyperparams& hp, const LambdaMatrix* lambda, Rng* rng) {
  const int V = ps.vocab;
  for (int c = 0; c < ps.clusters(); ++c) {
    const auto begin = phi_hat.begin() + static_cast<long>(c) * V;
    ps.history[static_cast<std::size_t>(c)].emplace_front(begin, begin + V);
    while (static_cast<int>(ps.history[static_cast<std::size_t>(c)].size()) > ps.window)
      ps.history[static_cast<std::size_t>(c)].pop_back();
  }
  ps.mu = compute_mu(hp, static_cast<int>(ps.history.front().size()));
  for (int l = 0; l < ps.labels; ++l) {
    for (int z = 0; z < ps.topics; ++z) {
      const int c = l * ps.topics + z;
      std::vector<double> evolved = evolve_beta(ps.history[static_cast<std::size_t>(c)], ps.mu);
      if (hp.reapply_lambda && lambda != nullptr) {
        for (int w = 0; w < V; ++w) evolved[static_cast<std::size_t>(w)] *= lambda->at(l, w);
      }
      std::copy(evolved.begin(), evolved.end(), ps.beta.begin() + static_cast<long>(c) * V);
    }
  }
  if (hp.sample_alpha) {
    for (double& a : ps.alpha) {
      a = std::max(rng->gamma(hp.nu * a, hp.nu), 1e-12);
    }
  }
  ps.refresh_sums();
}

struct EpochOutcome {
  int epoch_index = 0;
  std::string session_label;
  bool has_data = false;
  long token_count = 0;
  Posterior posterior;
};

// Sequential trainer over an epoch stream. Epochs must be trained in order;
// the random stream is continuous across epochs so a fixed seed pins the
// whole run.
class Model {
 public:
  Model(const EpochStream* stream, int vocab_size, LambdaMatrix lambda, Hyperparams hp)
      : stream_(stream),
        lambda_(std::move(lambda)),
        hp_(hp),
        rng_(hp.seed),
        priors_(seed_priors(lambda_, hp, vocab_size)) {
    hp_.validate();
  }

  // Resume construction: priors, cursor, and rng come from a saved state.
  Model(const EpochStream* stream, LambdaMatrix lambda, Hyperparams hp, PriorState priors,
        int next_epoch, const std::string& rng_state)
      : stream_(stream),
        lambda_(std::move(lambda)),
        hp_(hp),
        rng_(0),
        priors_(std::move(priors)),
        next_epoch_(next_epoch) {
    hp_.validate();
    rng_.restore(rng_state);
  }

  int num_epochs() const { return static_cast<int>(stream_->epochs.size()); }
  int next_epoch() const { return next_epoch_; }
  const PriorState& priors() const { return priors_; }
  const Hyperparams& hyper() const { return hp_; }
  const LambdaMatrix& lambda() const { return lambda_; }
  const Rng& rng() const { return rng_; }
  const SamplerState* last_state() const { return last_state_.get(); }

  EpochOutcome train_epoch(int t) {
    if (t != next_epoch_) throw ValidationError("epochs must be trained in order");
    const Epoch& epoch = stream_->epochs[static_cast<std::size_t>(t)];
    EpochOutcome out;
    out.epoch_index = t;
    out.session_label = epoch.session_label;
    out.token_count = epoch.token_count();
    out.has_data = !epoch.docs.empty() && out.token_count > 0;

    if (!out.has_data) {
      // Skipped session: priors carry unchanged, nothing enters the history.
      last_state_.reset();
      out.posterior = prior_only_posterior();
      ++next_epoch_;
      return out;
    }

    auto state = std::make_unique<SamplerState>(&epoch, hp_.sentiment_labels, hp_.topics,
                                                priors_.vocab, rng_);
    init_assignments(*state, priors_, &lambda_);

    Posterior averaged;
    int samples = 0;
    for (int sweep = 1; sweep <= hp_.sweeps; ++sweep) {
      gibbs_sweep(*state, priors_, hp_.gamma);
      if (hp_.estimator == EstimatorMode::averaged && sweep > hp_.burn_in &&
          (sweep - hp_.burn_in) % 10 == 0) {
        accumulate(averaged, estimate_posterior(*state, priors_, hp_.gamma));
        ++samples;
      }
    }
    rng_ = state->rng();

    out.posterior = (hp_.estimator == EstimatorMode::averaged && samples > 0)
                        ? finish_average(std::move(averaged), samples)
                        : estimate_posterior(*state, priors_, hp_.gamma);

    // The last epoch feeds no successor.
    if (t + 1 < num_epochs()) {
      advance_epoch(priors_, out.posterior.phi, hp_, &lambda_, &rng_);
    }
    last_state_ = std::move(state);
    ++next_epoch_;
    return out;
  }

  std::vector<EpochOutcome> run() {
    std::vector<EpochOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(num_epochs()));
    for (int t = next_epoch_; t < num_epochs(); ++t) outcomes.push_back(train_epoch(t));
    return outcomes;
  }

  std::string rng_state() const { return rng_.state_text(); }

 private:
  Posterior prior_only_posterior() const {
    Posterior post;
    post.labels = priors_.labels;
    post.topics = priors_.topics;
    post.vocab = priors_.vocab;
    post.docs = 0;
    post.phi.resize(static_cast<std::size_t>(priors_.clusters()) * priors_.vocab);
    for (int c = 0; c < priors_.clusters(); ++c) {
      const double denom = priors_.beta_sum[static_cast<std::size_t>(c)];
      for (int w = 0; w < priors_.vocab; ++w) {
        post.phi[static_cast<std::size_t>(c) * priors_.vocab + w] =
            priors_.beta[static_cast<std::size_t>(c) * priors_.vocab + w] / denom;
      }
    }
    return post;
  }

  static void accumulate(Posterior& acc, const Posterior& sample) {
    if (acc.phi.empty()) {
      acc = sample;
      return;
    }
    for (std::size_t i = 0; i < acc.phi.size(); ++i) acc.phi[i] += sample.phi[i];
    for (std::size_t i = 0; i < acc.theta.size(); ++i) acc.theta[i] += sample.theta[i];
    for (std::size_t i = 0; i < acc.pi.size(); ++i) acc.pi[i] += sample.pi[i];
  }

  static Posterior finish_average(Posterior acc, int samples) {
    const double inv = 1.0 / samples;
    for (double& v : acc.phi) v *= inv;
    for (double& v : acc.theta) v *= inv;
    for (double& v : acc.pi) v *= inv;
    return acc;
  }

  const EpochStream* stream_;
  LambdaMatrix lambda_;
  Hyperparams hp_;
  Rng rng_;
  PriorState priors_;
  int next_epoch_ = 0;
  std::unique_ptr<SamplerState> last_state_;
};

}  // namespace djst
