#pragma once

#include <cassert>
#include <cmath>
#include <deque>
#include <vector>

#include "djst/errors.hpp"
#include "djst/hyper.hpp"
#include "djst/lexicon.hpp"

namespace djst {

// History of one sentiment-topic cluster: word distributions from the most
// recent epochs, front() being one epoch back.
using ClusterHistory = std::deque<std::vector<double>>;

// Dirichlet priors for one epoch plus the evolutionary state that produces
// the next epoch's priors.
struct PriorState {
  int labels = 0;
  int topics = 0;
  int vocab = 0;
  int window = 0;

  std::vector<double> beta;       // cluster-major: (l*T+z)*V + w
  std::vector<double> beta_sum;   // per cluster
  std::vector<double> alpha;      // l*T + z
  std::vector<double> alpha_sum;  // per label
  std::vector<ClusterHistory> history;  // per cluster
  std::vector<double> mu;         // mu[0] weights the most recent slice

  int clusters() const { return labels * topics; }

  double beta_at(int l, int z, int w) const {
    return beta[(static_cast<std::size_t>(l) * topics + z) * vocab + w];
  }
  double& beta_at(int l, int z, int w) {
    return beta[(static_cast<std::size_t>(l) * topics + z) * vocab + w];
  }
  double alpha_at(int l, int z) const { return alpha[static_cast<std::size_t>(l) * topics + z]; }
  double& alpha_at(int l, int z) { return alpha[static_cast<std::size_t>(l) * topics + z]; }

  void refresh_sums() {
    beta_sum.assign(static_cast<std::size_t>(clusters()), 0.0);
    for (int c = 0; c < clusters(); ++c) {
      double s = 0.0;
      for (int w = 0; w < vocab; ++w) s += beta[static_cast<std::size_t>(c) * vocab + w];
      beta_sum[static_cast<std::size_t>(c)] = s;
    }
    alpha_sum.assign(static_cast<std::size_t>(labels), 0.0);
    for (int l = 0; l < labels; ++l) {
      double s = 0.0;
      for (int z = 0; z < topics; ++z) s += alpha_at(l, z);
      alpha_sum[static_cast<std::size_t>(l)] = s;
    }
  }
};

// Epoch-0 word prior: the symmetric base multiplied elementwise by the
// lexicon transform, broadcast over topics.
inline std::vector<double> seed_beta(const LambdaMatrix& lambda, const Hyperparams& hp, int vocab_size) {
  if (lambda.vocab() != vocab_size)
    throw DimensionMismatch("lambda width does not match vocabulary size");
  if (lambda.labels() != hp.sentiment_labels)
    throw DimensionMismatch("lambda height does not match sentiment label count");
  std::vector<double> beta(static_cast<std::size_t>(hp.clusters()) * vocab_size);
  for (int l = 0; l < hp.sentiment_labels; ++l) {
    for (int z = 0; z < hp.topics; ++z) {
      const std::size_t base = (static_cast<std::size_t>(l) * hp.topics + z) * vocab_size;
      for (int w = 0; w < vocab_size; ++w) {
        beta[base + w] = hp.beta_base * lambda.at(l, w);
      }
    }
  }
  return beta;
}

// Convex weights over the stored history slices. Under decay(kappa) a slice
// a epochs in the past gets weight proportional to exp(-kappa*a).
inline std::vector<double> compute_mu(const Hyperparams& hp, int history_len) {
  assert(history_len >= 1 && history_len <= hp.window);
  std::vector<double> mu(static_cast<std::size_t>(history_len));
  if (hp.mu_scheme == MuScheme::uniform) {
    const double flat = 1.0 / history_len;
    for (double& m : mu) m = flat;
    return mu;
  }
  double total = 0.0;
  for (int a = 1; a <= history_len; ++a) {
    mu[static_cast<std::size_t>(a - 1)] = std::exp(-hp.kappa * a);
    total += mu[static_cast<std::size_t>(a - 1)];
  }
  for (double& m : mu) m /= total;
  return mu;
}

// Weighted average of the stored word distributions: the product of the
// evolutionary matrix with the weight vector.
inline std::vector<double> evolve_beta(const ClusterHistory& history, const std::vector<double>& mu) {
  if (history.empty()) throw EmptyHistory();
  if (history.size() != mu.size())
    throw DimensionMismatch("weight vector length does not match history length");
  std::vector<double> beta(history.front().size(), 0.0);
  for (std::size_t s = 0; s < history.size(); ++s) {
    const std::vector<double>& sigma = history[s];
    if (sigma.size() != beta.size())
      throw DimensionMismatch("history slices differ in width");
    for (std::size_t w = 0; w < beta.size(); ++w) beta[w] += mu[s] * sigma[w];
  }
  return beta;
}

inline PriorState seed_priors(const LambdaMatrix& lambda, const Hyperparams& hp, int vocab_size) {
  PriorState ps;
  ps.labels = hp.sentiment_labels;
  ps.topics = hp.topics;
  ps.vocab = vocab_size;
  ps.window = hp.window;
  ps.beta = seed_beta(lambda, hp, vocab_size);
  ps.alpha.assign(static_cast<std::size_t>(hp.clusters()), hp.initial_alpha());
  ps.history.assign(static_cast<std::size_t>(hp.clusters()), {});
  ps.refresh_sums();
  return ps;
}

}  // namespace djst
