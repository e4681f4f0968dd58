#pragma once

#include <cassert>
#include <vector>

#include "djst/corpus.hpp"
#include "djst/hyper.hpp"
#include "djst/priors.hpp"
#include "djst/rng.hpp"

namespace djst {

// Rao-Blackwellized point estimates of the three model distributions.
struct Posterior {
  int labels = 0;
  int topics = 0;
  int vocab = 0;
  int docs = 0;

  std::vector<double> phi;    // cluster-major: (l*T+z)*V + w
  std::vector<double> theta;  // d*(L*T) + l*T + z
  std::vector<double> pi;     // d*L + l

  int clusters() const { return labels * topics; }
  double phi_at(int l, int z, int w) const {
    return phi[(static_cast<std::size_t>(l) * topics + z) * vocab + w];
  }
  double theta_at(int d, int l, int z) const {
    return theta[(static_cast<std::size_t>(d) * labels + l) * topics + z];
  }
  double pi_at(int d, int l) const { return pi[static_cast<std::size_t>(d) * labels + l]; }
};

// Token-level (sentiment, topic) assignments for one epoch plus the five
// count tables driving the collapsed conditional.
class SamplerState {
 public:
  SamplerState(const Epoch* epoch, int labels, int topics, int vocab, Rng rng)
      : epoch_(epoch), labels_(labels), topics_(topics), vocab_(vocab), rng_(std::move(rng)) {
    const int docs = num_docs();
    for (int d = 0; d < docs; ++d) {
      if (epoch_->docs[static_cast<std::size_t>(d)].tokens.empty())
        throw ValidationError("document with zero tokens rejected at training: " +
                              epoch_->docs[static_cast<std::size_t>(d)].doc_id);
    }
    lab_.resize(static_cast<std::size_t>(docs));
    top_.resize(static_cast<std::size_t>(docs));
    for (int d = 0; d < docs; ++d) {
      const std::size_t len = epoch_->docs[static_cast<std::size_t>(d)].tokens.size();
      lab_[static_cast<std::size_t>(d)].assign(len, -1);
      top_[static_cast<std::size_t>(d)].assign(len, -1);
    }
    n_dlz_.assign(static_cast<std::size_t>(docs) * labels_ * topics_, 0);
    n_dl_.assign(static_cast<std::size_t>(docs) * labels_, 0);
    n_d_.assign(static_cast<std::size_t>(docs), 0);
    n_lzw_.assign(static_cast<std::size_t>(labels_) * topics_ * vocab_, 0);
    n_lz_.assign(static_cast<std::size_t>(labels_) * topics_, 0);
  }

  const Epoch& epoch() const { return *epoch_; }
  int num_docs() const { return static_cast<int>(epoch_->docs.size()); }
  int labels() const { return labels_; }
  int topics() const { return topics_; }
  int vocab() const { return vocab_; }
  int clusters() const { return labels_ * topics_; }

  int word(int d, int n) const {
    return epoch_->docs[static_cast<std::size_t>(d)].tokens[static_cast<std::size_t>(n)];
  }
  int doc_len(int d) const {
    return static_cast<int>(epoch_->docs[static_cast<std::size_t>(d)].tokens.size());
  }

  int label_of(int d, int n) const { return lab_[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)]; }
  int topic_of(int d, int n) const { return top_[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)]; }

  int n_dlz(int d, int l, int z) const {
    return n_dlz_[(static_cast<std::size_t>(d) * labels_ + l) * topics_ + z];
  }
  int n_dl(int d, int l) const { return n_dl_[static_cast<std::size_t>(d) * labels_ + l]; }
  int n_d(int d) const { return n_d_[static_cast<std::size_t>(d)]; }
  int n_lzw(int l, int z, int w) const {
    return n_lzw_[(static_cast<std::size_t>(l) * topics_ + z) * vocab_ + w];
  }
  int n_lz(int l, int z) const { return n_lz_[static_cast<std::size_t>(l) * topics_ + z]; }

  long total_assigned() const {
    long total = 0;
    for (int c : n_lz_) total += c;
    return total;
  }

  void assign(int d, int n, int l, int z) {
    lab_[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)] = l;
    top_[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)] = z;
    bump(d, n, l, z, +1);
  }

  void remove(int d, int n) {
    const int l = label_of(d, n);
    const int z = topic_of(d, n);
    assert(l >= 0 && z >= 0);
    bump(d, n, l, z, -1);
  }

  // Rebuilds all five tables from the current assignments and compares; the
  // counts must be exactly the tally of assignments at all times.
  bool recount_matches() const {
    std::vector<int> dlz(n_dlz_.size(), 0), dl(n_dl_.size(), 0), dtot(n_d_.size(), 0);
    std::vector<int> lzw(n_lzw_.size(), 0), lz(n_lz_.size(), 0);
    for (int d = 0; d < num_docs(); ++d) {
      for (int n = 0; n < doc_len(d); ++n) {
        const int l = label_of(d, n), z = topic_of(d, n), w = word(d, n);
        if (l < 0 || z < 0) return false;
        ++dlz[(static_cast<std::size_t>(d) * labels_ + l) * topics_ + z];
        ++dl[static_cast<std::size_t>(d) * labels_ + l];
        ++dtot[static_cast<std::size_t>(d)];
        ++lzw[(static_cast<std::size_t>(l) * topics_ + z) * vocab_ + w];
        ++lz[static_cast<std::size_t>(l) * topics_ + z];
      }
    }
    return dlz == n_dlz_ && dl == n_dl_ && dtot == n_d_ && lzw == n_lzw_ && lz == n_lz_;
  }

  // Replaces the assignments wholesale (snapshot restore) and recounts.
  void restore_assignments(const std::vector<std::vector<int>>& labels_by_doc,
                           const std::vector<std::vector<int>>& topics_by_doc) {
    if (static_cast<int>(labels_by_doc.size()) != num_docs() ||
        static_cast<int>(topics_by_doc.size()) != num_docs())
      throw ValidationError("assignment table does not match document count");
    std::fill(n_dlz_.begin(), n_dlz_.end(), 0);
    std::fill(n_dl_.begin(), n_dl_.end(), 0);
    std::fill(n_d_.begin(), n_d_.end(), 0);
    std::fill(n_lzw_.begin(), n_lzw_.end(), 0);
    std::fill(n_lz_.begin(), n_lz_.end(), 0);
    for (int d = 0; d < num_docs(); ++d) {
      if (static_cast<int>(labels_by_doc[static_cast<std::size_t>(d)].size()) != doc_len(d))
        throw ValidationError("assignment row does not match document length");
      for (int n = 0; n < doc_len(d); ++n) {
        assign(d, n, labels_by_doc[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)],
               topics_by_doc[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)]);
      }
    }
  }

  const std::vector<std::vector<int>>& label_table() const { return lab_; }
  const std::vector<std::vector<int>>& topic_table() const { return top_; }

  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

 private:
  void bump(int d, int n, int l, int z, int delta) {
    const int w = word(d, n);
    n_dlz_[(static_cast<std::size_t>(d) * labels_ + l) * topics_ + z] += delta;
    n_dl_[static_cast<std::size_t>(d) * labels_ + l] += delta;
    n_d_[static_cast<std::size_t>(d)] += delta;
    n_lzw_[(static_cast<std::size_t>(l) * topics_ + z) * vocab_ + w] += delta;
    n_lz_[static_cast<std::size_t>(l) * topics_ + z] += delta;
  }

  const Epoch* epoch_;
  int labels_, topics_, vocab_;
  std::vector<std::vector<int>> lab_, top_;
  std::vector<int> n_dlz_, n_dl_, n_d_, n_lzw_, n_lz_;
  Rng rng_;
};

// Full conditional over the L*T pairs for the token at (d, n), given that its
// current assignment has already been removed from the counts:
//
//   p(l,z) ~ (N_lzw + beta_lzw)/(N_lz + sum_v beta_lzv)
//          * (N_dlz + alpha_lz)/(N_dl + sum_z alpha_lz)
//          * (N_dl + gamma)/(N_d + L*gamma)
//
// Returned normalized, cluster-major.
inline std::vector<double> conditional_given_removed(const SamplerState& state,
                                                     const PriorState& priors, double gamma,
                                                     int d, int n) {
  const int w = state.word(d, n);
  const int L = state.labels(), T = state.topics();
  std::vector<double> weights(static_cast<std::size_t>(L) * T);
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    const double pi_factor = (state.n_dl(d, l) + gamma) / (state.n_d(d) + L * gamma);
    const double theta_denom = state.n_dl(d, l) + priors.alpha_sum[static_cast<std::size_t>(l)];
    for (int z = 0; z < T; ++z) {
      const double word_factor =
          (state.n_lzw(l, z, w) + priors.beta_at(l, z, w)) /
          (state.n_lz(l, z) + priors.beta_sum[static_cast<std::size_t>(l) * T + z]);
      const double topic_factor = (state.n_dlz(d, l, z) + priors.alpha_at(l, z)) / theta_denom;
      const double p = word_factor * topic_factor * pi_factor;
      weights[static_cast<std::size_t>(l) * T + z] = p;
      total += p;
    }
  }
  assert(total > 0.0 && "conditional underflow: impossible while beta, alpha, gamma > 0");
  for (double& p : weights) p /= total;
  return weights;
}

// Resamples the token at (d, n): remove, draw from the conditional, re-add.
inline std::pair<int, int> sample_assignment(SamplerState& state, const PriorState& priors,
                                             double gamma, int d, int n) {
  state.remove(d, n);
  const std::vector<double> weights = conditional_given_removed(state, priors, gamma, d, n);
  const int pick = state.rng().categorical(weights);
  const int l = pick / state.topics();
  const int z = pick % state.topics();
  state.assign(d, n, l, z);
  return {l, z};
}

// One full pass: every token resampled once, document order then position order.
inline void gibbs_sweep(SamplerState& state, const PriorState& priors, double gamma) {
  for (int d = 0; d < state.num_docs(); ++d) {
    for (int n = 0; n < state.doc_len(d); ++n) {
      sample_assignment(state, priors, gamma, d, n);
    }
  }
}

// Initial assignments: lexicon-bearing words draw (l, z) proportional to the
// word's column of the prior, everything else uniformly.
inline void init_assignments(SamplerState& state, const PriorState& priors,
                             const LambdaMatrix* lambda) {
  const int L = state.labels(), T = state.topics();
  std::vector<double> weights(static_cast<std::size_t>(L) * T);
  for (int d = 0; d < state.num_docs(); ++d) {
    for (int n = 0; n < state.doc_len(d); ++n) {
      const int w = state.word(d, n);
      int pick;
      if (lambda != nullptr && lambda->in_lexicon(w)) {
        for (int l = 0; l < L; ++l)
          for (int z = 0; z < T; ++z)
            weights[static_cast<std::size_t>(l) * T + z] = priors.beta_at(l, z, w);
        pick = state.rng().categorical(weights);
      } else {
        pick = state.rng().uniform_index(L * T);
      }
      state.assign(d, n, pick / T, pick % T);
    }
  }
}

inline Posterior estimate_posterior(const SamplerState& state, const PriorState& priors,
                                    double gamma) {
  Posterior post;
  post.labels = state.labels();
  post.topics = state.topics();
  post.vocab = state.vocab();
  post.docs = state.num_docs();
  const int L = post.labels, T = post.topics, V = post.vocab, D = post.docs;

  post.phi.resize(static_cast<std::size_t>(L) * T * V);
  for (int l = 0; l < L; ++l) {
    for (int z = 0; z < T; ++z) {
      const double denom = state.n_lz(l, z) + priors.beta_sum[static_cast<std::size_t>(l) * T + z];
      const std::size_t base = (static_cast<std::size_t>(l) * T + z) * V;
      for (int w = 0; w < V; ++w) {
        post.phi[base + w] = (state.n_lzw(l, z, w) + priors.beta_at(l, z, w)) / denom;
      }
    }
  }

  post.theta.resize(static_cast<std::size_t>(D) * L * T);
  post.pi.resize(static_cast<std::size_t>(D) * L);
  for (int d = 0; d < D; ++d) {
    for (int l = 0; l < L; ++l) {
      const double theta_denom = state.n_dl(d, l) + priors.alpha_sum[static_cast<std::size_t>(l)];
      for (int z = 0; z < T; ++z) {
        post.theta[(static_cast<std::size_t>(d) * L + l) * T + z] =
            (state.n_dlz(d, l, z) + priors.alpha_at(l, z)) / theta_denom;
      }
      post.pi[static_cast<std::size_t>(d) * L + l] =
          (state.n_dl(d, l) + gamma) / (state.n_d(d) + L * gamma);
    }
  }
  return post;
}

}  // namespace djst
