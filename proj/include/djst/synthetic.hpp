#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "djst/corpus.hpp"
#include "djst/errors.hpp"
#include "djst/hyper.hpp"
#include "djst/rng.hpp"

namespace djst {

// Ground truth kept alongside a generated corpus.
struct SyntheticTruth {
  std::vector<std::vector<double>> pi;     // per doc, length L
  std::vector<std::vector<double>> theta;  // per doc, flat L*T
  std::vector<std::vector<int>> lab;       // per doc per token
  std::vector<std::vector<int>> top;
};

struct SyntheticResult {
  EpochStream stream;  // single epoch
  Vocabulary vocab;    // terms w000..w<V-1>
  SyntheticTruth truth;
};

// Forward run of the generative story over planted word distributions:
// per document pi ~ Dir(gamma) and theta_l ~ Dir(alpha_l.), then per token
// l ~ Mult(pi), z ~ Mult(theta_l), w ~ Mult(phi_lz). When planted_pi is given
// it replaces the Dirichlet draw for every document.
inline SyntheticResult generate_synthetic(const std::vector<double>& planted_phi,
                                          const Hyperparams& hp, int docs, int doc_len,
                                          std::uint64_t seed,
                                          const std::vector<double>* planted_pi = nullptr) {
  const int L = hp.sentiment_labels;
  const int T = hp.topics;
  if (planted_phi.empty() || planted_phi.size() % static_cast<std::size_t>(L * T) != 0)
    throw DimensionMismatch("planted phi size is not a multiple of L*T");
  const int V = static_cast<int>(planted_phi.size() / static_cast<std::size_t>(L * T));
  for (int c = 0; c < L * T; ++c) {
    double row = 0.0;
    for (int w = 0; w < V; ++w) {
      const double p = planted_phi[static_cast<std::size_t>(c) * V + w];
      if (p < 0.0) throw ValidationError("planted phi has a negative entry");
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-6) throw ValidationError("planted phi row does not sum to 1");
  }
  if (planted_pi != nullptr && static_cast<int>(planted_pi->size()) != L)
    throw DimensionMismatch("planted pi length does not match label count");

  Rng rng(seed);
  SyntheticResult result;

  int width = 1;
  for (int v = V - 1; v >= 10; v /= 10) ++width;
  for (int w = 0; w < V; ++w) {
    std::string term = std::to_string(w);
    term.insert(0, static_cast<std::size_t>(width) - term.size(), '0');
    result.vocab.add("w" + term);
  }

  // Per-cluster word CDFs for the token draws.
  std::vector<std::vector<double>> cdf(static_cast<std::size_t>(L * T),
                                       std::vector<double>(static_cast<std::size_t>(V)));
  for (int c = 0; c < L * T; ++c) {
    double acc = 0.0;
    for (int w = 0; w < V; ++w) {
      acc += planted_phi[static_cast<std::size_t>(c) * V + w];
      cdf[static_cast<std::size_t>(c)][static_cast<std::size_t>(w)] = acc;
    }
  }
  auto draw_word = [&](int cluster) {
    const auto& row = cdf[static_cast<std::size_t>(cluster)];
    const double u = rng.uniform01() * row.back();
    const auto it = std::upper_bound(row.begin(), row.end(), u);
    return std::min(static_cast<int>(it - row.begin()), V - 1);
  };

  const std::vector<double> gamma_conc(static_cast<std::size_t>(L), hp.gamma);
  Epoch epoch;
  epoch.session_label = "1";
  for (int d = 0; d < docs; ++d) {
    const std::vector<double> pi =
        planted_pi != nullptr ? *planted_pi : rng.dirichlet(gamma_conc);
    std::vector<double> theta(static_cast<std::size_t>(L) * T);
    for (int l = 0; l < L; ++l) {
      std::vector<double> conc(static_cast<std::size_t>(T), hp.initial_alpha());
      const std::vector<double> row = rng.dirichlet(conc);
      std::copy(row.begin(), row.end(), theta.begin() + static_cast<long>(l) * T);
    }
    Document doc;
    doc.doc_id = "synth_d" + std::to_string(d);
    doc.epoch = 0;
    std::vector<int> labs, tops;
    labs.reserve(static_cast<std::size_t>(doc_len));
    tops.reserve(static_cast<std::size_t>(doc_len));
    for (int n = 0; n < doc_len; ++n) {
      const int l = rng.categorical(pi);
      std::vector<double> theta_row(theta.begin() + static_cast<long>(l) * T,
                                    theta.begin() + static_cast<long>(l + 1) * T);
      const int z = rng.categorical(theta_row);
      doc.tokens.push_back(draw_word(l * T + z));
      labs.push_back(l);
      tops.push_back(z);
    }
    epoch.docs.push_back(std::move(doc));
    result.truth.pi.push_back(pi);
    result.truth.theta.push_back(std::move(theta));
    result.truth.lab.push_back(std::move(labs));
    result.truth.top.push_back(std::move(tops));
  }
  result.stream.epochs.push_back(std::move(epoch));
  return result;
}

// Block-structured planted distributions: cluster c concentrates mass `peak`
// uniformly on its own stripe of the vocabulary, the remainder spread over
// all words. Stripes are disjoint, so pairwise cosine similarity stays low.
inline std::vector<double> make_block_phi(int labels, int topics, int vocab, double peak = 0.9) {
  const int clusters = labels * topics;
  if (vocab < clusters) throw ValidationError("vocabulary too small for one stripe per cluster");
  const int stripe = vocab / clusters;
  std::vector<double> phi(static_cast<std::size_t>(clusters) * vocab,
                          (1.0 - peak) / vocab);
  for (int c = 0; c < clusters; ++c) {
    const int lo = c * stripe;
    const int hi = (c + 1 == clusters) ? vocab : lo + stripe;
    for (int w = lo; w < hi; ++w) {
      phi[static_cast<std::size_t>(c) * vocab + w] += peak / (hi - lo);
    }
  }
  return phi;
}

}  // namespace djst
