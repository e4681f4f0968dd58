#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "djst/errors.hpp"

namespace djst {

enum class MuScheme { uniform, decay };
enum class EstimatorMode { final_state, averaged };

// Model hyperparameters and sampler settings.
struct Hyperparams {
  int sentiment_labels = 2;  // L
  int topics = 5;            // T per sentiment label
  int window = 3;            // S, history slices feeding the evolved prior
  double gamma = 1.0;        // symmetric Dirichlet over per-document sentiment
  double alpha_init = 0.0;   // <=0 selects the 50/(L*T) heuristic
  double nu = 1.0;           // Gamma evolution rate, used when sample_alpha is on
  double beta_base = 0.01;   // symmetric word prior before the lexicon transform
  double kappa = 0.5;        // decay rate of the history weights
  int sweeps = 1000;
  int burn_in = 200;
  std::uint64_t seed = 42;
  MuScheme mu_scheme = MuScheme::decay;
  bool sample_alpha = false;         // draw alpha^{t+1} ~ Gamma(nu*alpha^t, nu) instead of carrying it
  bool reapply_lambda = false;       // re-multiply the lexicon transform into every evolved prior
  EstimatorMode estimator = EstimatorMode::final_state;

  double initial_alpha() const {
    return alpha_init > 0.0 ? alpha_init : 50.0 / (sentiment_labels * topics);
  }

  void validate() const {
    if (sentiment_labels < 2) throw ValidationError("sentiment_labels must be >= 2");
    if (topics < 1) throw ValidationError("topics must be >= 1");
    if (window < 1) throw ValidationError("window must be >= 1");
    if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
    if (!(nu > 0.0)) throw ValidationError("nu must be > 0");
    if (!(beta_base > 0.0)) throw ValidationError("beta_base must be > 0");
    if (!(initial_alpha() > 0.0)) throw ValidationError("alpha must be > 0");
    if (!std::isfinite(kappa)) throw ValidationError("kappa must be finite");
    if (sweeps < 1) throw ValidationError("sweeps must be >= 1");
    if (burn_in < 0 || burn_in >= sweeps) throw ValidationError("burn_in must satisfy 0 <= burn_in < sweeps");
  }

  int clusters() const { return sentiment_labels * topics; }
};

inline std::string to_string(MuScheme scheme) {
  return scheme == MuScheme::uniform ? "uniform" : "decay";
}

inline std::string to_string(EstimatorMode mode) {
  return mode == EstimatorMode::final_state ? "final" : "average";
}

inline MuScheme mu_scheme_from_string(const std::string& text) {
  if (text == "uniform") return MuScheme::uniform;
  if (text == "decay") return MuScheme::decay;
  throw ValidationError("unknown mu_scheme: " + text + " (expected uniform|decay)");
}

inline EstimatorMode estimator_from_string(const std::string& text) {
  if (text == "final") return EstimatorMode::final_state;
  if (text == "average") return EstimatorMode::averaged;
  throw ValidationError("unknown estimator: " + text + " (expected final|average)");
}

}  // namespace djst
