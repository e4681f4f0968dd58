#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "djst/errors.hpp"
#include "djst/hyper.hpp"
#include "djst/priors.hpp"

namespace djst {

namespace detail {

// 17 significant digits round-trip a double exactly.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_doubles(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << fmt_double(values[i]);
  }
}

inline std::vector<double> read_doubles(std::istream& in, std::size_t count) {
  std::vector<double> values(count);
  for (double& v : values) {
    if (!(in >> v)) throw ValidationError("model snapshot truncated while reading numbers");
  }
  return values;
}

inline void expect(std::istream& in, const std::string& tag) {
  std::string got;
  if (!(in >> got) || got != tag)
    throw ValidationError("model snapshot missing field '" + tag + "' (got '" + got + "')");
}

}  // namespace detail

// Everything needed to resume training after an epoch: hyperparameters, the
// evolved priors, the epoch's final assignments, and the generator state.
struct SnapshotData {
  int format_version = 1;
  int epoch_index = 0;
  std::string session_label;
  Hyperparams hyper;
  PriorState priors;
  std::vector<std::vector<int>> lab, top;
  std::string rng_state;
};

inline void save_model_snapshot(const std::string& path, const SnapshotData& snap) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model snapshot: " + path);
  const Hyperparams& hp = snap.hyper;
  const PriorState& ps = snap.priors;
  out << "djst-model " << snap.format_version << "\n";
  out << "epoch " << snap.epoch_index << "\n";
  out << "session " << snap.session_label << "\n";
  out << "dims " << ps.labels << " " << ps.topics << " " << ps.vocab << " " << ps.window << "\n";
  out << "hyper " << hp.sentiment_labels << " " << hp.topics << " " << hp.window << " "
      << detail::fmt_double(hp.gamma) << " " << detail::fmt_double(hp.alpha_init) << " "
      << detail::fmt_double(hp.nu) << " " << detail::fmt_double(hp.beta_base) << " "
      << detail::fmt_double(hp.kappa) << " " << hp.sweeps << " " << hp.burn_in << " " << hp.seed
      << " " << to_string(hp.mu_scheme) << " " << (hp.sample_alpha ? 1 : 0) << " "
      << (hp.reapply_lambda ? 1 : 0) << " " << to_string(hp.estimator) << "\n";
  out << "alpha ";
  detail::write_doubles(out, ps.alpha);
  out << "\n";
  for (int c = 0; c < ps.clusters(); ++c) {
    out << "beta " << c << " ";
    const auto begin = ps.beta.begin() + static_cast<long>(c) * ps.vocab;
    detail::write_doubles(out, std::vector<double>(begin, begin + ps.vocab));
    out << "\n";
  }
  for (int c = 0; c < ps.clusters(); ++c) {
    const auto& hist = ps.history[static_cast<std::size_t>(c)];
    out << "history " << c << " " << hist.size() << "\n";
    for (const auto& sigma : hist) {
      out << "sigma ";
      detail::write_doubles(out, sigma);
      out << "\n";
    }
  }
  out << "mu " << ps.mu.size();
  if (!ps.mu.empty()) {
    out << " ";
    detail::write_doubles(out, ps.mu);
  }
  out << "\n";
  out << "docs " << snap.lab.size() << "\n";
  for (std::size_t d = 0; d < snap.lab.size(); ++d) {
    out << "assign " << snap.lab[d].size();
    for (std::size_t n = 0; n < snap.lab[d].size(); ++n) {
      out << " " << snap.lab[d][n] << ":" << snap.top[d][n];
    }
    out << "\n";
  }
  out << "rng " << snap.rng_state << "\n";
  out << "end\n";
  if (!out) throw IoError("write failed: " + path);
}

inline SnapshotData load_model_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model snapshot: " + path);
  SnapshotData snap;
  std::string magic;
  in >> magic >> snap.format_version;
  if (magic != "djst-model" || snap.format_version != 1)
    throw ValidationError("unrecognized model snapshot header in " + path);
  detail::expect(in, "epoch");
  in >> snap.epoch_index;
  detail::expect(in, "session");
  in >> snap.session_label;

  PriorState& ps = snap.priors;
  detail::expect(in, "dims");
  in >> ps.labels >> ps.topics >> ps.vocab >> ps.window;

  Hyperparams& hp = snap.hyper;
  detail::expect(in, "hyper");
  std::string mu_scheme, estimator;
  int sample_alpha = 0, reapply = 0;
  in >> hp.sentiment_labels >> hp.topics >> hp.window >> hp.gamma >> hp.alpha_init >> hp.nu >>
      hp.beta_base >> hp.kappa >> hp.sweeps >> hp.burn_in >> hp.seed >> mu_scheme >>
      sample_alpha >> reapply >> estimator;
  hp.mu_scheme = mu_scheme_from_string(mu_scheme);
  hp.sample_alpha = sample_alpha != 0;
  hp.reapply_lambda = reapply != 0;
  hp.estimator = estimator_from_string(estimator);

  detail::expect(in, "alpha");
  ps.alpha = detail::read_doubles(in, static_cast<std::size_t>(ps.clusters()));
  ps.beta.resize(static_cast<std::size_t>(ps.clusters()) * ps.vocab);
  for (int i = 0; i < ps.clusters(); ++i) {
    detail::expect(in, "beta");
    int c = 0;
    in >> c;
    const std::vector<double> row = detail::read_doubles(in, static_cast<std::size_t>(ps.vocab));
    std::copy(row.begin(), row.end(), ps.beta.begin() + static_cast<long>(c) * ps.vocab);
  }
  ps.history.assign(static_cast<std::size_t>(ps.clusters()), {});
  for (int i = 0; i < ps.clusters(); ++i) {
    detail::expect(in, "history");
    int c = 0;
    std::size_t len = 0;
    in >> c >> len;
    for (std::size_t s = 0; s < len; ++s) {
      detail::expect(in, "sigma");
      ps.history[static_cast<std::size_t>(c)].push_back(
          detail::read_doubles(in, static_cast<std::size_t>(ps.vocab)));
    }
  }
  detail::expect(in, "mu");
  std::size_t mu_len = 0;
  in >> mu_len;
  ps.mu = detail::read_doubles(in, mu_len);
  ps.refresh_sums();

  detail::expect(in, "docs");
  std::size_t docs = 0;
  in >> docs;
  snap.lab.resize(docs);
  snap.top.resize(docs);
  for (std::size_t d = 0; d < docs; ++d) {
    detail::expect(in, "assign");
    std::size_t len = 0;
    in >> len;
    snap.lab[d].resize(len);
    snap.top[d].resize(len);
    for (std::size_t n = 0; n < len; ++n) {
      std::string pair;
      in >> pair;
      const std::size_t colon = pair.find(':');
      if (colon == std::string::npos) throw ValidationError("malformed assignment pair: " + pair);
      snap.lab[d][n] = std::stoi(pair.substr(0, colon));
      snap.top[d][n] = std::stoi(pair.substr(colon + 1));
    }
  }
  detail::expect(in, "rng");
  std::getline(in, snap.rng_state);
  if (!snap.rng_state.empty() && snap.rng_state.front() == ' ')
    snap.rng_state.erase(snap.rng_state.begin());
  std::string tail;
  if (!(in >> tail) || tail != "end") throw ValidationError("model snapshot missing end marker");
  return snap;
}

}  // namespace djst
