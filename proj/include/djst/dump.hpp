#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "djst/errors.hpp"
#include "djst/model.hpp"
#include "djst/snapshot.hpp"

namespace djst {

// Posterior dump: one text file covering every epoch of a run. Written with
// full-precision decimals so a rerun under the same seed is byte-identical.
inline void save_posterior_dump(const std::string& path, const std::vector<EpochOutcome>& outcomes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write posterior dump: " + path);
  out << "djst-posterior 1\n";
  out << "epochs " << outcomes.size() << "\n";
  for (const EpochOutcome& eo : outcomes) {
    const Posterior& post = eo.posterior;
    out << "epoch " << eo.epoch_index << " " << eo.session_label << " " << post.docs << " "
        << eo.token_count << " " << (eo.has_data ? 1 : 0) << " " << post.labels << " "
        << post.topics << " " << post.vocab << "\n";
    for (int l = 0; l < post.labels; ++l) {
      for (int z = 0; z < post.topics; ++z) {
        out << "phi " << l << " " << z;
        for (int w = 0; w < post.vocab; ++w) out << ' ' << detail::fmt_double(post.phi_at(l, z, w));
        out << "\n";
      }
    }
    for (int d = 0; d < post.docs; ++d) {
      out << "theta " << d;
      for (int l = 0; l < post.labels; ++l)
        for (int z = 0; z < post.topics; ++z) out << ' ' << detail::fmt_double(post.theta_at(d, l, z));
      out << "\n";
    }
    for (int d = 0; d < post.docs; ++d) {
      out << "pi " << d;
      for (int l = 0; l < post.labels; ++l) out << ' ' << detail::fmt_double(post.pi_at(d, l));
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<EpochOutcome> load_posterior_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read posterior dump: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "djst-posterior" || version != 1)
    throw ValidationError("unrecognized posterior dump header in " + path);
  detail::expect(in, "epochs");
  std::size_t epochs = 0;
  in >> epochs;
  std::vector<EpochOutcome> outcomes(epochs);
  for (std::size_t t = 0; t < epochs; ++t) {
    EpochOutcome& eo = outcomes[t];
    Posterior& post = eo.posterior;
    int has_data = 0;
    detail::expect(in, "epoch");
    in >> eo.epoch_index >> eo.session_label >> post.docs >> eo.token_count >> has_data >>
        post.labels >> post.topics >> post.vocab;
    eo.has_data = has_data != 0;
    post.phi.resize(static_cast<std::size_t>(post.clusters()) * post.vocab);
    for (int c = 0; c < post.clusters(); ++c) {
      detail::expect(in, "phi");
      int l = 0, z = 0;
      in >> l >> z;
      const std::vector<double> row = detail::read_doubles(in, static_cast<std::size_t>(post.vocab));
      std::copy(row.begin(), row.end(),
                post.phi.begin() + (static_cast<long>(l) * post.topics + z) * post.vocab);
    }
    post.theta.resize(static_cast<std::size_t>(post.docs) * post.clusters());
    for (int i = 0; i < post.docs; ++i) {
      detail::expect(in, "theta");
      int d = 0;
      in >> d;
      const std::vector<double> row =
          detail::read_doubles(in, static_cast<std::size_t>(post.clusters()));
      std::copy(row.begin(), row.end(), post.theta.begin() + static_cast<long>(d) * post.clusters());
    }
    post.pi.resize(static_cast<std::size_t>(post.docs) * post.labels);
    for (int i = 0; i < post.docs; ++i) {
      detail::expect(in, "pi");
      int d = 0;
      in >> d;
      const std::vector<double> row = detail::read_doubles(in, static_cast<std::size_t>(post.labels));
      std::copy(row.begin(), row.end(), post.pi.begin() + static_cast<long>(d) * post.labels);
    }
  }
  detail::expect(in, "end");
  return outcomes;
}

}  // namespace djst
