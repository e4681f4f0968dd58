#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "djst/corpus.hpp"
#include "djst/errors.hpp"
#include "djst/model.hpp"
#include "djst/sampler.hpp"

namespace djst {

inline constexpr const char* kNoData = "no data";

// One session's point on the sentiment trend.
struct TrendPoint {
  std::string session_label;
  std::vector<double> p_by_label;  // empty when dominant == "no data"
  std::string dominant;            // "P", "N", or "no data"
  long token_count = 0;
};

struct TopicSummary {
  int label = 0;
  int topic = 0;
  std::vector<std::pair<std::string, double>> top_words;
};

struct SessionMatch {
  std::string session_label;
  std::string model_label;
  std::string expert_label;
  bool match = false;
};

struct ExpertComparison {
  std::vector<SessionMatch> per_session;
  int matches = 0;
  int compared = 0;
  double accuracy = 0.0;
};

// Token-count-weighted average of the per-document sentiment distributions.
inline std::vector<double> aggregate_epoch_sentiment(const Posterior& post, const Epoch& epoch) {
  if (epoch.docs.empty() || epoch.token_count() == 0) throw NoData();
  if (post.docs != static_cast<int>(epoch.docs.size()))
    throw ValidationError("posterior and epoch disagree on document count");
  std::vector<double> p(static_cast<std::size_t>(post.labels), 0.0);
  double total = 0.0;
  for (int d = 0; d < post.docs; ++d) {
    const double weight = static_cast<double>(epoch.docs[static_cast<std::size_t>(d)].tokens.size());
    for (int l = 0; l < post.labels; ++l) p[static_cast<std::size_t>(l)] += weight * post.pi_at(d, l);
    total += weight;
  }
  for (double& v : p) v /= total;
  return p;
}

// Argmax label name; an exact tie goes to negative so a stalled case is
// flagged rather than missed.
inline std::string dominant_label(const std::vector<double>& p_by_label) {
  if (p_by_label.size() != 2) throw ValidationError("dominant_label expects two sentiment labels");
  return p_by_label[kPositive] > p_by_label[kNegative] ? "P" : "N";
}

// k highest-probability terms for one cluster, ties broken by vocabulary id.
inline TopicSummary top_words(const Posterior& post, int label, int topic, const Vocabulary& vocab,
                              int k) {
  TopicSummary summary;
  summary.label = label;
  summary.topic = topic;
  std::vector<int> order(static_cast<std::size_t>(post.vocab));
  for (int w = 0; w < post.vocab; ++w) order[static_cast<std::size_t>(w)] = w;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = post.phi_at(label, topic, a), pb = post.phi_at(label, topic, b);
    if (pa != pb) return pa > pb;
    return a < b;
  });
  const int take = std::min(k, post.vocab);
  for (int i = 0; i < take; ++i) {
    const int w = order[static_cast<std::size_t>(i)];
    summary.top_words.emplace_back(vocab.term(w), post.phi_at(label, topic, w));
  }
  return summary;
}

// Sequences are (session_label, label) pairs aligned by session label; "-",
// "", and "no data" all mean missing. Accuracy counts only sessions carrying
// both labels.
inline ExpertComparison compare_to_expert(
    const std::vector<std::pair<std::string, std::string>>& model_sequence,
    const std::vector<std::pair<std::string, std::string>>& expert_sequence) {
  auto missing = [](const std::string& label) {
    return label.empty() || label == "-" || label == kNoData;
  };
  ExpertComparison cmp;
  for (const auto& [session, model_label] : model_sequence) {
    std::string expert_label = "-";
    for (const auto& [other, label] : expert_sequence) {
      if (other == session) {
        expert_label = label;
        break;
      }
    }
    SessionMatch match{session, missing(model_label) ? "-" : model_label,
                       missing(expert_label) ? "-" : expert_label, false};
    if (!missing(model_label) && !missing(expert_label)) {
      match.match = model_label == expert_label;
      ++cmp.compared;
      if (match.match) ++cmp.matches;
    }
    cmp.per_session.push_back(std::move(match));
  }
  if (cmp.compared == 0) throw NothingComparable();
  cmp.accuracy = static_cast<double>(cmp.matches) / cmp.compared;
  return cmp;
}

inline std::vector<TrendPoint> build_trend(const std::vector<EpochOutcome>& outcomes,
                                           const EpochStream& stream) {
  std::vector<TrendPoint> trend;
  for (const EpochOutcome& eo : outcomes) {
    if (eo.epoch_index < 0 || eo.epoch_index >= static_cast<int>(stream.epochs.size()))
      throw ValidationError("epoch index out of range for this corpus");
    const Epoch& epoch = stream.epochs[static_cast<std::size_t>(eo.epoch_index)];
    TrendPoint point;
    point.session_label = eo.session_label;
    point.token_count = eo.token_count;
    if (!eo.has_data) {
      point.dominant = kNoData;
    } else {
      point.p_by_label = aggregate_epoch_sentiment(eo.posterior, epoch);
      point.dominant = dominant_label(point.p_by_label);
    }
    trend.push_back(std::move(point));
  }
  return trend;
}

inline void emit_trend_csv(const std::vector<TrendPoint>& trend, std::ostream& out) {
  out << "session,p_positive,p_negative,dominant,tokens\n";
  char buf[64];
  for (const TrendPoint& point : trend) {
    if (point.dominant == kNoData) {
      out << point.session_label << ",,," << kNoData << "," << point.token_count << "\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", point.p_by_label[kPositive],
                    point.p_by_label[kNegative]);
      out << point.session_label << "," << buf << "," << point.dominant << ","
          << point.token_count << "\n";
    }
  }
}

inline void emit_trend_csv(const std::vector<TrendPoint>& trend, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trend csv: " + path);
  emit_trend_csv(trend, out);
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<TrendPoint> load_trend_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trend csv: " + path);
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("session,"))
    throw ValidationError("trend csv missing header: " + path);
  std::vector<TrendPoint> trend;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    while (cells.size() < 5) cells.emplace_back();
    TrendPoint point;
    point.session_label = cells[0];
    point.dominant = cells[3];
    point.token_count = cells[4].empty() ? 0 : std::stol(cells[4]);
    if (point.dominant != kNoData && !cells[1].empty() && !cells[2].empty()) {
      point.p_by_label = {std::stod(cells[1]), std::stod(cells[2])};
    }
    trend.push_back(std::move(point));
  }
  return trend;
}

// Expert labels: CSV `session,label` with N/P entries; '-' marks a session
// the expert did not rate.
inline std::vector<std::pair<std::string, std::string>> load_expert_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read expert csv: " + path);
  std::vector<std::pair<std::string, std::string>> labels;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.starts_with("session")) {
      first = false;
      continue;
    }
    first = false;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("malformed expert label line: " + line);
    std::string label = line.substr(comma + 1);
    while (!label.empty() && (label.back() == '\r' || label.back() == ' ')) label.pop_back();
    if (!label.empty() && label != "-" && label != "N" && label != "P")
      throw ValidationError("expert label must be N, P, or -: " + line);
    labels.emplace_back(line.substr(0, comma), label);
  }
  return labels;
}

inline std::vector<std::pair<std::string, std::string>> trend_label_sequence(
    const std::vector<TrendPoint>& trend) {
  std::vector<std::pair<std::string, std::string>> seq;
  seq.reserve(trend.size());
  for (const TrendPoint& point : trend) seq.emplace_back(point.session_label, point.dominant);
  return seq;
}

inline nlohmann::json topics_to_json(const std::vector<TopicSummary>& summaries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TopicSummary& s : summaries) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& [term, p] : s.top_words) words.push_back({{"term", term}, {"p", p}});
    arr.push_back({{"sentiment", s.label == kPositive ? "positive" : "negative"},
                   {"topic", s.topic},
                   {"words", std::move(words)}});
  }
  return arr;
}

}  // namespace djst
