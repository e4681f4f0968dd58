#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "djst/errors.hpp"

namespace djst {

using StopwordSet = std::unordered_set<std::string>;

// Dense term<->id map. Ids are assigned in first-occurrence order, so a
// rebuild over identical input reproduces identical ids.
class Vocabulary {
 public:
  int add(const std::string& term) {
    auto it = term_to_id_.find(term);
    if (it != term_to_id_.end()) return it->second;
    const int id = static_cast<int>(id_to_term_.size());
    id_to_term_.push_back(term);
    term_to_id_.emplace(term, id);
    return id;
  }

  // -1 when the term is unknown.
  int find(const std::string& term) const {
    auto it = term_to_id_.find(term);
    return it == term_to_id_.end() ? -1 : it->second;
  }

  int size() const { return static_cast<int>(id_to_term_.size()); }
  const std::string& term(int id) const { return id_to_term_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& terms() const { return id_to_term_; }

 private:
  std::vector<std::string> id_to_term_;
  std::unordered_map<std::string, int> term_to_id_;
};

struct Document {
  std::string doc_id;
  int epoch = 0;
  std::vector<int> tokens;
};

struct Epoch {
  std::string session_label;
  std::vector<Document> docs;

  long token_count() const {
    long n = 0;
    for (const auto& d : docs) n += static_cast<long>(d.tokens.size());
    return n;
  }
};

// Ordered stream of epochs (one per session). Epoch indices are the positions
// in this vector; skipped sessions simply never appear, so indices stay
// contiguous while the original session labels are preserved.
struct EpochStream {
  std::vector<Epoch> epochs;

  long total_tokens() const {
    long n = 0;
    for (const auto& e : epochs) n += e.token_count();
    return n;
  }
};

// Lowercase, split on every non-alphanumeric byte, drop stopwords.
// Surviving token order is preserved.
inline std::vector<std::string> tokenize(std::string_view raw, const StopwordSet& stopwords) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      if (!stopwords.count(current)) out.push_back(current);
      current.clear();
    }
  };
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

inline StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read stopword file: " + path);
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    for (const std::string& tok : tokenize(line, {})) words.insert(tok);
  }
  return words;
}

inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents) {
  Vocabulary vocab;
  for (const auto& doc : documents) {
    for (const auto& tok : doc) vocab.add(tok);
  }
  return vocab;
}

struct SessionText {
  std::string label;
  std::string text;
};

struct IngestResult {
  Vocabulary vocab;
  EpochStream stream;
  std::vector<std::string> warnings;
};

namespace detail {

// Therapist turns are marked "T:" and dropped; "C:" prefixes are stripped;
// unprefixed lines are kept as client speech.
inline std::string keep_client_lines(const std::string& text) {
  std::istringstream in(text);
  std::string kept;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    std::string_view body(line.data() + start, line.size() - start);
    if (body.starts_with("T:")) continue;
    if (body.starts_with("C:")) body.remove_prefix(2);
    kept.append(body);
    kept.push_back('\n');
  }
  return kept;
}

}  // namespace detail

// One epoch per session, in input order. Each session is cut into documents
// of at most chunk_tokens tokens (0 keeps the whole session as one document).
// The vocabulary is global over all epochs.
inline IngestResult ingest(const std::vector<SessionText>& sessions,
                           const StopwordSet& stopwords,
                           int chunk_tokens = 1000) {
  if (chunk_tokens < 0) throw ValidationError("chunk_tokens must be >= 0");
  IngestResult result;
  bool any_tokens = false;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const auto& session = sessions[s];
    Epoch epoch;
    epoch.session_label = session.label;
    const std::vector<std::string> tokens =
        tokenize(detail::keep_client_lines(session.text), stopwords);
    if (tokens.empty()) {
      result.warnings.push_back("session " + session.label + " preprocessed to zero tokens");
    } else {
      any_tokens = true;
      std::vector<int> ids;
      ids.reserve(tokens.size());
      for (const auto& tok : tokens) ids.push_back(result.vocab.add(tok));

      const std::size_t chunk =
          chunk_tokens == 0 ? ids.size() : static_cast<std::size_t>(chunk_tokens);
      int piece = 0;
      for (std::size_t off = 0; off < ids.size(); off += chunk, ++piece) {
        Document doc;
        doc.doc_id = "s" + session.label + "_c" + std::to_string(piece);
        doc.epoch = static_cast<int>(s);
        const std::size_t end = std::min(off + chunk, ids.size());
        doc.tokens.assign(ids.begin() + static_cast<long>(off), ids.begin() + static_cast<long>(end));
        epoch.docs.push_back(std::move(doc));
      }
    }
    result.stream.epochs.push_back(std::move(epoch));
  }
  if (!sessions.empty() && !any_tokens) throw AllSessionsEmpty();
  return result;
}

// Reads session_<NN>.txt files from a client directory, lexicographic order.
inline std::vector<SessionText> read_session_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a readable directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.starts_with("session_") && name.ends_with(".txt")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SessionText> sessions;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    std::string label = name.substr(8, name.size() - 12);
    if (!label.empty() && std::all_of(label.begin(), label.end(),
                                      [](unsigned char c) { return std::isdigit(c); })) {
      const std::size_t first = label.find_first_not_of('0');
      label = first == std::string::npos ? "0" : label.substr(first);
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot read session file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    sessions.push_back({label, buffer.str()});
  }
  return sessions;
}

// Corpus snapshot: `V <size>` header, one `term<TAB>id` line per entry, then
// per epoch an `EPOCH <index> <label>` line followed by `DOC` blocks. The
// EPOCH line keeps zero-document epochs (skipped sessions) alive across a
// save/load round trip.
inline void save_corpus_snapshot(const std::string& path, const Vocabulary& vocab,
                                 const EpochStream& stream) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus snapshot: " + path);
  out << "V " << vocab.size() << "\n";
  for (int id = 0; id < vocab.size(); ++id) {
    out << vocab.term(id) << "\t" << id << "\n";
  }
  for (std::size_t t = 0; t < stream.epochs.size(); ++t) {
    const Epoch& epoch = stream.epochs[t];
    out << "EPOCH " << t << " " << epoch.session_label << "\n";
    for (const Document& doc : epoch.docs) {
      out << "DOC " << t << " " << doc.doc_id << " " << epoch.session_label << "\n";
      for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        if (i) out << ' ';
        out << doc.tokens[i];
      }
      out << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

inline std::pair<Vocabulary, EpochStream> load_corpus_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus snapshot: " + path);
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("V "))
    throw ValidationError("corpus snapshot missing V header: " + path);
  const int vocab_size = std::stoi(line.substr(2));
  Vocabulary vocab;
  for (int i = 0; i < vocab_size; ++i) {
    if (!std::getline(in, line)) throw ValidationError("corpus snapshot truncated in vocabulary");
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ValidationError("malformed vocabulary line: " + line);
    const std::string term = line.substr(0, tab);
    const int id = std::stoi(line.substr(tab + 1));
    if (vocab.add(term) != id) throw ValidationError("non-dense vocabulary ids in snapshot");
  }
  EpochStream stream;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "EPOCH") {
      int index = 0;
      std::string label;
      fields >> index >> label;
      if (index != static_cast<int>(stream.epochs.size()))
        throw ValidationError("epoch indices out of order in snapshot");
      stream.epochs.push_back(Epoch{label, {}});
    } else if (tag == "DOC") {
      int epoch_index = 0;
      Document doc;
      std::string label;
      fields >> epoch_index >> doc.doc_id >> label;
      while (static_cast<int>(stream.epochs.size()) <= epoch_index)
        stream.epochs.push_back(Epoch{label, {}});
      doc.epoch = epoch_index;
      if (!std::getline(in, line)) throw ValidationError("corpus snapshot truncated in document");
      std::istringstream toks(line);
      int id = 0;
      while (toks >> id) {
        if (id < 0 || id >= vocab.size())
          throw ValidationError("token id out of range in snapshot");
        doc.tokens.push_back(id);
      }
      stream.epochs[static_cast<std::size_t>(epoch_index)].docs.push_back(std::move(doc));
    } else {
      throw ValidationError("unexpected corpus snapshot line: " + line);
    }
  }
  return {std::move(vocab), std::move(stream)};
}

}  // namespace djst
