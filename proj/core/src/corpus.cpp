#include "qaaug/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

using json = nlohmann::json;

namespace {

constexpr char kIndexMagic[8] = {'Q', 'A', 'A', 'U', 'G', 'I', 'D', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

std::uint64_t get_uint(std::istream& in, int bytes) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), bytes)) throw ParseError("index file truncated");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_uint(in, 8);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string CorpusDocument::body() const {
  if (title.empty()) return abstract;
  if (abstract.empty()) return title;
  return title + " " + abstract;
}

std::vector<CorpusDocument> parse_corpus_text(std::string_view text) {
  std::vector<CorpusDocument> docs;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " + e.what(), line_no, e.byte);
    }
    auto str = [&](const char* name) {
      auto it = j.find(name);
      if (it == j.end() || !it->is_string()) {
        throw ParseError("corpus line " + std::to_string(line_no) + ": missing string field '" + name + "'",
                         line_no);
      }
      return it->get<std::string>();
    };
    if (!j.is_object()) throw ParseError("corpus line " + std::to_string(line_no) + ": not an object", line_no);
    docs.push_back({str("doc_id"), str("title"), str("abstract")});
  }
  return docs;
}

std::vector<CorpusDocument> parse_corpus(const std::filesystem::path& path) {
  return parse_corpus_text(read_file(path, "corpus"));
}

Bm25Index::Bm25Index(const std::vector<CorpusDocument>& documents, Bm25Params params) : params_(params) {
  doc_lengths_.reserve(documents.size());
  std::uint64_t total = 0;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const auto body = to_u32(documents[d].body());
    const auto terms = index_terms(body);
    doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    total += terms.size();
    std::unordered_map<std::string, std::uint32_t> tf;
    for (const auto& t : terms) ++tf[to_utf8(t)];
    for (auto& [term, count] : tf) postings_[term].push_back({static_cast<std::uint32_t>(d), count});
  }
  avg_length_ = documents.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(documents.size());
}

std::vector<SearchHit> Bm25Index::search(std::string_view query, std::size_t top_k,
                                         const std::vector<CorpusDocument>& documents) const {
  std::vector<SearchHit> hits;
  if (top_k == 0 || doc_lengths_.empty()) return hits;

  // Each distinct query term counts once.
  std::set<std::string> terms;
  for (const auto& t : index_terms(to_u32(query))) terms.insert(to_utf8(t));
  if (terms.empty()) return hits;

  const double n = static_cast<double>(doc_lengths_.size());
  std::unordered_map<std::uint32_t, double> scores;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& p : it->second) {
      const double tf = p.tf;
      const double norm = 1.0 - params_.b + params_.b * doc_lengths_[p.doc] / avg_length_;
      scores[p.doc] += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
    }
  }
  hits.reserve(scores.size());
  for (const auto& [doc, score] : scores) hits.push_back({documents.at(doc).doc_id, score});
  auto better = [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  if (hits.size() > top_k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top_k), hits.end(), better);
    hits.resize(top_k);
  } else {
    std::sort(hits.begin(), hits.end(), better);
  }
  return hits;
}

void Bm25Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write index '" + path.string() + "'");
  out.write(kIndexMagic, sizeof kIndexMagic);
  put_u32(out, kIndexVersion);
  put_f64(out, params_.k1);
  put_f64(out, params_.b);
  put_u64(out, doc_lengths_.size());
  for (auto len : doc_lengths_) put_u32(out, len);
  // Sorted terms keep the file byte-stable across runs.
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, list] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return *a < *b; });
  put_u64(out, terms.size());
  for (const auto* term : terms) {
    put_u32(out, static_cast<std::uint32_t>(term->size()));
    out.write(term->data(), static_cast<std::streamsize>(term->size()));
    const auto& list = postings_.at(*term);
    put_u64(out, list.size());
    for (const auto& p : list) {
      put_u32(out, p.doc);
      put_u32(out, p.tf);
    }
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index '" + path.string() + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kIndexMagic, 8) != 0) {
    throw ParseError("'" + path.string() + "' is not a qaaug index");
  }
  const auto version = get_uint(in, 4);
  if (version != kIndexVersion) {
    throw ParseError("unsupported index version " + std::to_string(version) + " in '" + path.string() + "'");
  }
  Bm25Index index;
  index.params_.k1 = get_f64(in);
  index.params_.b = get_f64(in);
  const auto n_docs = get_uint(in, 8);
  std::uint64_t total = 0;
  index.doc_lengths_.resize(n_docs);
  for (auto& len : index.doc_lengths_) {
    len = static_cast<std::uint32_t>(get_uint(in, 4));
    total += len;
  }
  index.avg_length_ = n_docs == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n_docs);
  const auto n_terms = get_uint(in, 8);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    const auto len = get_uint(in, 4);
    std::string term(len, '\0');
    if (!in.read(term.data(), static_cast<std::streamsize>(len))) throw ParseError("index file truncated");
    const auto count = get_uint(in, 8);
    auto& list = index.postings_[term];
    list.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto doc = static_cast<std::uint32_t>(get_uint(in, 4));
      const auto tf = static_cast<std::uint32_t>(get_uint(in, 4));
      if (doc >= n_docs) throw ParseError("index posting refers to document " + std::to_string(doc));
      list.push_back({doc, tf});
    }
  }
  return index;
}

CorpusStore::CorpusStore(SentenceSegmenter segmenter, Bm25Params params)
    : segmenter_(std::move(segmenter)),
      params_(params),
      index_(documents_, params_),
      cache_mutex_(std::make_unique<std::shared_mutex>()) {}

CorpusStore::CorpusStore(CorpusStore&&) noexcept = default;
CorpusStore& CorpusStore::operator=(CorpusStore&&) noexcept = default;
CorpusStore::~CorpusStore() = default;

void CorpusStore::ingest(const std::vector<CorpusDocument>& records) {
  std::unordered_set<std::string_view> batch;
  for (const auto& doc : records) {
    if (!batch.insert(doc.doc_id).second) throw ValidationError("duplicate doc_id '" + doc.doc_id + "' in input");
    auto it = by_id_.find(doc.doc_id);
    if (it != by_id_.end() && !(documents_[it->second] == doc)) {
      throw ValidationError("doc_id '" + doc.doc_id + "' already ingested with different content");
    }
  }
  for (const auto& doc : records) {
    if (by_id_.contains(doc.doc_id)) continue;
    by_id_.emplace(doc.doc_id, documents_.size());
    documents_.push_back(doc);
    index_stale_ = true;
  }
}

std::size_t CorpusStore::index_of(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  if (it == by_id_.end()) throw NotFoundError("unknown document '" + std::string(doc_id) + "'");
  return it->second;
}

const CorpusDocument& CorpusStore::get_document(std::string_view doc_id) const {
  return documents_[index_of(doc_id)];
}

const std::vector<Sentence>& CorpusStore::get_sentences(std::string_view doc_id) const {
  return sentences_at(index_of(doc_id));
}

const std::vector<Sentence>& CorpusStore::sentences_at(std::size_t doc_index) const {
  {
    std::shared_lock lock(*cache_mutex_);
    auto it = sentence_cache_.find(doc_index);
    if (it != sentence_cache_.end()) return it->second;
  }
  const auto& doc = documents_.at(doc_index);
  auto sentences = segmenter_.segment(doc.body(), doc.doc_id);
  std::unique_lock lock(*cache_mutex_);
  return sentence_cache_.try_emplace(doc_index, std::move(sentences)).first->second;
}

void CorpusStore::build_index() {
  index_ = Bm25Index(documents_, params_);
  index_stale_ = false;
}

std::vector<SearchHit> CorpusStore::bm25_search(std::string_view query, std::size_t top_k) const {
  if (index_stale_) throw Error("corpus index is stale; call build_index() after ingest");
  return index_.search(query, top_k, documents_);
}

void CorpusStore::save(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create store directory '" + dir.string() + "': " + ec.message());
  {
    std::ofstream out(dir / "documents.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + (dir / "documents.jsonl").string() + "'");
    for (const auto& doc : documents_) {
      nlohmann::ordered_json j;
      j["doc_id"] = doc.doc_id;
      j["title"] = doc.title;
      j["abstract"] = doc.abstract;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "abbreviations.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + (dir / "abbreviations.txt").string() + "'");
    out << "# sentence guard list, version " << SentenceSegmenter::kVersion << '\n';
    for (const auto& a : segmenter_.abbreviations()) out << a << '\n';
  }
  if (!index_stale_) {
    index_.save(dir / "index.bin");
  } else {
    std::filesystem::remove(dir / "index.bin", ec);
  }
}

CorpusStore CorpusStore::open(const std::filesystem::path& dir, std::optional<SentenceSegmenter> segmenter) {
  if (!std::filesystem::exists(dir / "documents.jsonl")) {
    throw IoError("'" + dir.string() + "' is not a corpus store (no documents.jsonl)");
  }
  if (!segmenter) {
    const auto list = dir / "abbreviations.txt";
    segmenter = std::filesystem::exists(list) ? SentenceSegmenter::from_file(list) : SentenceSegmenter();
  }
  auto docs = parse_corpus(dir / "documents.jsonl");
  CorpusStore store(std::move(*segmenter));
  store.ingest(docs);
  const auto index_path = dir / "index.bin";
  if (std::filesystem::exists(index_path)) {
    auto index = Bm25Index::load(index_path);
    if (index.document_count() != store.size()) {
      throw ParseError("index in '" + dir.string() + "' covers " + std::to_string(index.document_count()) +
                       " documents but the log has " + std::to_string(store.size()));
    }
    store.params_ = index.params();
    store.index_ = std::move(index);
    store.index_stale_ = false;
  } else {
    store.index_stale_ = store.size() > 0;
  }
  return store;
}

}  // namespace qaaug
