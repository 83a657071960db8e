#include "qaaug/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qaaug/errors.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

namespace {

struct Header {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::size_t consumed = 0;
};

Header parse_header(std::string_view data) {
  const auto nl = data.find('\n');
  if (nl == std::string_view::npos) throw ParseError("embedding file has no header line", 1, 0);
  std::istringstream in{std::string(data.substr(0, nl))};
  Header h;
  long long count = -1;
  long long dim = -1;
  if (!(in >> count >> dim) || count < 0 || dim <= 0) {
    throw ParseError("embedding header must be 'count dim'", 1, 0);
  }
  h.count = static_cast<std::size_t>(count);
  h.dim = static_cast<std::size_t>(dim);
  h.consumed = nl + 1;
  return h;
}

bool parse_float(std::string_view s, float& out) {
  // from_chars for float is missing on some toolchains; strtof needs a terminator.
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtof(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && !tmp.empty();
}

}  // namespace

EmbeddingFormat embedding_format_from_string(std::string_view name) {
  if (name == "word2vec_text" || name == "text") return EmbeddingFormat::word2vec_text;
  if (name == "word2vec_binary" || name == "binary") return EmbeddingFormat::word2vec_binary;
  throw ArgumentError("unknown embedding format '" + std::string(name) + "'");
}

EmbeddingTable::EmbeddingTable(const std::vector<std::string>& words, const std::vector<float>& vectors,
                               std::size_t dim)
    : dim_(dim) {
  if (dim == 0) throw ArgumentError("embedding dimension must be positive");
  if (vectors.size() != words.size() * dim) throw ArgumentError("embedding matrix does not match vocabulary size");
  for (std::size_t r = 0; r < words.size(); ++r) {
    if (index_.contains(words[r])) {
      ++duplicates_;
      continue;
    }
    const float* row = vectors.data() + r * dim;
    double norm = 0.0;
    for (std::size_t k = 0; k < dim; ++k) norm += static_cast<double>(row[k]) * row[k];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ParseError("embedding for '" + words[r] + "' has zero or non-finite norm", r + 2);
    }
    index_.emplace(words[r], words_.size());
    words_.push_back(words[r]);
    for (std::size_t k = 0; k < dim; ++k) vectors_.push_back(static_cast<float>(row[k] / norm));
  }
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable parse_embeddings_text(std::string_view text) {
  const Header h = parse_header(text);
  std::vector<std::string> words;
  std::vector<float> vectors;
  words.reserve(h.count);
  vectors.reserve(h.count * h.dim);
  std::size_t pos = h.consumed;
  std::size_t line_no = 1;
  while (pos < text.size() && words.size() < h.count) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    const std::size_t line_offset = pos;
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    if (fields.size() != h.dim + 1) {
      throw ParseError("embedding line " + std::to_string(line_no) + " has " + std::to_string(fields.size() - 1) +
                           " values, expected " + std::to_string(h.dim),
                       line_no, line_offset);
    }
    words.emplace_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      float v;
      if (!parse_float(fields[k], v)) {
        throw ParseError("embedding line " + std::to_string(line_no) + ": bad number '" + std::string(fields[k]) + "'",
                         line_no, line_offset);
      }
      vectors.push_back(v);
    }
  }
  if (words.size() != h.count) {
    throw ParseError("embedding header promises " + std::to_string(h.count) + " rows, found " +
                         std::to_string(words.size()),
                     line_no, text.size());
  }
  return EmbeddingTable(words, vectors, h.dim);
}

EmbeddingTable parse_embeddings_binary(std::string_view bytes) {
  const Header h = parse_header(bytes);
  std::vector<std::string> words;
  std::vector<float> vectors;
  words.reserve(h.count);
  vectors.reserve(h.count * h.dim);
  std::size_t pos = h.consumed;
  for (std::size_t r = 0; r < h.count; ++r) {
    while (pos < bytes.size() && (bytes[pos] == '\n' || bytes[pos] == '\r')) ++pos;
    const std::size_t space = bytes.find(' ', pos);
    if (space == std::string_view::npos || space == pos) {
      throw ParseError("binary embedding row " + std::to_string(r) + ": missing word", r + 2, pos);
    }
    words.emplace_back(bytes.substr(pos, space - pos));
    pos = space + 1;
    if (pos + 4 * h.dim > bytes.size()) {
      throw ParseError("binary embedding row " + std::to_string(r) + ": truncated vector", r + 2, pos);
    }
    for (std::size_t k = 0; k < h.dim; ++k) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[pos + b]);
      float v;
      std::memcpy(&v, &bits, sizeof v);
      vectors.push_back(v);
      pos += 4;
    }
  }
  return EmbeddingTable(words, vectors, h.dim);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();
  return format == EmbeddingFormat::word2vec_text ? parse_embeddings_text(data) : parse_embeddings_binary(data);
}

std::vector<std::pair<std::string, double>> neighbors(std::string_view token, const EmbeddingTable& table,
                                                      std::size_t K, double C) {
  std::vector<std::pair<std::string, double>> out;
  const auto row = table.find(token);
  if (!row || K == 0) return out;
  const auto query = table.vector(*row);
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (r == *row) continue;
    const auto v = table.vector(r);
    double dot = 0.0;
    for (std::size_t k = 0; k < query.size(); ++k) dot += static_cast<double>(query[k]) * v[k];
    if (dot >= C) out.emplace_back(table.word(r), dot);
  }
  auto better = [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; };
  if (out.size() > K) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(K), out.end(), better);
    out.resize(K);
  } else {
    std::sort(out.begin(), out.end(), better);
  }
  return out;
}

}  // namespace qaaug
