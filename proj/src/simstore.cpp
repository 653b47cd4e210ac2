#include "illustrate/simstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "illustrate/error.hpp"

namespace illustrate {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ImageBank

ImageBank::ImageBank(std::vector<ImageRecord> images) : images_(std::move(images)) {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (!index_.emplace(images_[i].id, i).second) {
      throw Error(ErrorKind::integrity, "duplicate image id '" + images_[i].id + "' in bank");
    }
  }
}

std::optional<std::size_t> ImageBank::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ImageBank parse_image_bank(const json& doc) {
  const json* arr = &doc;
  if (doc.is_object()) {
    auto it = doc.find("images");
    if (it == doc.end()) throw Error(ErrorKind::parse, "$.images: missing required field");
    arr = &*it;
  }
  if (!arr->is_array()) throw Error(ErrorKind::parse, "$.images: expected array");
  std::vector<ImageRecord> images;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const json& e = (*arr)[i];
    std::string path = "$.images[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("id") || !e["id"].is_string()) {
      throw Error(ErrorKind::parse, path + ".id: expected string");
    }
    ImageRecord r;
    r.id = e["id"].get<std::string>();
    std::string source = e.value("source", "openstax");
    if (source == "openstax") {
      r.source = ImageSource::openstax;
    } else if (source == "wikipedia") {
      r.source = ImageSource::wikipedia;
    } else {
      throw Error(ErrorKind::parse, path + ".source: unknown source '" + source + "'");
    }
    r.uri = e.value("uri", "");
    if (e.contains("caption") && e["caption"].is_string()) r.caption = e["caption"].get<std::string>();
    images.push_back(std::move(r));
  }
  return ImageBank(std::move(images));
}

ImageBank load_image_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open image bank '" + path + "'");
  try {
    return parse_image_bank(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// softmax

namespace {

template <typename T>
std::vector<double> softmax_impl(std::span<const T> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  double hi = -std::numeric_limits<double>::infinity();
  for (T v : logits) {
    if (!std::isfinite(static_cast<double>(v))) {
      throw Error(ErrorKind::numeric, "non-finite logit in softmax input");
    }
    hi = std::max(hi, static_cast<double>(v));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp(static_cast<double>(logits[j]) - hi);
    total += out[j];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

std::vector<double> row_softmax(std::span<const double> logits) { return softmax_impl(logits); }
std::vector<double> row_softmax(std::span<const float> logits) { return softmax_impl(logits); }

// ---------------------------------------------------------------------------
// SimMatrix

SimMatrix::SimMatrix(std::vector<std::string> phrase_ids, std::vector<std::string> image_ids,
                     std::vector<float> logits)
    : phrase_ids_(std::move(phrase_ids)),
      image_ids_(std::move(image_ids)),
      logits_(std::move(logits)) {
  if (logits_.size() != phrase_ids_.size() * image_ids_.size()) {
    throw Error(ErrorKind::dimension,
                "logit count " + std::to_string(logits_.size()) + " != " +
                    std::to_string(phrase_ids_.size()) + " phrases x " +
                    std::to_string(image_ids_.size()) + " images");
  }
  for (std::size_t i = 0; i < phrase_ids_.size(); ++i) {
    if (!phrase_index_.emplace(phrase_ids_[i], i).second) {
      throw Error(ErrorKind::integrity, "duplicate phrase id '" + phrase_ids_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < image_ids_.size(); ++i) {
    if (!image_index_.emplace(image_ids_[i], i).second) {
      throw Error(ErrorKind::integrity, "duplicate image id '" + image_ids_[i] + "'");
    }
  }
  probs_.resize(logits_.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    auto p = row_softmax(logit_row(r));
    std::copy(p.begin(), p.end(), probs_.begin() + static_cast<std::ptrdiff_t>(r * cols()));
  }
}

std::span<const float> SimMatrix::logit_row(std::size_t row) const {
  return std::span<const float>(logits_).subspan(row * cols(), cols());
}

std::span<const double> SimMatrix::prob_row(std::size_t row) const {
  return std::span<const double>(probs_).subspan(row * cols(), cols());
}

std::optional<std::size_t> SimMatrix::find_phrase(std::string_view id) const {
  auto it = phrase_index_.find(std::string(id));
  if (it == phrase_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> SimMatrix::find_image(std::string_view id) const {
  auto it = image_index_.find(std::string(id));
  if (it == image_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SimMatrix::phrase_row(std::string_view id) const {
  if (auto r = find_phrase(id)) return *r;
  throw Error(ErrorKind::lookup, "unknown phrase id '" + std::string(id) + "'");
}

std::size_t SimMatrix::image_col(std::string_view id) const {
  if (auto c = find_image(id)) return *c;
  throw Error(ErrorKind::lookup, "unknown image id '" + std::string(id) + "'");
}

double SimMatrix::sim(std::string_view image_id, std::string_view phrase_id) const {
  return prob(phrase_row(phrase_id), image_col(image_id));
}

// ---------------------------------------------------------------------------
// binary codec

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFu));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::dimension,
                  std::string("similarity file truncated while reading ") + what);
    }
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::dimension, std::string(what) + " exceeds 32-bit range");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_binary(const SimMatrix& m) {
  check_u32(m.rows(), "phrase count");
  check_u32(m.cols(), "image count");
  std::vector<std::uint8_t> out;
  out.reserve(16 + 4 * m.logits().size());
  out.insert(out.end(), std::begin(kSimMagic), std::end(kSimMagic));
  put_u32(out, kSimVersion);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (float v : m.logits()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (const auto* table : {&m.phrase_ids(), &m.image_ids()}) {
    for (const auto& id : *table) {
      check_u32(id.size(), "id length");
      put_u32(out, static_cast<std::uint32_t>(id.size()));
      out.insert(out.end(), id.begin(), id.end());
    }
  }
  return out;
}

SimMatrix decode_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kSimMagic, 4) != 0) {
    throw Error(ErrorKind::parse, "bad magic: not a SIMM similarity file");
  }
  ByteReader rd(bytes.subspan(4));
  std::uint32_t version = rd.u32("version");
  if (version != kSimVersion) {
    throw Error(ErrorKind::parse, "unsupported similarity file version " + std::to_string(version));
  }
  std::uint64_t n_phrases = rd.u32("phrase count");
  std::uint64_t n_images = rd.u32("image count");
  std::uint64_t cells = n_phrases * n_images;
  if (cells > rd.remaining() / 4) {
    throw Error(ErrorKind::dimension,
                "header declares " + std::to_string(n_phrases) + "x" + std::to_string(n_images) +
                    " logits but the file is too short");
  }
  std::vector<float> logits(cells);
  for (auto& v : logits) v = std::bit_cast<float>(rd.u32("logits"));
  auto read_table = [&](std::uint64_t n, const char* what) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint32_t len = rd.u32(what);
      ids.push_back(rd.str(len, what));
    }
    return ids;
  };
  auto phrase_ids = read_table(n_phrases, "phrase id table");
  auto image_ids = read_table(n_images, "image id table");
  if (rd.remaining() != 0) {
    throw Error(ErrorKind::dimension, std::to_string(rd.remaining()) +
                                          " trailing bytes after id tables; header dimensions "
                                          "disagree with the payload");
  }
  return SimMatrix(std::move(phrase_ids), std::move(image_ids), std::move(logits));
}

json encode_text(const SimMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (float v : m.logit_row(r)) row.push_back(static_cast<double>(v));
    rows.push_back(std::move(row));
  }
  return {{"format", "SIMM"},
          {"version", kSimVersion},
          {"n_phrases", m.rows()},
          {"n_images", m.cols()},
          {"phrase_ids", m.phrase_ids()},
          {"image_ids", m.image_ids()},
          {"logits", std::move(rows)}};
}

SimMatrix decode_text(const json& doc) {
  auto fail = [](const std::string& what) -> void { throw Error(ErrorKind::parse, what); };
  if (!doc.is_object() || doc.value("format", "") != "SIMM") fail("bad magic: not a SIMM text document");
  if (doc.value("version", 0u) != kSimVersion) fail("unsupported similarity document version");
  for (const char* key : {"phrase_ids", "image_ids", "logits"}) {
    if (!doc.contains(key) || !doc[key].is_array()) fail(std::string("$.") + key + ": expected array");
  }
  auto phrase_ids = doc["phrase_ids"].get<std::vector<std::string>>();
  auto image_ids = doc["image_ids"].get<std::vector<std::string>>();
  std::size_t n_phrases = doc.value("n_phrases", phrase_ids.size());
  std::size_t n_images = doc.value("n_images", image_ids.size());
  if (n_phrases != phrase_ids.size() || n_images != image_ids.size()) {
    throw Error(ErrorKind::dimension, "declared dimensions disagree with id tables");
  }
  const json& rows = doc["logits"];
  if (rows.size() != n_phrases) {
    throw Error(ErrorKind::dimension, "logits has " + std::to_string(rows.size()) +
                                          " rows, header declares " + std::to_string(n_phrases));
  }
  std::vector<float> logits;
  logits.reserve(n_phrases * n_images);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != n_images) {
      throw Error(ErrorKind::dimension,
                  "logits row " + std::to_string(r) + " has " +
                      std::to_string(rows[r].is_array() ? rows[r].size() : 0) +
                      " columns, header declares " + std::to_string(n_images));
    }
    for (const auto& v : rows[r]) {
      if (!v.is_number()) fail("logits row " + std::to_string(r) + ": expected numbers");
      logits.push_back(static_cast<float>(v.get<double>()));
    }
  }
  return SimMatrix(std::move(phrase_ids), std::move(image_ids), std::move(logits));
}

namespace {

std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open similarity file '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

SimFormat detect_format(const std::string& path) {
  auto bytes = read_all(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kSimMagic, 4) == 0) return SimFormat::binary;
  return SimFormat::text;
}

SimMatrix load_similarity(const std::string& path) {
  auto bytes = read_all(path);
  try {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kSimMagic, 4) == 0) {
      return decode_binary(bytes);
    }
    json doc;
    try {
      doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error&) {
      throw Error(ErrorKind::parse, "bad magic: neither SIMM binary nor a SIMM text document");
    }
    return decode_text(doc);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string serialize_similarity(const SimMatrix& m, SimFormat format) {
  if (format == SimFormat::binary) {
    auto bytes = encode_binary(m);
    return std::string(bytes.begin(), bytes.end());
  }
  return encode_text(m).dump() + "\n";
}

void save_similarity(const SimMatrix& m, const std::string& path, SimFormat format) {
  std::string payload = serialize_similarity(m, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write similarity file '" + path + "'");
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(ErrorKind::io, "short write to '" + path + "'");
}

// ---------------------------------------------------------------------------
// aggregation

Aggregation parse_aggregation(std::string_view name) {
  if (name == "mean") return Aggregation::mean;
  throw Error(ErrorKind::usage, "unknown aggregation '" + std::string(name) + "'");
}

const char* to_string(Aggregation) { return "mean"; }

std::vector<std::size_t> phrase_rows(const Subsection& u, const SimMatrix& m,
                                     const WindowConfig& cfg) {
  if (u.tokens.empty()) {
    throw Error(ErrorKind::empty_input, "subsection '" + u.id + "' has no phrases");
  }
  auto ranges = window_ranges(u.tokens.size(), cfg);
  std::vector<std::size_t> rows;
  rows.reserve(ranges.size());
  for (std::size_t k = 0; k < ranges.size(); ++k) rows.push_back(m.phrase_row(phrase_id(u.id, k)));
  return rows;
}

std::vector<double> aggregate_rows(const SimMatrix& m, std::span<const std::size_t> rows,
                                   Aggregation) {
  if (rows.empty()) throw Error(ErrorKind::empty_input, "aggregation over zero phrases");
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t r : rows) {
    auto p = m.prob_row(r);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += p[j];
  }
  double n = static_cast<double>(rows.size());
  for (double& v : out) v /= n;
  return out;
}

std::vector<double> aggregate_relevance(const Subsection& u, const SimMatrix& m,
                                        const WindowConfig& cfg, Aggregation agg) {
  auto rows = phrase_rows(u, m, cfg);
  return aggregate_rows(m, rows, agg);
}

}  // namespace illustrate
