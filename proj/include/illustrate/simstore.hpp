#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "illustrate/corpus.hpp"

namespace illustrate {

enum class ImageSource { openstax, wikipedia };

struct ImageRecord {
  std::string id;
  ImageSource source = ImageSource::openstax;
  std::string uri;
  std::optional<std::string> caption;
};

/// Ordered image metadata. The order is the similarity-matrix column order.
class ImageBank {
 public:
  explicit ImageBank(std::vector<ImageRecord> images);

  std::size_t size() const { return images_.size(); }
  const std::vector<ImageRecord>& images() const { return images_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<ImageRecord> images_;
  std::unordered_map<std::string, std::size_t> index_;
};

ImageBank parse_image_bank(const nlohmann::json& doc);
ImageBank load_image_bank(const std::string& path);

/// Numerically stable softmax; throws Error(numeric) on NaN or infinite input.
std::vector<double> row_softmax(std::span<const double> logits);
std::vector<double> row_softmax(std::span<const float> logits);

/// Dense phrase x image similarity scores. Logits keep the on-disk binary32
/// values; probabilities are the per-row softmax across the whole bank,
/// held in double precision.
class SimMatrix {
 public:
  SimMatrix(std::vector<std::string> phrase_ids, std::vector<std::string> image_ids,
            std::vector<float> logits);

  std::size_t rows() const { return phrase_ids_.size(); }
  std::size_t cols() const { return image_ids_.size(); }

  const std::vector<std::string>& phrase_ids() const { return phrase_ids_; }
  const std::vector<std::string>& image_ids() const { return image_ids_; }

  float logit(std::size_t row, std::size_t col) const { return logits_[row * cols() + col]; }
  double prob(std::size_t row, std::size_t col) const { return probs_[row * cols() + col]; }
  std::span<const float> logit_row(std::size_t row) const;
  std::span<const double> prob_row(std::size_t row) const;
  std::span<const float> logits() const { return logits_; }

  std::optional<std::size_t> find_phrase(std::string_view id) const;
  std::optional<std::size_t> find_image(std::string_view id) const;
  std::size_t phrase_row(std::string_view id) const;  // throws Error(lookup)
  std::size_t image_col(std::string_view id) const;   // throws Error(lookup)

  /// sim(i, t): softmax probability of image `image_id` for phrase `phrase_id`.
  double sim(std::string_view image_id, std::string_view phrase_id) const;

 private:
  std::vector<std::string> phrase_ids_;
  std::vector<std::string> image_ids_;
  std::vector<float> logits_;
  std::vector<double> probs_;
  std::unordered_map<std::string, std::size_t> phrase_index_;
  std::unordered_map<std::string, std::size_t> image_index_;
};

enum class SimFormat { binary, text };

inline constexpr char kSimMagic[4] = {'S', 'I', 'M', 'M'};
inline constexpr std::uint32_t kSimVersion = 1;

std::vector<std::uint8_t> encode_binary(const SimMatrix& m);
SimMatrix decode_binary(std::span<const std::uint8_t> bytes);
nlohmann::json encode_text(const SimMatrix& m);
SimMatrix decode_text(const nlohmann::json& doc);

/// Sniffs the magic bytes to pick the format.
SimMatrix load_similarity(const std::string& path);
SimFormat detect_format(const std::string& path);
void save_similarity(const SimMatrix& m, const std::string& path, SimFormat format);
std::string serialize_similarity(const SimMatrix& m, SimFormat format);

enum class Aggregation { mean };

Aggregation parse_aggregation(std::string_view name);
const char* to_string(Aggregation agg);

/// Row indices of the subsection's phrases inside `m`; throws Error(lookup) if
/// any phrase is absent and Error(empty_input) if the subsection has no tokens.
std::vector<std::size_t> phrase_rows(const Subsection& u, const SimMatrix& m,
                                     const WindowConfig& cfg);

/// Per-image relevance: aggregate of the subsection's phrase probability rows.
std::vector<double> aggregate_relevance(const Subsection& u, const SimMatrix& m,
                                        const WindowConfig& cfg,
                                        Aggregation agg = Aggregation::mean);
std::vector<double> aggregate_rows(const SimMatrix& m, std::span<const std::size_t> rows,
                                   Aggregation agg = Aggregation::mean);

}  // namespace illustrate
