#include "doctest.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "illustrate/simstore.hpp"
#include "support.hpp"

using namespace illustrate;
using testing::error_kind;

namespace {

SimMatrix two_by_three() {
  return SimMatrix({"u#0", "u#1"}, {"img-a", "img-b", "img-c"},
                   {0.5f, -1.25f, 2.0f, 0.0f, 0.0f, 3.5f});
}

std::vector<std::uint8_t> header(std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::uint8_t> out = {'S', 'I', 'M', 'M'};
  for (std::uint32_t v : {1u, rows, cols}) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  return out;
}

void put(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_id(std::vector<std::uint8_t>& out, const std::string& id) {
  put(out, static_cast<std::uint32_t>(id.size()));
  out.insert(out.end(), id.begin(), id.end());
}

}  // namespace

TEST_CASE("softmax examples") {
  auto flat = row_softmax(std::vector<double>{1.7, 1.7, 1.7, 1.7});
  for (double p : flat) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));

  auto two = row_softmax(std::vector<double>{std::log(2.0), 0.0});
  CHECK(two[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  auto big = row_softmax(std::vector<double>{1000.0, 0.0});
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] < 1e-300);

  double nan = std::numeric_limits<double>::quiet_NaN();
  double inf = std::numeric_limits<double>::infinity();
  CHECK(error_kind([&] { row_softmax(std::vector<double>{0.0, nan}); }) == ErrorKind::numeric);
  CHECK(error_kind([&] { row_softmax(std::vector<double>{inf, 0.0}); }) == ErrorKind::numeric);
}

TEST_CASE("rows are stochastic for arbitrary logits") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n(0.0f, 8.0f);
  std::vector<float> logits(40 * 57);
  for (auto& v : logits) v = n(rng);
  std::vector<std::string> p(40), i(57);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = "p" + std::to_string(k);
  for (std::size_t k = 0; k < i.size(); ++k) i[k] = "i" + std::to_string(k);
  SimMatrix m(p, i, logits);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.prob_row(r);
    double total = std::accumulate(row.begin(), row.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : row) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("2x3 matrix keeps shape, ids and an independently computed softmax") {
  SimMatrix m = two_by_three();
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.phrase_ids() == std::vector<std::string>{"u#0", "u#1"});
  CHECK(m.image_ids() == std::vector<std::string>{"img-a", "img-b", "img-c"});
  auto ref0 = testing::reference_softmax({0.5f, -1.25f, 2.0f});
  auto ref1 = testing::reference_softmax({0.0f, 0.0f, 3.5f});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(m.prob(0, j) == doctest::Approx(ref0[j]).epsilon(1e-14));
    CHECK(m.prob(1, j) == doctest::Approx(ref1[j]).epsilon(1e-14));
  }
  CHECK(m.sim("img-c", "u#1") == m.prob(1, 2));
  CHECK(error_kind([&] { m.sim("img-z", "u#1"); }) == ErrorKind::lookup);
  CHECK(error_kind([&] { m.sim("img-a", "u#9"); }) == ErrorKind::lookup);
}

TEST_CASE("constant row gives 1/N everywhere") {
  SimMatrix m({"t"}, {"a", "b", "c", "d", "e"}, std::vector<float>(5, -3.0f));
  for (const auto& id : m.image_ids()) CHECK(m.sim(id, "t") == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("argmax under sim equals argmax under logits") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<float> u(-5.0f, 5.0f);
  std::vector<float> logits(30 * 12);
  for (auto& v : logits) v = u(rng);
  std::vector<std::string> p(30), i(12);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = "p" + std::to_string(k);
  for (std::size_t k = 0; k < i.size(); ++k) i[k] = "i" + std::to_string(k);
  SimMatrix m(p, i, logits);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto lr = m.logit_row(r);
    auto pr = m.prob_row(r);
    CHECK(std::max_element(lr.begin(), lr.end()) - lr.begin() ==
          std::max_element(pr.begin(), pr.end()) - pr.begin());
  }
}

TEST_CASE("column permutation with consistent ids leaves sim unchanged") {
  SimMatrix a = two_by_three();
  SimMatrix b({"u#0", "u#1"}, {"img-c", "img-a", "img-b"}, {2.0f, 0.5f, -1.25f, 3.5f, 0.0f, 0.0f});
  for (const auto& t : a.phrase_ids()) {
    for (const auto& i : a.image_ids()) CHECK(a.sim(i, t) == doctest::Approx(b.sim(i, t)).epsilon(1e-15));
  }
}

TEST_CASE("binary encoding round trips byte for byte") {
  SimMatrix m = two_by_three();
  auto bytes = encode_binary(m);
  CHECK(bytes.size() == 16 + 6 * 4 + (4 + 3) * 2 + (4 + 5) * 3);
  CHECK(std::memcmp(bytes.data(), "SIMM", 4) == 0);
  SimMatrix back = decode_binary(bytes);
  CHECK(encode_binary(back) == bytes);
  CHECK(back.phrase_ids() == m.phrase_ids());
  for (std::size_t k = 0; k < m.logits().size(); ++k) {
    CHECK(std::bit_cast<std::uint32_t>(back.logits()[k]) == std::bit_cast<std::uint32_t>(m.logits()[k]));
  }
}

TEST_CASE("text encoding round trips through binary") {
  SimMatrix m = two_by_three();
  auto text = serialize_similarity(m, SimFormat::text);
  SimMatrix back = decode_text(nlohmann::json::parse(text));
  CHECK(encode_binary(back) == encode_binary(m));
  CHECK(serialize_similarity(back, SimFormat::text) == text);
}

TEST_CASE("binary header disagreeing with the payload is a dimension error") {
  // Declares 4 images but carries 3 columns for one phrase.
  auto bytes = header(1, 4);
  for (float v : {0.1f, 0.2f, 0.3f}) put(bytes, std::bit_cast<std::uint32_t>(v));
  put_id(bytes, "p");
  for (const char* id : {"a", "b", "c"}) put_id(bytes, id);
  CHECK(error_kind([&] { decode_binary(bytes); }) == ErrorKind::dimension);

  auto good = encode_binary(two_by_three());
  good.push_back(0);
  CHECK(error_kind([&] { decode_binary(good); }) == ErrorKind::dimension);
  good.resize(good.size() - 3);
  CHECK(error_kind([&] { decode_binary(good); }) == ErrorKind::dimension);
}

TEST_CASE("bad magic and version are rejected") {
  auto bytes = encode_binary(two_by_three());
  auto wrong = bytes;
  wrong[0] = 'X';
  CHECK(error_kind([&] { decode_binary(wrong); }) == ErrorKind::parse);
  wrong = bytes;
  wrong[4] = 2;
  CHECK(error_kind([&] { decode_binary(wrong); }) == ErrorKind::parse);
}

TEST_CASE("text header disagreeing with rows is a dimension error") {
  auto doc = encode_text(two_by_three());
  doc["n_images"] = 4;
  CHECK(error_kind([&] { decode_text(doc); }) == ErrorKind::dimension);
  doc = encode_text(two_by_three());
  doc["logits"][1].erase(2);
  CHECK(error_kind([&] { decode_text(doc); }) == ErrorKind::dimension);
  doc = encode_text(two_by_three());
  doc["format"] = "OTHER";
  CHECK(error_kind([&] { decode_text(doc); }) == ErrorKind::parse);
}

TEST_CASE("load detects either format from the file") {
  SimMatrix m = two_by_three();
  std::string bin = "/tmp/illustrate_test_sim.bin";
  std::string txt = "/tmp/illustrate_test_sim.json";
  save_similarity(m, bin, SimFormat::binary);
  save_similarity(m, txt, SimFormat::text);
  CHECK(detect_format(bin) == SimFormat::binary);
  CHECK(detect_format(txt) == SimFormat::text);
  CHECK(encode_binary(load_similarity(bin)) == encode_binary(m));
  CHECK(encode_binary(load_similarity(txt)) == encode_binary(m));
  CHECK(error_kind([] { load_similarity("/nonexistent/sim.bin"); }) == ErrorKind::io);
}

TEST_CASE("fixture similarity file matches the fixture bank") {
  SimMatrix m = load_similarity(testing::fixture("sim_small.json"));
  ImageBank bank = load_image_bank(testing::fixture("bank_small.json"));
  CHECK(m.rows() == 8);
  CHECK(m.cols() == bank.size());
  for (std::size_t i = 0; i < m.cols(); ++i) CHECK(m.image_ids()[i] == bank.images()[i].id);
  CHECK(bank.images()[8].source == ImageSource::wikipedia);
  CHECK(bank.index_of("img-mito") == std::optional<std::size_t>(6));
}

TEST_CASE("aggregation examples") {
  Subsection one = testing::make_sub("one", "short text");
  Subsection two = testing::make_sub("two", "a b c d");
  WindowConfig w{2, 0.0};
  SimMatrix m = testing::from_probs({"one#0", "one#1", "two#0", "two#1"}, {"x", "y"},
                                    {{0.3, 0.7}, {0.9, 0.1}, {0.2, 0.8}, {0.6, 0.4}});
  auto agg = aggregate_relevance(two, m, w);
  CHECK(agg[0] == doctest::Approx(0.4).epsilon(1e-7));
  CHECK(agg[1] == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(agg[0] + agg[1] == doctest::Approx(1.0).epsilon(1e-12));

  // "one" has a single window under the default config: its aggregate is row one#0.
  auto row = aggregate_relevance(one, m, WindowConfig{});
  CHECK(row[0] == m.prob(0, 0));
  CHECK(row[1] == m.prob(0, 1));

  Subsection empty;
  empty.id = "empty";
  CHECK(error_kind([&] { aggregate_relevance(empty, m, w); }) == ErrorKind::empty_input);
  Subsection missing = testing::make_sub("missing", "a b");
  CHECK(error_kind([&] { aggregate_relevance(missing, m, w); }) == ErrorKind::lookup);
}

TEST_CASE("mean aggregation ignores phrase order") {
  std::mt19937_64 rng(23);
  std::normal_distribution<float> n(0.0f, 2.0f);
  std::vector<float> logits(6 * 9);
  for (auto& v : logits) v = n(rng);
  std::vector<std::string> p(6), i(9);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = "p" + std::to_string(k);
  for (std::size_t k = 0; k < i.size(); ++k) i[k] = "i" + std::to_string(k);
  SimMatrix m(p, i, logits);
  std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5};
  auto a = aggregate_rows(m, rows);
  std::vector<std::size_t> shuffled = {4, 2, 5, 0, 3, 1};
  auto b = aggregate_rows(m, shuffled);
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-14));
    total += a[j];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("duplicate ids and bad shapes are rejected at construction") {
  CHECK(error_kind([] { SimMatrix({"p", "p"}, {"a"}, {0.f, 0.f}); }) == ErrorKind::integrity);
  CHECK(error_kind([] { SimMatrix({"p"}, {"a", "b"}, {0.f}); }) == ErrorKind::dimension);
  CHECK(error_kind([] { parse_aggregation("max"); }) == ErrorKind::usage);
}
