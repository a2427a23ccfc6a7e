#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include <cstring>
#include <filesystem>
#include <sstream>

#include "crossdict/model_file.hpp"

using namespace crossdict;
using testing::random_matrix;

namespace {

CrossScaleModel sample_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto lo = std::make_shared<const Dictionary>(normalize_atoms(random_matrix(16, 8, rng)));
  auto hi = std::make_shared<const Dictionary>(normalize_atoms(random_matrix(64, 32, rng)));
  return CrossScaleModel(lo, hi, ScaleSpec({8, 8}, {2, 2}), 3, 5);
}

std::string serialize(const Model& m) {
  std::stringstream ss;
  write_model(ss, m);
  return ss.str();
}

Model parse(const std::string& bytes) {
  std::stringstream ss(bytes);
  return read_model(ss);
}

}  // namespace

TEST_CASE("two-scale round trip is bit exact") {
  const CrossScaleModel m = sample_model(1);
  const Model back = parse(serialize(m));
  const auto& cs = std::get<CrossScaleModel>(back);
  CHECK(cs.d_low().atoms() == m.d_low().atoms());
  CHECK(cs.d_high().atoms() == m.d_high().atoms());
  CHECK(cs.q() == 4);
  CHECK(cs.k_low() == 3);
  CHECK(cs.k_high() == 5);
  CHECK(cs.scale() == m.scale());
  CHECK(serialize(back) == serialize(m));
}

TEST_CASE("single-scale round trip through a file") {
  std::mt19937_64 rng(2);
  SingleScaleModel s{std::make_shared<const Dictionary>(normalize_atoms(random_matrix(48, 20, rng))),
                     {4, 4, 3}, 4};
  const std::string path = (std::filesystem::temp_directory_path() / "crossdict_single.csd").string();
  save_model(path, s);
  const Model back = load_model(path);
  const auto& b = std::get<SingleScaleModel>(back);
  CHECK(b.dictionary->atoms() == s.dictionary->atoms());
  CHECK(b.patch_shape == s.patch_shape);
  CHECK(b.sparsity == 4);
}

TEST_CASE("layout starts with magic, version and scale count") {
  const std::string bytes = serialize(sample_model(3));
  REQUIRE(bytes.size() > 12);
  CHECK(bytes.substr(0, 4) == "CSDM");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 2);
  // coarse scale header: rank 2, extents 4x4, N 16, T 8, K 3, Q 4
  std::uint32_t header[7];
  std::memcpy(header, bytes.data() + 12, sizeof header);
  CHECK(header[0] == 2);
  CHECK(header[1] == 4);
  CHECK(header[3] == 16);
  CHECK(header[4] == 8);
  CHECK(header[5] == 3);
  CHECK(header[6] == 4);
  const std::size_t expected = 12 + (7 * 4 + 16 * 8 * 8) + (7 * 4 + 64 * 32 * 8) + 4;
  CHECK(bytes.size() == expected);
}

TEST_CASE("any corrupted byte is refused with a checksum error") {
  const std::string bytes = serialize(sample_model(4));
  for (std::size_t pos : {std::size_t{5}, std::size_t{20}, bytes.size() / 2, bytes.size() - 5, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
    CHECK_THROWS_AS(parse(bad), ChecksumError);
  }
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(parse(magic), FormatError);
  CHECK_THROWS_AS(parse(bytes.substr(0, bytes.size() - 9)), FormatError);
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(load_model("/nonexistent/dir/model.csd"), FormatError);
}

TEST_CASE("invalid single-scale models are rejected before writing") {
  std::mt19937_64 rng(5);
  SingleScaleModel s{std::make_shared<const Dictionary>(normalize_atoms(random_matrix(16, 8, rng))), {4, 5}, 2};
  std::stringstream ss;
  CHECK_THROWS_AS(write_model(ss, s), DimensionError);
  s.patch_shape = {4, 4};
  s.sparsity = 0;
  CHECK_THROWS_AS(write_model(ss, s), ConfigError);
}
