#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "snsm/io.hpp"
#include "snsm/rng.hpp"

using namespace snsm;
namespace fs = std::filesystem;

namespace {

fs::path tmp_path(const std::string& name) {
  return fs::temp_directory_path() / ("snsm_io_" + name);
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SynapticState random_state(Index k, Index n, std::uint64_t seed) {
  auto gen = rng::make_engine(seed);
  SynapticState s;
  s.W = Matrix::NullaryExpr(k, n, [&](Index, Index) { return rng::uniform(gen, -2.0, 2.0); });
  Matrix V = Matrix::NullaryExpr(k, k, [&](Index, Index) { return rng::uniform01(gen); });
  s.M = V * V.transpose();
  s.b = Vector::NullaryExpr(k, [&](Index) { return rng::uniform01(gen); });
  return s;
}

}  // namespace

TEST_CASE("format_double round-trips and is locale-free") {
  auto gen = rng::make_engine(71);
  for (int trial = 0; trial < 2000; ++trial) {
    double v;
    switch (trial % 4) {
      case 0: v = rng::uniform(gen, -1e6, 1e6); break;
      case 1: v = rng::normal(gen) * std::pow(10.0, rng::uniform(gen, -300.0, 300.0)); break;
      case 2: v = rng::uniform01(gen); break;
      default: v = -rng::uniform01(gen) * 1e-10; break;
    }
    const std::string s = io::format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc{});
    CHECK(back == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(io::format_double(0.0) == "0");
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-1.0) == "-1");
}

TEST_CASE("state file round-trips bitwise and redeposits identical bytes") {
  SynapticState s = random_state(5, 3, 72);
  const fs::path p1 = tmp_path("state1.snsm"), p2 = tmp_path("state2.snsm");
  io::save_state(s, p1);
  SynapticState back = io::load_state(p1);
  CHECK((back.W.array() == s.W.array()).all());
  CHECK((back.M.array() == s.M.array()).all());
  CHECK((back.b.array() == s.b.array()).all());
  io::save_state(back, p2);
  CHECK(read_bytes(p1) == read_bytes(p2));

  const auto bytes = read_bytes(p1);
  REQUIRE(bytes.size() == 16 + 8 * (5 * 3 + 5 * 5 + 5));
  CHECK(bytes[0] == 'S');
  CHECK(bytes[1] == 'N');
  CHECK(bytes[2] == 'S');
  CHECK(bytes[3] == 'M');
  CHECK(bytes[4] == 1);  // version, little-endian
  CHECK(bytes[8] == 5);  // k
  CHECK(bytes[12] == 3); // n
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("state loader rejects corrupted files") {
  SynapticState s = random_state(3, 2, 73);
  const fs::path p = tmp_path("corrupt.snsm");
  io::save_state(s, p);
  auto bytes = read_bytes(p);

  auto rewrite = [&](std::vector<std::uint8_t> b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
  };

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  rewrite(bad_magic);
  CHECK_THROWS_WITH_AS(io::load_state(p), doctest::Contains("bad magic"), ParseError);

  auto bad_version = bytes;
  bad_version[4] = 9;
  rewrite(bad_version);
  CHECK_THROWS_WITH_AS(io::load_state(p), doctest::Contains("unsupported version"),
                       ParseError);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 5);
  rewrite(truncated);
  CHECK_THROWS_WITH_AS(io::load_state(p), doctest::Contains("truncated"), ParseError);

  auto trailing = bytes;
  trailing.push_back(0);
  rewrite(trailing);
  CHECK_THROWS_WITH_AS(io::load_state(p), doctest::Contains("trailing"), ParseError);

  auto zero_dim = bytes;
  zero_dim[8] = 0;
  rewrite(zero_dim);
  CHECK_THROWS_WITH_AS(io::load_state(p), doctest::Contains("zero dimension"), ParseError);

  CHECK_THROWS_AS(io::load_state(tmp_path("missing.snsm")), ParseError);
  fs::remove(p);
}

TEST_CASE("train log is written with the documented header and full precision") {
  TrainLog log;
  log.checkpoints.push_back({0, 4424.125, 0.25, 1e-3});
  log.checkpoints.push_back({100, 0.15625, 1.0 / 3.0, 1e-5});
  const fs::path p = tmp_path("trainlog.csv");
  io::write_train_log(log, p);
  const std::string text = read_text(p);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "step,nsm_cost,active_fraction,eta");
  std::getline(lines, line);
  CHECK(line == "0,4424.125,0.25,0.001");
  std::getline(lines, line);
  const std::string frac = io::format_double(1.0 / 3.0);
  CHECK(line == "100,0.15625," + frac + ",1e-05");
  fs::remove(p);
}

TEST_CASE("feature grid tiles rows into a separator grid") {
  // 5 units of 2x3 features: a 3-column grid, two grid rows.
  Matrix W(5, 6);
  for (Index u = 0; u < 5; ++u)
    for (Index j = 0; j < 6; ++j) W(u, j) = double(u * 6 + j);
  W.row(2).setConstant(3.25);  // degenerate tile renders mid-gray

  const fs::path p = tmp_path("features.pgm");
  io::write_feature_grid(W, 2, 3, p);
  const auto bytes = read_bytes(p);

  const std::string header(bytes.begin(), bytes.begin() + 12);
  CHECK(header == "P5\n11 5\n255\n");  // width 3*3+2, height 2*2+1
  const std::size_t pixels = bytes.size() - 12;
  REQUIRE(pixels == 55);

  auto px = [&](int r, int c) { return bytes[12 + std::size_t(r) * 11 + c]; };
  // First tile spans rows 0-1, cols 0-2: min 0 -> 0, max 5 -> 255.
  CHECK(px(0, 0) == 0);
  CHECK(px(1, 2) == 255);
  // Separator column between tiles stays black.
  CHECK(px(0, 3) == 0);
  // Constant tile (unit 2) sits at grid position (0,2), cols 8-10.
  CHECK(px(0, 8) == 128);
  CHECK(px(1, 10) == 128);
  // Unit 3 starts the second grid row at image row 3; its max lands at (4,2).
  CHECK(px(4, 2) == 255);

  CHECK_THROWS_AS(io::write_feature_grid(W, 2, 2, p), DimensionError);
  CHECK_THROWS_AS(io::write_feature_grid(Matrix(0, 4), 2, 2, p), InvalidStateError);
  fs::remove(p);
}

TEST_CASE("dataset csv carries a header and full-precision values") {
  Matrix X(2, 3);
  X << 0.5, -1.0, 3.0, 1.0 / 3.0, 0.0, 2.5;
  const fs::path p = tmp_path("data.csv");
  io::write_dataset_csv(Dataset{X}, p);
  std::istringstream lines(read_text(p));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x0,x1,x2");
  std::getline(lines, line);
  CHECK(line == "0.5,-1,3");
  std::getline(lines, line);
  CHECK(line == io::format_double(1.0 / 3.0) + ",0,2.5");
  fs::remove(p);
}

TEST_CASE("spike raster lists one row per spike in unit order") {
  SpikeRecord rec;
  rec.spike_counts = {2, 0, 1};
  rec.spike_times = {{0.5, 1.25}, {}, {0.75}};
  rec.tau_end = 2.0;
  const fs::path p = tmp_path("raster.csv");
  io::write_spike_raster(rec, p);
  CHECK(read_text(p) == "unit_index,spike_time\n0,0.5\n0,1.25\n2,0.75\n");
  fs::remove(p);
}
