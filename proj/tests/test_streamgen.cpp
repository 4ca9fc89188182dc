#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "haphazard/dataset.hpp"
#include "haphazard/error.hpp"
#include "haphazard/stream.hpp"

using namespace haphazard;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

Dataset dense_dataset(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Dataset ds;
  std::mt19937_64 gen(seed);
  for (std::size_t c = 0; c < cols; ++c) ds.feature_names.push_back("f" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row;
    for (std::size_t c = 0; c < cols; ++c)
      row.push_back(static_cast<double>(gen() % 100) / 10.0);
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(static_cast<int>(gen() & 1u));
  }
  return ds;
}

bool streams_equal(const HaphazardStream& a, const HaphazardStream& b) {
  if (a.instances.size() != b.instances.size()) return false;
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    if (a.instances[i].t != b.instances[i].t) return false;
    if (a.instances[i].label != b.instances[i].label) return false;
    if (a.instances[i].x != b.instances[i].x) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("identical seeds give identical masked streams, different seeds differ") {
  const Dataset ds = dense_dataset(200, 12, 3);
  const auto s1 = mask_stream(ds, {0.5, 42});
  const auto s2 = mask_stream(ds, {0.5, 42});
  const auto s3 = mask_stream(ds, {0.5, 43});
  CHECK(streams_equal(s1, s2));
  CHECK(!streams_equal(s1, s3));
}

TEST_CASE("availability endpoints") {
  Dataset ds = dense_dataset(50, 6, 9);
  ds.rows[10][3] = kMissing;
  const auto all = mask_stream(ds, {1.0, 0});
  const auto none = mask_stream(ds, {0.0, 0});
  std::size_t non_missing = 50 * 6 - 1;
  std::size_t kept = 0;
  for (const auto& inst : all.instances) kept += inst.x.size();
  CHECK(kept == non_missing);
  CHECK(!all.instances[10].observes(3));
  for (const auto& inst : none.instances) CHECK(inst.x.empty());
}

TEST_CASE("masking consumes one draw per cell in row-major order") {
  Dataset ds = dense_dataset(40, 7, 5);
  ds.rows[0][0] = kMissing;  // missing cells still consume their draw
  ds.rows[3][5] = kMissing;
  const double p = 0.6;
  const std::uint64_t seed = 77;

  // Independent reimplementation of the documented draw discipline.
  std::mt19937_64 gen(seed);
  auto u01 = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<std::vector<bool>> keep(ds.size(), std::vector<bool>(ds.width()));
  for (std::size_t r = 0; r < ds.size(); ++r)
    for (std::size_t c = 0; c < ds.width(); ++c) keep[r][c] = u01() < p;

  const auto stream = mask_stream(ds, {p, seed});
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < ds.width(); ++c) {
      const bool expected = keep[r][c] && !is_missing(ds.rows[r][c]);
      CHECK(stream.instances[r].observes(static_cast<FeatureId>(c)) == expected);
    }
  }
}

TEST_CASE("per-feature availability concentrates near p") {
  const Dataset ds = dense_dataset(2000, 10, 1);
  const auto stream = mask_stream(ds, {0.5, 4});
  std::vector<std::size_t> counts(10, 0);
  for (const auto& inst : stream.instances)
    for (const auto& [id, v] : inst.x) ++counts[id];
  for (std::size_t c = 0; c < 10; ++c) {
    const double rate = static_cast<double>(counts[c]) / 2000.0;
    CHECK(rate > 0.45);
    CHECK(rate < 0.55);
  }
}

TEST_CASE("masking an existing stream draws once per present pair") {
  const Dataset ds = dense_dataset(30, 5, 8);
  const auto base = mask_stream(ds, {0.7, 1});
  const double p = 0.5;
  std::mt19937_64 gen(9);
  auto u01 = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<std::vector<bool>> keep;
  for (const auto& inst : base.instances) {
    std::vector<bool> row;
    for (std::size_t i = 0; i < inst.x.size(); ++i) row.push_back(u01() < p);
    keep.push_back(std::move(row));
  }
  const auto masked = mask_stream(base, {p, 9});
  for (std::size_t i = 0; i < base.instances.size(); ++i) {
    std::vector<std::pair<FeatureId, double>> expected;
    for (std::size_t j = 0; j < base.instances[i].x.size(); ++j)
      if (keep[i][j]) expected.push_back(base.instances[i].x[j]);
    CHECK(masked.instances[i].x == expected);
  }
}

TEST_CASE("jsonl round trip preserves the stream") {
  const Dataset ds = dense_dataset(25, 4, 13);
  const auto stream = mask_stream(ds, {0.5, 2});
  std::stringstream buf;
  write_jsonl(stream, buf);
  const auto back = read_jsonl(buf);
  CHECK(streams_equal(stream, back));
}

TEST_CASE("jsonl errors carry line numbers") {
  std::stringstream bad1("{\"t\":0,\"x\":{\"0\":1.0},\"y\":0}\nnot json\n");
  CHECK_THROWS_WITH_AS(read_jsonl(bad1), doctest::Contains("line 2"), Error);
  std::stringstream bad2("{\"t\":0,\"x\":{\"zero\":1.0},\"y\":0}\n");
  CHECK_THROWS_AS(read_jsonl(bad2), Error);
  std::stringstream bad3("{\"t\":0,\"y\":0}\n");
  CHECK_THROWS_AS(read_jsonl(bad3), Error);
}

TEST_CASE("csv loading with header, quotes, and markers") {
  const std::string path = write_temp("hz_test_basic.csv",
                                      "a,b,\"label, final\"\n"
                                      "1.5,?,1\n"
                                      "\"2.5\",3.5,-1\r\n"
                                      ",4.5,0\n");
  const Dataset ds = load_csv(path, "label, final");
  REQUIRE(ds.width() == 2);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  REQUIRE(ds.size() == 3);
  CHECK(ds.rows[0][0] == 1.5);
  CHECK(is_missing(ds.rows[0][1]));
  CHECK(ds.rows[1][0] == 2.5);
  CHECK(is_missing(ds.rows[2][0]));
  CHECK(ds.labels == std::vector<int>{1, 0, 0});
}

TEST_CASE("headerless csv synthesizes column names and negative label index") {
  const std::string path = write_temp("hz_test_headerless.csv",
                                      "1,2,0\n"
                                      "3,4,1\n");
  const Dataset ds = load_csv(path, "-1");
  CHECK(ds.feature_names == std::vector<std::string>{"c0", "c1"});
  CHECK(ds.labels == std::vector<int>{0, 1});

  const std::string path2 = write_temp("hz_test_firstcol.csv", "0,2,3\n1,4,5\n");
  const Dataset first = load_csv(path2, "0");
  CHECK(first.feature_names == std::vector<std::string>{"c1", "c2"});
  CHECK(first.labels == std::vector<int>{0, 1});
}

TEST_CASE("csv structural errors") {
  const std::string ragged = write_temp("hz_test_ragged.csv", "a,b,y\n1,2,0\n1,2,3,0\n");
  CHECK_THROWS_AS(load_csv(ragged, "y"), Error);
  // The bad cell sits in row 2 so the first row still reads as data, not as a
  // header.
  const std::string nonnum = write_temp("hz_test_nonnum.csv", "1,2,0\noops,3,1\n");
  CHECK_THROWS_AS(load_csv(nonnum, "-1"), Error);
  const std::string badlabel = write_temp("hz_test_badlabel.csv", "1,2,7\n");
  CHECK_THROWS_AS(load_csv(badlabel, "-1"), Error);
  CHECK_THROWS_AS(load_csv("/nonexistent/definitely.csv", "-1"), Error);
  const std::string ok = write_temp("hz_test_ok.csv", "1,2,0\n");
  CHECK_THROWS_AS(load_csv(ok, "nope"), Error);
  CHECK_THROWS_AS(load_csv(ok, "5"), Error);
}

TEST_CASE("integer-code encoding numbers categories in first-appearance order") {
  const std::string path = write_temp("hz_test_cat.csv",
                                      "color,y\n"
                                      "red,0\n"
                                      "blue,1\n"
                                      "red,0\n"
                                      "?,1\n"
                                      "green,0\n");
  Table table = load_table_csv(path);
  encode_categorical(table, 0, Encoding::integer_codes);
  const Dataset ds = table_to_dataset(table, "y");
  CHECK(ds.rows[0][0] == 1.0);
  CHECK(ds.rows[1][0] == 2.0);
  CHECK(ds.rows[2][0] == 1.0);
  CHECK(is_missing(ds.rows[3][0]));
  CHECK(ds.rows[4][0] == 3.0);
}

TEST_CASE("bracket-median encoding maps intervals to midpoints") {
  const std::string path = write_temp("hz_test_interval.csv",
                                      "bucket,y\n"
                                      "\"[10,20]\",0\n"
                                      "\"[75,100]\",1\n"
                                      "[40-60),0\n");
  Table table = load_table_csv(path);
  encode_categorical(table, 0, Encoding::bracket_median);
  const Dataset ds = table_to_dataset(table, "y");
  CHECK(ds.rows[0][0] == doctest::Approx(15.0));
  CHECK(ds.rows[1][0] == doctest::Approx(87.5));
  CHECK(ds.rows[2][0] == doctest::Approx(50.0));

  const std::string bad = write_temp("hz_test_badintv.csv", "bucket,y\nhello,0\n");
  Table t2 = load_table_csv(bad);
  CHECK_THROWS_AS(encode_categorical(t2, 0, Encoding::bracket_median), Error);
}

TEST_CASE("libsvm loading") {
  const std::string path = write_temp("hz_test.libsvm",
                                      "+1 1:0.5 3:2.5\n"
                                      "-1 2:1.5\n");
  const Dataset ds = load_libsvm(path);
  REQUIRE(ds.width() == 3);
  CHECK(ds.feature_names == std::vector<std::string>{"f1", "f2", "f3"});
  CHECK(ds.labels == std::vector<int>{1, 0});
  CHECK(ds.rows[0][0] == 0.5);
  CHECK(is_missing(ds.rows[0][1]));
  CHECK(ds.rows[0][2] == 2.5);
  CHECK(is_missing(ds.rows[1][0]));
  CHECK(ds.rows[1][1] == 1.5);

  const std::string dup = write_temp("hz_test_dup.libsvm", "1 1:2 1:3\n");
  CHECK_THROWS_AS(load_libsvm(dup), Error);
  const std::string mal = write_temp("hz_test_mal.libsvm", "1 nocolon\n");
  CHECK_THROWS_AS(load_libsvm(mal), Error);
}

TEST_CASE("stream_from_dataset treats non-missing as present") {
  Dataset ds = dense_dataset(5, 3, 21);
  ds.rows[2][1] = kMissing;
  const auto stream = stream_from_dataset(ds);
  CHECK(stream.instances[2].x.size() == 2);
  CHECK(!stream.instances[2].observes(1));
  CHECK(stream.instances[4].x.size() == 3);
  CHECK(stream.feature_names == ds.feature_names);
}
