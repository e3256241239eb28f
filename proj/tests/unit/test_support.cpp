#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qflab/artifacts.hpp"
#include "qflab/errors.hpp"
#include "qflab/parallel.hpp"
#include "qflab/rng.hpp"
#include "qflab/stats.hpp"

using namespace qflab;

TEST(Rng, Reproducible) {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(Rng(5).uniform(), c.uniform());
}

TEST(Rng, DerivedSeedsIndependent) {
  EXPECT_EQ(derive_seed(1, {tag("a"), 2}), derive_seed(1, {tag("a"), 2}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m) {
    for (std::uint64_t k = 0; k < 50; ++k) seen.insert(derive_seed(m, {tag("x"), k}));
  }
  EXPECT_EQ(seen.size(), 200u);
  EXPECT_NE(tag("attack"), tag("landscape"));
  EXPECT_NE(derive_seed(1, {1, 2}), derive_seed(1, {2, 1}));
}

TEST(Rng, IndexAndSignRanges) {
  Rng r(1);
  int plus = 0;
  for (int i = 0; i < 2000; ++i) {
    EXPECT_LT(r.index(7), 7u);
    const double s = r.sign();
    EXPECT_TRUE(s == 1.0 || s == -1.0);
    plus += s > 0;
  }
  EXPECT_GT(plus, 800);
  EXPECT_LT(plus, 1200);
}

TEST(Stats, LinearFitExact) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
}

TEST(Stats, MomentsAndHistogram) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(v), 2.5);
  EXPECT_GT(stddev(v), 0.0);
  const std::vector<double> h{0.0, 0.49, 0.5, 1.0, 2.0};
  const auto c = histogram(h, 2, 0.0, 1.0);
  EXPECT_EQ(c[0], 2u);
  EXPECT_EQ(c[1], 2u);  // the upper edge lands in the last bin, 2.0 is dropped
}

TEST(Stats, KsUniform) {
  std::vector<double> u;
  for (int i = 0; i < 1000; ++i) u.push_back((i + 0.5) / 1000);
  EXPECT_LE(ks_uniform(u, 0, 1), 0.0005 + 1e-12);
  EXPECT_NEAR(ks_uniform(std::vector<double>(10, 0.0), 0, 1), 1.0, 1e-12);
}

TEST(Parallel, IndexOrderedResults) {
  std::vector<int> out(1000, -1);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i % 97));
  std::vector<double> a(200), b(200);
  auto job = [](std::vector<double>& dst) {
    return [&dst](std::size_t i) {
      Rng r(derive_seed(3, {i}));
      dst[i] = r.uniform();
    };
  };
  parallel_for(a.size(), job(a), 1);
  parallel_for(b.size(), job(b), 8);
  EXPECT_EQ(a, b);
}

TEST(Parallel, ExceptionsPropagate) {
  std::atomic<int> ran{0};
  EXPECT_THROW(parallel_for(
                   50,
                   [&](std::size_t i) {
                     ++ran;
                     if (i == 17) throw ConfigError("boom");
                   },
                   3),
               ConfigError);
  EXPECT_EQ(ran.load(), 50);
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(Csv, FormatAndEscape) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_escape("x\ny"), "\"x\ny\"");
}

TEST(Csv, TableRows) {
  CsvTable t({"a", "b"});
  t.cell(1).cell("x,y").end_row();
  t.cell(0.5).cell(true).end_row();
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.str(), "a,b\r\n1,\"x,y\"\r\n0.5,1\r\n");
  t.cell(1);
  EXPECT_THROW(t.end_row(), Error);
}

TEST(Artifacts, WritesAndTracks) {
  const auto root = std::filesystem::temp_directory_path() / "qflab_artifact_test";
  std::filesystem::remove_all(root);
  ArtifactSet set(root);
  set.write("sub/a.csv", "hello");
  set.write("b.json", "{}");
  EXPECT_EQ(set.files().size(), 2u);
  std::ifstream in(root / "sub" / "a.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "hello");
  std::filesystem::remove_all(root);
}
