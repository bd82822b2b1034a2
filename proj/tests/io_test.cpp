#include "rpw/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "test_helpers.hpp"

namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rpw_io_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(TempDir, DistributionCsvRoundTrip) {
  std::mt19937_64 rng(13);
  auto d = testutil::random_distribution(rng, 9, 3);
  rpw::write_distribution_csv(path("d.csv"), d);
  auto back = rpw::read_distribution_csv(path("d.csv"));
  ASSERT_EQ(back.size(), d.size());
  ASSERT_EQ(back.dimension(), d.dimension());
  for (std::size_t i = 0; i < d.size(); ++i) {
    // Masses renormalize on ingestion, so they agree to an ulp, not exactly.
    EXPECT_NEAR(back.mass(i), d.mass(i), 1e-15);
    for (std::size_t c = 0; c < d.dimension(); ++c) EXPECT_EQ(back.point(i)[c], d.point(i)[c]);
  }
}

TEST_F(TempDir, DistributionCsvErrors) {
  EXPECT_THROW(rpw::read_distribution_csv(path("missing.csv")), rpw::io_error);
  {
    std::ofstream f(path("bad_header.csv"));
    f << "a,b\n0,1\n";
  }
  EXPECT_THROW(rpw::read_distribution_csv(path("bad_header.csv")), rpw::io_error);
  {
    std::ofstream f(path("bad_row.csv"));
    f << "x_1,mass\n0.5\n";
  }
  EXPECT_THROW(rpw::read_distribution_csv(path("bad_row.csv")), rpw::io_error);
  {
    std::ofstream f(path("bad_num.csv"));
    f << "x_1,mass\nzero,1\n";
  }
  EXPECT_THROW(rpw::read_distribution_csv(path("bad_num.csv")), rpw::io_error);
  {
    std::ofstream f(path("neg_mass.csv"));
    f << "x_1,mass\n0.0,-2\n";
  }
  EXPECT_THROW(rpw::read_distribution_csv(path("neg_mass.csv")), rpw::io_error);
}

TEST_F(TempDir, PgmAsciiRoundTrip) {
  rpw::Image img{2, 3, {0, 10, 20, 30, 40, 255}};
  rpw::write_pgm(path("img.pgm"), img);
  auto back = rpw::read_pgm(path("img.pgm"));
  EXPECT_EQ(back.rows, img.rows);
  EXPECT_EQ(back.cols, img.cols);
  EXPECT_EQ(back.pixels, img.pixels);
}

TEST_F(TempDir, PgmBinary) {
  {
    std::ofstream f(path("raw.pgm"), std::ios::binary);
    f << "P5\n# comment line\n2 2\n255\n";
    const unsigned char px[4] = {0, 128, 64, 255};
    f.write(reinterpret_cast<const char*>(px), 4);
  }
  auto img = rpw::read_pgm(path("raw.pgm"));
  ASSERT_EQ(img.pixels.size(), 4u);
  EXPECT_DOUBLE_EQ(img.pixels[1], 128.0);
  EXPECT_DOUBLE_EQ(img.pixels[3], 255.0);
}

TEST_F(TempDir, PgmErrors) {
  {
    std::ofstream f(path("bad.pgm"));
    f << "P3\n1 1\n255\n0\n";
  }
  EXPECT_THROW(rpw::read_pgm(path("bad.pgm")), rpw::io_error);
  {
    std::ofstream f(path("trunc.pgm"));
    f << "P2\n2 2\n255\n1 2 3\n";
  }
  EXPECT_THROW(rpw::read_pgm(path("trunc.pgm")), rpw::io_error);
}

TEST_F(TempDir, ImageCsv) {
  {
    std::ofstream f(path("img.csv"));
    f << "0,255\n";
  }
  auto img = rpw::read_image(path("img.csv"));
  auto d = rpw::DiscreteDistribution::from_image(img);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.point(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(d.point(0)[1], 0.5);
  EXPECT_THROW(rpw::read_image(path("img.bmp")), rpw::io_error);
}

TEST_F(TempDir, ProfileCsvColumns) {
  auto [mu, nu] = testutil::overlap_fixture();
  auto prof = rpw::ot_profile(mu, nu, rpw::cost_matrix(mu, nu, 1.0).normalized());
  rpw::write_profile_csv(path("prof.csv"), prof);
  std::ifstream f(path("prof.csv"));
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "mass,p_power_cost,wp_value");
  std::string line;
  int rows = 0;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(FmtDouble, RoundTripsExactly) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double v = i == 0 ? 0.1 : u(rng);
    const std::string s = rpw::fmt_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
}

TEST(ResultJson, CarriesAllFields) {
  rpw::RPWResult r;
  r.epsilon = 0.05;
  r.x_star = 0.95;
  r.y_star = 0.05;
  r.p = rpw::kInfiniteP;
  r.k = 1.0;
  r.method = rpw::RPWMethod::binary_search;
  auto j = rpw::result_to_json(r, 1.5, 3, 4);
  EXPECT_DOUBLE_EQ(j["epsilon"].get<double>(), 0.05);
  EXPECT_EQ(j["p"].get<std::string>(), "inf");
  EXPECT_EQ(j["method"].get<std::string>(), "binary_search");
  EXPECT_EQ(j["n_mu"].get<int>(), 3);
}
