#include <gtest/gtest.h>

#include <cmath>

#include "gprd/errors.hpp"
#include "gprd/radargram.hpp"
#include "helpers.hpp"

using namespace gprd;

TEST(Radargram, RejectsInvalidConstruction) {
  EXPECT_THROW(Radargram(0, 3, {}), InvalidArgument);
  EXPECT_THROW(Radargram(2, 2, {1, 2, 3}), InvalidArgument);
  EXPECT_THROW(Radargram(1, 2, {1, NAN}), InvalidArgument);
  EXPECT_THROW(Radargram(1, 2, {1, INFINITY}), InvalidArgument);
}

TEST(Radargram, PairRequiresEqualShapes) {
  EXPECT_THROW(DatasetPair(Radargram::filled(2, 2, 0), Radargram::filled(2, 3, 0)),
               InvalidArgument);
  EXPECT_NO_THROW(DatasetPair(Radargram::filled(2, 2, 0), Radargram::filled(2, 2, 1)));
}

TEST(Normalize, MapsEndpoints) {
  const auto n = normalize_unit(Radargram(1, 2, {-1, 1}));
  EXPECT_EQ(n(0, 0), 0.0);
  EXPECT_EQ(n(0, 1), 1.0);
}

TEST(Normalize, ConstantMapsToZeros) {
  const auto n = normalize_unit(Radargram::filled(2, 2, 5.0));
  for (double v : n.data()) EXPECT_EQ(v, 0.0);
}

TEST(Normalize, AffineValues) {
  const auto n = normalize_unit(Radargram(2, 2, {0, 2, 1, 4}));
  EXPECT_DOUBLE_EQ(n(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(n(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(n(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(n(1, 1), 1.0);
}

TEST(Normalize, IdempotentOnRandomScans) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = test::random_scan(7, 5, seed, -3.0, 8.0);
    const auto once = normalize_unit(r);
    EXPECT_EQ(once.min(), 0.0);
    EXPECT_EQ(once.max(), 1.0);
    EXPECT_EQ(normalize_unit(once).data().size(), once.data().size());
    const auto twice = normalize_unit(once);
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(twice.data()[i], once.data()[i]);
  }
}

TEST(Resize, IdentityAtSameSize) {
  const auto r = test::random_scan(6, 4, 3);
  EXPECT_EQ(resize_bilinear(r, 6, 4), r);
}

TEST(Resize, ConstantStaysConstant) {
  const auto r = Radargram::filled(5, 3, 0.37);
  const auto out = resize_bilinear(r, 11, 17);
  for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Resize, CornerAlignedCenter) {
  const auto out = resize_bilinear(Radargram(2, 2, {0, 1, 2, 3}), 3, 3);
  EXPECT_DOUBLE_EQ(out(1, 1), 1.5);
  EXPECT_DOUBLE_EQ(out(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out(2, 2), 3.0);
  EXPECT_DOUBLE_EQ(out(0, 1), 0.5);
}

TEST(Resize, MatchesBruteForceInterpolation) {
  const auto r = test::random_scan(9, 7, 11);
  const std::size_t h2 = 13, w2 = 4;
  const auto out = resize_bilinear(r, h2, w2);
  for (std::size_t i = 0; i < h2; ++i) {
    for (std::size_t j = 0; j < w2; ++j) {
      const double y = static_cast<double>(i) * 8.0 / 12.0;
      const double x = static_cast<double>(j) * 6.0 / 3.0;
      const auto y0 = static_cast<std::size_t>(std::floor(y));
      const auto x0 = static_cast<std::size_t>(std::floor(x));
      const std::size_t y1 = std::min<std::size_t>(y0 + 1, 8);
      const std::size_t x1 = std::min<std::size_t>(x0 + 1, 6);
      const double fy = y - y0, fx = x - x0;
      const double ref = (1 - fy) * ((1 - fx) * r(y0, x0) + fx * r(y0, x1)) +
                         fy * ((1 - fx) * r(y1, x0) + fx * r(y1, x1));
      EXPECT_NEAR(out(i, j), ref, 1e-12);
    }
  }
}

TEST(Resize, StaysWithinInputBounds) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto r = test::random_scan(5 + seed % 4, 3 + seed % 5, seed, -2, 2);
    const auto out = resize_bilinear(r, 3 + seed % 11, 2 + seed % 9);
    EXPECT_GE(out.min(), r.min());
    EXPECT_LE(out.max(), r.max());
  }
}

TEST(Resize, RejectsZeroTarget) {
  EXPECT_THROW(resize_bilinear(Radargram::filled(2, 2, 0), 0, 2), InvalidArgument);
}

TEST(Crop, AugmentationWindows) {
  std::vector<double> d(256 * 80);
  for (std::size_t i = 0; i < 256; ++i) {
    for (std::size_t j = 0; j < 80; ++j) d[i * 80 + j] = static_cast<double>(j + 1);
  }
  const Radargram r(256, 80, d);
  const auto a = crop_window(r, 1, 64);
  EXPECT_EQ(a.height(), 256u);
  EXPECT_EQ(a.width(), 64u);
  const auto b = crop_window(r, 13, 64);
  EXPECT_EQ(b(0, 0), 13.0);
  EXPECT_EQ(b(255, 63), 76.0);
  EXPECT_EQ(crop_window(r, 1, 80), r);
  EXPECT_THROW(crop_window(r, 18, 64), InvalidArgument);
  EXPECT_THROW(crop_window(r, 0, 4), InvalidArgument);
}

TEST(Prepare, ResizesThenNormalizes) {
  const auto r = test::random_scan(30, 20, 5, -4, 9);
  const auto p = prepare(r, 16, 8);
  EXPECT_EQ(p.height(), 16u);
  EXPECT_EQ(p.width(), 8u);
  EXPECT_EQ(p, normalize_unit(resize_bilinear(r, 16, 8)));
}
