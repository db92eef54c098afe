#include <gtest/gtest.h>

#include "gprd/errors.hpp"
#include "gprd/nn/crnet.hpp"
#include "gprd/nn/gradient_check.hpp"
#include "gprd/nn/rdb.hpp"
#include "nn_helpers.hpp"

using namespace gprd;
using namespace gprd::nn;
using gprd::test::random_tensor;

TEST(ResidualDenseBlock, ZeroWeightsAreIdentity) {
  ResidualDenseBlock<double> rdb("r", 6);
  const auto x = random_tensor({2, 6, 4, 4}, 1);
  const auto y = rdb.forward(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
}

TEST(ResidualDenseBlock, Widths) {
  ResidualDenseBlock<double> rdb("r", 64);
  EXPECT_EQ(rdb.growth(), 21u);
  EXPECT_EQ(rdb.fusion_inputs(), 64u + 63u);
  EXPECT_EQ(rdb.fusion().in_channels(), 127u);
  EXPECT_EQ(rdb.fusion().out_channels(), 64u);
  EXPECT_EQ(rdb.layer(2).in_channels(), 64u + 42u);
  EXPECT_THROW(ResidualDenseBlock<double>("r", 2), InvalidArgument);
  EXPECT_THROW(rdb.forward(random_tensor({1, 6, 4, 4}, 1)), InvalidArgument);
}

TEST(ResidualDenseBlock, InputGradientMatchesFiniteDifferences) {
  ResidualDenseBlock<double> rdb("r", 6);
  ParamSet<double> set;
  rdb.collect(set);
  std::uint64_t seed = 3;
  for (auto* p : set.params) test::randomize(*p, seed++, 0.3);
  auto x = random_tensor({1, 6, 4, 4}, 99);
  const auto proj = random_tensor({1, 6, 4, 4}, 98);
  rdb.forward(x);
  PatternHash base;
  rdb.hash_pattern(base);
  const auto dx = rdb.backward(proj);
  std::vector<double> xv(x.values().begin(), x.values().end());
  std::size_t checked = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double num = test::central_difference(xv, i, [&] {
      std::copy(xv.begin(), xv.end(), x.data());
      return test::dot(rdb.forward(x), proj);
    });
    std::copy(xv.begin(), xv.end(), x.data());
    PatternHash h;
    rdb.hash_pattern(h);
    if (h.value != base.value) continue;
    ++checked;
    EXPECT_LE(test::relative_error(dx.data()[i], num), 1e-5) << i;
  }
  EXPECT_GT(checked, x.size() / 2);
}

TEST(CRNet, ChannelLadder) {
  CRNetConfig cfg;
  cfg.base_width = 8;
  std::vector<std::size_t> ladder;
  for (std::size_t i = 0; i < 4; ++i) ladder.push_back(cfg.level_channels(i));
  EXPECT_EQ(ladder, (std::vector<std::size_t>{8, 16, 32, 64}));
  EXPECT_EQ(cfg.bottleneck_channels(), 128u);
  CRNet<float> net(cfg);
  EXPECT_EQ(net.rdb(3).channels(), 64u);
  EXPECT_EQ(net.rdb(0).growth(), 2u);
}

TEST(CRNet, ConfigValidation) {
  CRNetConfig cfg;
  cfg.base_width = 2;
  EXPECT_THROW(CRNet<float>{cfg}, InvalidArgument);
  cfg.base_width = 8;
  cfg.depth = 3;
  EXPECT_THROW(CRNet<float>{cfg}, InvalidArgument);
}

TEST(CRNet, ShapePreservedAndEvalIsPure) {
  CRNetConfig cfg;
  cfg.base_width = 4;
  CRNet<float> net(cfg);
  net.initialize(7);
  Tensor4<float> x({1, 1, 256, 64});
  detail::Rng rng(1);
  for (auto& v : x.values()) v = static_cast<float>(rng.uniform());
  net.forward(x, Mode::train);
  const auto a = net.forward(x, Mode::eval);
  const auto b = net.forward(x, Mode::eval);
  EXPECT_EQ(a.shape(), x.shape());
  EXPECT_EQ(std::vector<float>(a.values().begin(), a.values().end()),
            std::vector<float>(b.values().begin(), b.values().end()));
  for (Shape4 s : {Shape4{2, 1, 32, 16}, Shape4{1, 1, 16, 48}}) {
    EXPECT_EQ(net.forward(Tensor4<float>(s, 0.5f), Mode::train).shape(), s);
  }
}

TEST(CRNet, BadShapesThrow) {
  CRNetConfig cfg;
  cfg.base_width = 4;
  CRNet<float> net(cfg);
  try {
    net.forward(Tensor4<float>({1, 1, 250, 64}), Mode::eval);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos);
  }
  EXPECT_THROW(net.forward(Tensor4<float>({1, 2, 32, 32}), Mode::eval), InvalidArgument);
}

TEST(CRNet, InitializationIsSeededAndScaled) {
  CRNetConfig cfg;
  cfg.base_width = 4;
  CRNet<float> a(cfg), b(cfg), c(cfg);
  a.initialize(3);
  b.initialize(3);
  c.initialize(3, InitKind::unit_gaussian);
  auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  ASSERT_EQ(pa.params.size(), pb.params.size());
  for (std::size_t i = 0; i < pa.params.size(); ++i) EXPECT_EQ(pa.params[i]->value, pb.params[i]->value);
  double ss_a = 0, ss_c = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < pa.params.size(); ++i) {
    if (!pa.params[i]->is_weight) continue;
    for (std::size_t j = 0; j < pa.params[i]->value.size(); ++j) {
      ss_a += std::pow(pa.params[i]->value[j], 2) * pa.params[i]->fan_in;
      ss_c += std::pow(pc.params[i]->value[j], 2);
      ++n;
    }
  }
  EXPECT_NEAR(ss_a / n, 1.0, 0.05);
  EXPECT_NEAR(ss_c / n, 1.0, 0.05);
  EXPECT_EQ(parse_init_kind("unit-gaussian"), InitKind::unit_gaussian);
  EXPECT_THROW(parse_init_kind("xavier"), InvalidArgument);
}

TEST(GradientCheck, SmallModelWithinTolerance) {
  const auto report = gradient_check({});
  EXPECT_TRUE(report.passed) << report.to_text();
  EXPECT_LE(report.max_rel_error, 1e-4);
  EXPECT_GT(report.checked, 100u);
  for (const auto& g : report.groups) EXPECT_GT(g.checked + g.kinks, 0u) << g.name;
}
