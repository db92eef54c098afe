#include <gtest/gtest.h>

#include <filesystem>

#include "gprd/errors.hpp"
#include "gprd/nn/checkpoint.hpp"
#include "gprd/nn/predict.hpp"
#include "helpers.hpp"

using namespace gprd;
using namespace gprd::nn;

namespace {

CRNet<float> trained_model() {
  CRNetConfig cfg;
  cfg.base_width = 4;
  CRNet<float> net(cfg);
  net.initialize(21);
  net.forward(Tensor4<float>({2, 1, 32, 32}, 0.3f), Mode::train);
  return net;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
  auto net = trained_model();
  const auto bytes = encode_checkpoint(net);
  EXPECT_EQ(bytes.substr(0, 5), "CRN1\n");
  auto back = decode_checkpoint(bytes);
  EXPECT_EQ(back.config().base_width, 4u);
  EXPECT_EQ(encode_checkpoint(back), bytes);
  const auto scan = test::random_scan(40, 20, 4);
  EXPECT_EQ(predict(net, scan), predict(back, scan));
}

TEST(Checkpoint, FileRoundTrip) {
  auto net = trained_model();
  const auto path = std::filesystem::temp_directory_path() / "gprd_ckpt_test.crn";
  save_checkpoint(path, net);
  auto back = load_checkpoint(path);
  EXPECT_EQ(encode_checkpoint(back), encode_checkpoint(net));
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), std::exception);
}

TEST(Checkpoint, MalformedInputsRejected) {
  auto net = trained_model();
  const auto bytes = encode_checkpoint(net);
  EXPECT_THROW(decode_checkpoint("CRN2\n" + bytes.substr(5)), FormatError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), FormatError);
  EXPECT_THROW(decode_checkpoint(""), FormatError);
}

TEST(Predict, ShapeMetadataAndDeterminism) {
  auto net = trained_model();
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{64, 32}, {37, 11}, {1, 1}}) {
    const Radargram scan(h, w, test::random_values(h * w, h), 0.02, 8e-9, "scan");
    const auto a = predict(net, scan);
    EXPECT_EQ(a.height(), h);
    EXPECT_EQ(a.width(), w);
    EXPECT_EQ(a.label(), "scan");
    EXPECT_EQ(a.trace_spacing(), 0.02);
    EXPECT_EQ(a, predict(net, scan));
  }
}
