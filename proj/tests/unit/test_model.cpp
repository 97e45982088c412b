#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fouriernet/error.hpp"
#include "fouriernet/model.hpp"
#include "model_checks.hpp"

using namespace fouriernet;
using ad::Shape;
using ad::Tensor;

namespace {

NetworkConfig toy(int order) {
  NetworkConfig c;
  c.depth = 2;
  c.base_channels = 4;
  c.descriptor_order = order;
  c.input_height = 16;
  c.input_width = 16;
  return c;
}

// Independent count: 3x3 conv = (9 in + 1) out; U-Net levels as built.
std::size_t conv(std::size_t in, std::size_t out) { return (9 * in + 1) * out; }

std::size_t unet_count(const NetworkConfig& c, std::size_t in, std::size_t out) {
  auto ch = [&](int l) { return static_cast<std::size_t>(c.base_channels) << l; };
  std::size_t total = 0;
  for (int l = 0; l < c.depth; ++l) total += conv(l == 0 ? in : ch(l - 1), ch(l)) + conv(ch(l), ch(l));
  total += conv(ch(c.depth - 1), ch(c.depth)) + conv(ch(c.depth), ch(c.depth));
  for (int l = 0; l < c.depth; ++l) total += conv(ch(l + 1), ch(l)) + conv(2 * ch(l), ch(l)) + conv(ch(l), ch(l));
  return total + conv(ch(0), out);
}

const NamedTensor& named(const std::vector<NamedTensor>& state, const std::string& name) {
  for (const auto& t : state) {
    if (t.name == name) return t;
  }
  throw std::invalid_argument(name);
}

}  // namespace

TEST(NetworkConfig, Validation) {
  NetworkConfig c = NetworkConfig::desk();
  EXPECT_EQ(c.input_height, 64);
  EXPECT_EQ(c.input_width, 128);
  EXPECT_EQ(c.depth, 3);
  EXPECT_EQ(c.base_channels, 16);
  EXPECT_NO_THROW(c.validate());
  c.input_width = 100;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetworkConfig::desk();
  c.descriptor_order = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  const NetworkConfig full;
  EXPECT_EQ(full.input_height, 256);
  EXPECT_EQ(full.input_width, 512);
  EXPECT_EQ(full.depth, 4);
  EXPECT_EQ(full.base_channels, 32);
  EXPECT_NO_THROW(full.validate());
  EXPECT_THROW(CascadedNet<float>(c, 1), ConfigError);
}

TEST(CascadedNet, StageTwoInputIsOrderPlusOne) {
  NetworkConfig c = NetworkConfig::desk();
  c.descriptor_order = 1;
  const CascadedNet<float> model(c, 3);
  EXPECT_EQ(named(model.state(), "s2.enc.l0.first.w").shape, (Shape{16, 2, 3, 3}));
  EXPECT_EQ(named(model.state(), "s1.enc.l0.first.w").shape, (Shape{16, 1, 3, 3}));
  EXPECT_EQ(named(model.state(), "s1.dec0.head.w").shape, (Shape{1, 16, 3, 3}));
  EXPECT_EQ(named(model.state(), "s2.dec.head.w").shape, (Shape{2, 16, 3, 3}));
}

TEST(CascadedNet, BaselineIsOneUnet) {
  NetworkConfig c = NetworkConfig::desk();
  c.descriptor_order = 0;
  const CascadedNet<float> model(c, 3);
  for (const auto& name : model.parameter_names()) EXPECT_EQ(name.rfind("s2.", 0), 0u) << name;
  EXPECT_EQ(model.parameter_count(), unet_count(c, 1, 2));
  EXPECT_EQ(expected_parameter_count(c), unet_count(c, 1, 2));
}

TEST(CascadedNet, ParameterCountFormula) {
  for (int order : {1, 2, 3}) {
    NetworkConfig c = NetworkConfig::desk();
    c.descriptor_order = order;
    const CascadedNet<float> model(c, 1);
    const auto ch = static_cast<std::size_t>(c.base_channels);
    // Stage 1: shared encoder + N decoders. Stage 2: wider first conv.
    const std::size_t one_unet = unet_count(c, 1, 1);
    std::size_t decoder = 0;
    for (int l = 0; l < c.depth; ++l) {
      const std::size_t cl = ch << l;
      decoder += conv(2 * cl, cl) + conv(2 * cl, cl) + conv(cl, cl);
    }
    decoder += conv(ch, 1);
    const std::size_t encoder = one_unet - decoder;
    const std::size_t stage2 = unet_count(c, order + 1, 2);
    EXPECT_EQ(model.parameter_count(), encoder + order * decoder + stage2);
    EXPECT_EQ(expected_parameter_count(c), model.parameter_count());
  }
}

TEST(CascadedNet, ZeroImageGivesNormalizedPosteriors) {
  NetworkConfig c = NetworkConfig::desk();
  c.descriptor_order = 2;
  const CascadedNet<float> model(c, 5);
  const auto p = predict(model, 64, 128, std::vector<float>(64 * 128, 0.0f));
  EXPECT_EQ(p.descriptors.order(), 2);
  ASSERT_EQ(p.posteriors.classes, 2);
  for (int r = 0; r < 64; ++r) {
    for (int col = 0; col < 128; ++col) {
      const double s = p.posteriors.at(0, r, col) + p.posteriors.at(1, r, col);
      EXPECT_NEAR(s, 1.0, 1e-6);
      EXPECT_TRUE(std::isfinite(p.descriptors.at(r, col, 0)));
    }
  }
}

TEST(Predict, DeterministicAndChecksShape) {
  NetworkConfig c = toy(1);
  const CascadedNet<float> model(c, 6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> image(256);
  for (auto& v : image) v = u(rng);
  const auto a = predict(model, 16, 16, image);
  const auto b = predict(model, 16, 16, image);
  EXPECT_EQ(a.posteriors.data, b.posteriors.data);
  EXPECT_EQ(a.descriptors, b.descriptors);
  EXPECT_THROW(predict(model, 16, 32, std::vector<float>(512)), ShapeMismatch);
  EXPECT_THROW(predict(model, 16, 16, std::vector<float>(10)), ShapeMismatch);
}

TEST(CascadedNet, StateRoundTripAndMismatch) {
  const CascadedNet<float> a(toy(2), 1);
  CascadedNet<float> b(toy(2), 2);
  b.load_state(a.state());
  EXPECT_EQ(predict(a, 16, 16, std::vector<float>(256, 0.3f)).posteriors.data,
            predict(b, 16, 16, std::vector<float>(256, 0.3f)).posteriors.data);
  CascadedNet<float> other(toy(1), 1);
  EXPECT_THROW(other.load_state(a.state()), ShapeMismatch);
  auto renamed = a.state();
  renamed[0].name = "bogus";
  EXPECT_THROW(b.load_state(renamed), ShapeMismatch);
}

TEST(CascadedNet, InferConfigFromState) {
  NetworkConfig c = NetworkConfig::desk();
  c.descriptor_order = 3;
  const auto inferred = infer_config(CascadedNet<float>(c, 1).state());
  EXPECT_EQ(inferred.depth, 3);
  EXPECT_EQ(inferred.base_channels, 16);
  EXPECT_EQ(inferred.descriptor_order, 3);
  EXPECT_EQ(inferred.num_classes, 2);
  c.descriptor_order = 0;
  EXPECT_EQ(infer_config(CascadedNet<float>(c, 1).state()).descriptor_order, 0);
}

TEST(CascadedNet, SameSeedSameWeights) {
  const CascadedNet<float> a(toy(1), 9), b(toy(1), 9), d(toy(1), 10);
  EXPECT_EQ(a.state()[0].data, b.state()[0].data);
  EXPECT_NE(a.state()[0].data, d.state()[0].data);
}

TEST(JointLoss, BaselineIsCrossEntropyAlone) {
  const auto c = toy(0);
  const CascadedNet<double> model(c, 2);
  const auto batch = fixtures::toy_batch<double>(c, 3);
  ad::Rng rng(0);
  const auto out = model.forward(batch.image, false, rng);
  EXPECT_TRUE(out.descriptors.empty());
  EXPECT_EQ(joint_loss(out, {}, batch.labels).item(), ad::softmax_cross_entropy(out.logits, batch.labels).item());
  EXPECT_NEAR(joint_loss(out, {}, batch.labels).item(), ad::cross_entropy_loss(out.posteriors, batch.labels).item(),
              1e-12);
}

TEST(JointLoss, UnitWeightsSumTheTasks) {
  const auto c = toy(2);
  const CascadedNet<double> model(c, 2);
  const auto batch = fixtures::toy_batch<double>(c, 4);
  ad::Rng rng(0);
  const auto out = model.forward(batch.image, false, rng);
  const double want = ad::softmax_cross_entropy(out.logits, batch.labels).item() +
                      ad::mse_loss(out.descriptors[0], batch.descriptors[0]).item() +
                      ad::mse_loss(out.descriptors[1], batch.descriptors[1]).item();
  EXPECT_NEAR(joint_loss(out, batch.descriptors, batch.labels).item(), want, 1e-12);
  LossWeights w;
  w.regression = {2.0, 0.0};
  w.classification = 0.5;
  const double weighted = 0.5 * ad::softmax_cross_entropy(out.logits, batch.labels).item() +
                          2.0 * ad::mse_loss(out.descriptors[0], batch.descriptors[0]).item();
  EXPECT_NEAR(joint_loss(out, batch.descriptors, batch.labels, w).item(), weighted, 1e-12);
  EXPECT_THROW(joint_loss(out, {batch.descriptors[0]}, batch.labels), ShapeMismatch);
}

TEST(JointLoss, PerfectPredictionLeavesOnlyTinyResidual) {
  CascadeOutput<double> out;
  const Tensor<double> target(Shape{1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  out.descriptors = {target};
  out.logits = Tensor<double>(Shape{1, 2, 2, 2}, std::vector<double>{40, -40, 40, -40, -40, 40, -40, 40});
  out.posteriors = ad::softmax_channels(out.logits);
  const Tensor<double> labels(Shape{1, 2, 2, 2}, std::vector<double>{1, 0, 1, 0, 0, 1, 0, 1});
  const double loss = joint_loss(out, {target}, labels).item();
  EXPECT_GE(loss, 0.0);
  EXPECT_LT(loss, 1e-10);
}

TEST(JointLoss, GradientReachesEveryStageOneParameter) {
  const auto c = toy(2);
  CascadedNet<double> model(c, 7);
  const auto batch = fixtures::toy_batch<double>(c, 8);
  ad::Rng rng(0);
  ad::backward(joint_loss(model.forward(batch.image, false, rng), batch.descriptors, batch.labels));
  const auto names = model.parameter_names();
  const auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    double norm = 0.0;
    for (double g : params[k].grad()) norm += g * g;
    EXPECT_GT(norm, 0.0) << names[k];
  }
}

// Stage-1 weights only see the classification loss through stage 2, so the
// checks below exercise the cross-stage path. h = 1e-4: at 1e-3 some of the
// thousands of ReLU and maxpool switch points flip inside the difference.
TEST(JointLoss, GradCheckAcrossStages64) {
  const auto c = toy(2);
  const auto r = fixtures::joint_loss_gradcheck(
      c, 11, {"s1.enc.l0.first.w", "s1.enc.bottleneck_b.b", "s1.dec1.head.w", "s2.enc.l0.first.w", "s2.dec.head.b"},
      12, 1e-4);
  EXPECT_LT(r.max_error, 1e-5);
  EXPECT_EQ(r.checked, 12u * 4 + 2);
}

TEST(JointLoss, GradCheckStageOneFloat) {
  const auto c = toy(1);
  const auto r = fixtures::joint_loss_gradcheck_float(c, 12, {"s1.enc.l0.first.w", "s1.dec0.l0.up.w"}, 10, 1e-4);
  EXPECT_LT(r.max_error, 1e-4);
}
