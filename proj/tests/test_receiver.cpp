// Copyright 2026 The sigbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "sigbench/numeric/gradcheck.hpp"
#include "sigbench/receiver.hpp"
#include "sigbench/worlds.hpp"

namespace sigbench {
namespace {

constexpr double kTwoLn31 = 6.8679744089702924919;

ReceiverConfig small(CellKind cell, HeadKind head, bool marker) {
  return {cell, 5, 4, 6, head, marker, EmbeddingInit::kNormal};
}

TEST(ReceiverInit, ShapesFollowConfig) {
  Receiver r = Receiver::init(ReceiverConfig{}, 1);
  EXPECT_EQ(r.embedding().rows(), 31);
  EXPECT_EQ(r.embedding().cols(), 50);
  EXPECT_EQ(r.head_weights().rows(), 100);
  EXPECT_EQ(r.head_weights().cols(), 62);
  EXPECT_EQ(r.end_marker().size(), 0);

  ReceiverConfig marked;
  marked.end_marker = true;
  Receiver m = Receiver::init(marked, 1);
  EXPECT_EQ(m.embedding().rows(), 31);
  EXPECT_EQ(m.end_marker().rows(), 1);
  EXPECT_EQ(m.end_marker().cols(), 50);
  EXPECT_EQ(m.parameters().size(), r.parameters().size() + 1);
}

TEST(ReceiverInit, SameSeedIsBitIdentical) {
  for (auto init : {EmbeddingInit::kUniform, EmbeddingInit::kNormal}) {
    ReceiverConfig c;
    c.embedding_init = init;
    c.end_marker = true;
    Receiver a = Receiver::init(c, 42);
    Receiver b = Receiver::init(c, 42);
    Receiver other = Receiver::init(c, 43);
    const auto pa = a.parameters();
    const auto pb = b.parameters();
    for (std::size_t k = 0; k < pa.size(); ++k) {
      EXPECT_TRUE(pa[k]->values == pb[k]->values) << pa[k]->name;
    }
    EXPECT_FALSE(a.embedding().values == other.embedding().values);
  }
}

TEST(ReceiverInit, EmbeddingDistributions) {
  ReceiverConfig c;
  Receiver u = Receiver::init(c, 3);
  EXPECT_LE(u.embedding().values.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(31.0));

  c.embedding_init = EmbeddingInit::kNormal;
  Receiver n = Receiver::init(c, 3);
  const auto& v = n.embedding().values;
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
  // 1550 draws: std of the mean ~0.025, of the variance ~0.036.
  EXPECT_NEAR(mean, 0.0, 0.1);
  EXPECT_NEAR(var, 1.0, 0.15);
}

TEST(ReceiverInit, RejectsBadConfig) {
  ReceiverConfig c;
  c.n_values = 1;
  EXPECT_THROW(Receiver::init(c, 0), ConfigError);
  c = {};
  c.hidden_dim = 0;
  EXPECT_THROW(Receiver::init(c, 0), ConfigError);
}

TEST(ReceiverForward, ZeroModelGivesUniformLoss) {
  for (bool marker : {false, true}) {
    ReceiverConfig c;
    c.end_marker = marker;
    Receiver z = Receiver::zeros(c);
    for (const Message m : {Message{0, 0}, Message{3, 7}, Message{30, 30}}) {
      EXPECT_NEAR(z.loss_classify(m, {12, 30}), kTwoLn31, 1e-9);
      const auto [l1, l2] = z.forward_classify(m);
      EXPECT_EQ(l1.size(), 31);
      EXPECT_EQ(l2.size(), 31);
      EXPECT_EQ(l1.cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(ReceiverForward, ZeroHeadOnRandomModel) {
  ReceiverConfig c;
  c.end_marker = true;
  c.embedding_init = EmbeddingInit::kNormal;
  Receiver r = Receiver::init(c, 5);
  r.zero_head();
  EXPECT_NEAR(r.loss_classify({4, 9}, {1, 2}), kTwoLn31, 1e-9);
}

TEST(ReceiverForward, SymbolOrderMatters) {
  Receiver r = Receiver::init(ReceiverConfig{}, 8);
  const auto [a1, a2] = r.forward_classify({2, 9});
  const auto [b1, b2] = r.forward_classify({9, 2});
  EXPECT_GT((a1 - b1).cwiseAbs().maxCoeff() + (a2 - b2).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ReceiverForward, DeterministicGivenParameters) {
  Receiver r = Receiver::init(ReceiverConfig{}, 8);
  const auto x = r.forward_classify({2, 9});
  const auto y = r.forward_classify({2, 9});
  EXPECT_TRUE(x.first == y.first);
  EXPECT_TRUE(x.second == y.second);
}

TEST(ReceiverForward, BatchMatchesSingle) {
  ReceiverConfig c;
  c.end_marker = true;
  Receiver r = Receiver::init(c, 2);
  const std::vector<Message> batch{{1, 2}, {30, 0}, {7, 7}};
  Tape tape;
  const auto out = tape.value(r.forward(tape, batch));
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto [l1, l2] = r.forward_classify(batch[k]);
    const auto row = static_cast<Eigen::Index>(k);
    EXPECT_LT((out.row(row).head(31).transpose() - l1).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((out.row(row).tail(31).transpose() - l2).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ReceiverForward, InputErrors) {
  Receiver r = Receiver::init(ReceiverConfig{}, 1);
  EXPECT_THROW(r.forward_classify({31, 0}), InputError);
  EXPECT_THROW(r.forward_classify({0, -1}), InputError);
  EXPECT_THROW(r.loss_classify({0, 0}, {31, 0}), InputError);
  EXPECT_THROW(r.forward_regress({0, 0}), UsageError);
}

TEST(ReceiverRegress, ZeroHeadMseOnDiskTargets) {
  ReceiverConfig c;
  c.head = HeadKind::kRegress;
  c.n_values = 100;
  Receiver r = Receiver::init(c, 4);
  r.zero_head();
  EXPECT_EQ(r.forward_regress({5, 6}), (std::pair<double, double>{0.0, 0.0}));

  const auto pts = sample_unit_disk(20000, 6);
  std::vector<Message> msgs;
  std::vector<ContinuousTarget> targets;
  for (const auto& p : pts) {
    msgs.push_back(encode_coordinate(p, 100));
    targets.push_back(target_coordinates(p));
  }
  // E[x^2] = E[y^2] = 1/4 over the unit disk.
  EXPECT_NEAR(r.evaluate_regress(msgs, targets), 0.25, 0.01);
}

class FullPathGradient
    : public ::testing::TestWithParam<std::tuple<CellKind, HeadKind, bool>> {};

TEST_P(FullPathGradient, MatchesFiniteDifferences) {
  const auto [cell, head, marker] = GetParam();
  Receiver r = Receiver::init(small(cell, head, marker), 21);
  const std::vector<Message> msgs{{0, 1}, {4, 2}, {3, 3}, {2, 0}};
  const std::vector<DiscreteTarget> cls{{1, 2}, {0, 4}, {3, 3}, {4, 0}};
  const std::vector<ContinuousTarget> reg{{0.1, -0.2}, {0.5, 0.3}, {-0.7, 0.0}, {0.2, 0.2}};
  auto params = r.parameters();
  const double err = numeric::finite_difference_check<double>(
      [&](Tape& tape) {
        return head == HeadKind::kClassify ? r.loss_classify(tape, msgs, cls)
                                           : r.loss_regress(tape, msgs, reg);
      },
      params, {});
  EXPECT_LT(err, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(
    AllPaths, FullPathGradient,
    ::testing::Combine(::testing::Values(CellKind::kLstm, CellKind::kGru),
                       ::testing::Values(HeadKind::kClassify, HeadKind::kRegress),
                       ::testing::Bool()));

TEST(ReceiverScore, StrictAndPerOutputAccuracy) {
  Receiver z = Receiver::zeros(ReceiverConfig{});
  // All-zero logits: ties resolve to class 0.
  const std::vector<Message> msgs{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const std::vector<DiscreteTarget> t{{0, 0}, {0, 5}, {5, 0}, {5, 5}};
  const Accuracy a = z.predict_and_score(msgs, t);
  EXPECT_DOUBLE_EQ(a.strict, 0.25);
  EXPECT_DOUBLE_EQ(a.per_output, 0.5);
  const auto e = z.evaluate_classify(msgs, t);
  EXPECT_DOUBLE_EQ(e.accuracy.strict, 0.25);
  EXPECT_NEAR(e.loss, kTwoLn31, 1e-12);
}

TEST(ReceiverScore, ChanceLevelForZeroModel) {
  Receiver z = Receiver::zeros(ReceiverConfig{});
  std::vector<Message> msgs;
  std::vector<DiscreteTarget> t;
  for (const auto& i : enumerate_attval(31)) {
    msgs.push_back(encode_identity(i));
    t.push_back(target_identity(i));
  }
  EXPECT_LE(z.predict_and_score(msgs, t).strict, 0.01);
}

// A model whose head reads one saturated hidden unit per class gets every
// training example right.
TEST(ReceiverScore, SaturatedCorrectLogitsScorePerfectly) {
  ReceiverConfig c{CellKind::kLstm, 3, 2, 2, HeadKind::kClassify, false,
                   EmbeddingInit::kUniform};
  Receiver r = Receiver::zeros(c);
  // Bias alone decides: class 2 for the first output, 1 for the second.
  r.head_bias().values(0, 2) = 50.0;
  r.head_bias().values(0, 3 + 1) = 50.0;
  const std::vector<Message> msgs{{0, 1}, {2, 2}};
  const std::vector<DiscreteTarget> t{{2, 1}, {2, 1}};
  EXPECT_DOUBLE_EQ(r.predict_and_score(msgs, t).strict, 1.0);
  EXPECT_LT(r.loss_classify({0, 1}, {2, 1}), 1e-20);
}

TEST(ReceiverCheckpoint, RoundTripIsExact) {
  for (bool marker : {false, true}) {
    ReceiverConfig c;
    c.cell = CellKind::kGru;
    c.end_marker = marker;
    Receiver r = Receiver::init(c, 77);
    std::stringstream ss;
    r.save(ss);
    Receiver back = Receiver::load(ss);
    EXPECT_EQ(back.config().cell, CellKind::kGru);
    EXPECT_EQ(back.config().end_marker, marker);
    const auto a = r.parameters();
    const auto b = back.parameters();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_TRUE(a[k]->values == b[k]->values) << a[k]->name;
    }
  }
}

TEST(ReceiverCheckpoint, RejectsGarbage) {
  std::stringstream bad("not-a-checkpoint 1\n");
  EXPECT_THROW(Receiver::load(bad), InputError);
  std::stringstream version("sigbench-receiver 9\n");
  EXPECT_THROW(Receiver::load(version), InputError);
}

}  // namespace
}  // namespace sigbench
