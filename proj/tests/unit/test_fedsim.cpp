#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "qflab/errors.hpp"
#include "qflab/fedsim.hpp"

using namespace qflab;

namespace {

std::vector<Sample> line_data(std::size_t count, std::size_t offset = 0) {
  std::vector<Sample> d;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = static_cast<double>(i + offset) / 50.0;
    d.push_back({{x}, 0.5 * std::cos(2 * std::numbers::pi * x)});
  }
  return d;
}

ServerState make_server(std::size_t clients, std::uint64_t seed = 1) {
  ServerState s;
  s.model = make_model(1, 1, 2);
  Rng rng(seed);
  s.theta = random_parameters(s.model.ansatz, rng);
  s.weights.assign(clients, 1.0 / static_cast<double>(clients));
  return s;
}

}  // namespace

TEST(Client, BatchesCoverDatasetEachEpoch) {
  ClientState c(0, line_data(10), 3, 7);
  EXPECT_EQ(c.batches_per_epoch(), 4u);
  for (int epoch = 0; epoch < 3; ++epoch) {
    std::multiset<std::size_t> seen;
    for (std::size_t b = 0; b < c.batches_per_epoch(); ++b) {
      const auto batch = c.next_batch();
      EXPECT_EQ(batch.size(), b + 1 < c.batches_per_epoch() ? 3u : 1u);
      seen.insert(batch.begin(), batch.end());
    }
    EXPECT_EQ(seen.size(), 10u);
    EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), 10u);
  }
}

TEST(Client, ReshufflesBetweenEpochs) {
  ClientState c(0, line_data(20), 20, 3);
  const auto first = c.next_batch();
  bool differs = false;
  for (int e = 0; e < 5 && !differs; ++e) differs = c.next_batch() != first;
  EXPECT_TRUE(differs);
}

TEST(Client, Validation) {
  EXPECT_THROW(ClientState(0, {}, 1, 0), ConfigError);
  EXPECT_THROW(ClientState(0, line_data(3), 0, 0), ConfigError);
  EXPECT_THROW(ClientState(0, line_data(3), 4, 0), ConfigError);
}

TEST(Client, RoundGradientIsBatchMean) {
  auto server = make_server(1);
  ClientState c(0, line_data(6), 2, 11);
  ClientState shadow(0, line_data(6), 2, 11);
  const auto up = client_round(c, server.model, server.theta);
  const auto batch = shadow.next_batch();
  EXPECT_EQ(up.batch, batch);
  std::vector<Sample> samples;
  for (auto i : batch) samples.push_back(shadow.dataset()[i]);
  const auto ref = batch_cost_gradient(server.model, samples, server.theta);
  for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(up.gradient[j], ref[j], 1e-12);
}

TEST(Server, WeightsValidated) {
  auto s = make_server(2);
  s.weights = {0.5, 0.6};
  EXPECT_THROW(s.validate(), ConfigError);
  s.weights = {1.5, -0.5};
  EXPECT_THROW(s.validate(), ConfigError);
  s.weights = {0.25, 0.75};
  EXPECT_NO_THROW(s.validate());
}

TEST(Server, DatasetWeights) {
  std::vector<ClientState> cs;
  cs.emplace_back(0, line_data(10), 1, 0);
  cs.emplace_back(1, line_data(30), 1, 0);
  const auto w = dataset_weights(cs);
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);
}

TEST(Server, AggregateAndSgdUpdate) {
  auto s = make_server(2);
  s.learning_rate = 0.1;
  s.weights = {0.25, 0.75};
  const auto before = s.theta;
  const std::size_t d = before.size();
  std::vector<GradientVector> g{GradientVector(std::vector<double>(d, 1.0)),
                                GradientVector(std::vector<double>(d, -1.0))};
  const auto rec = server_aggregate_update(s, g);
  for (std::size_t j = 0; j < d; ++j) {
    EXPECT_DOUBLE_EQ(rec.aggregated[j], -0.5);
    EXPECT_NEAR(s.theta[j], wrap_angle(before[j] + 0.05), 1e-15);
    EXPECT_GE(s.theta[j], 0.0);
    EXPECT_LT(s.theta[j], 2 * std::numbers::pi);
  }
  EXPECT_EQ(rec.theta_before.values, before.values);
  EXPECT_EQ(rec.theta_after.values, s.theta.values);
}

TEST(Server, ProtocolMismatch) {
  auto s = make_server(2);
  const std::size_t d = s.theta.size();
  std::vector<GradientVector> one{GradientVector(d)};
  EXPECT_THROW(server_aggregate_update(s, one), ProtocolError);
  std::vector<GradientVector> bad{GradientVector(d), GradientVector(d + 1)};
  EXPECT_THROW(server_aggregate_update(s, bad), ProtocolError);
}

TEST(Server, WrapAngle) {
  const double tp = 2 * std::numbers::pi;
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(wrap_angle(-0.5), tp - 0.5, 1e-15);
  EXPECT_NEAR(wrap_angle(tp + 0.25), 0.25, 1e-14);
  EXPECT_EQ(wrap_angle(tp), 0.0);
  for (double a = -20; a < 20; a += 0.37) {
    const double w = wrap_angle(a);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, tp);
  }
}

TEST(Messages, JsonRoundTrip) {
  GradientMessage m;
  m.t = 7;
  m.client_id = 3;
  m.gradients = GradientVector(std::vector<double>{0.1, -2.5e-17, 3.0});
  m.theta = ParameterVector(std::vector<double>{1.0, 2.0, 0.1 + 0.2});
  m.eta = 0.01;
  m.p = 0.5;
  auto back = parse_json_line(to_json_line(m));
  EXPECT_EQ(back.t, 7u);
  EXPECT_EQ(back.client_id, 3);
  EXPECT_EQ(back.gradients.values, m.gradients.values);
  EXPECT_EQ(back.theta.values, m.theta.values);
  EXPECT_EQ(back.eta, 0.01);
  EXPECT_EQ(back.p, 0.5);
  EXPECT_FALSE(back.y.has_value());
  m.y = -1.0;
  back = parse_json_line(to_json_line(m));
  ASSERT_TRUE(back.y.has_value());
  EXPECT_EQ(*back.y, -1.0);

  std::stringstream ss;
  std::vector<GradientMessage> ms{m, m};
  write_messages(ss, ms);
  EXPECT_EQ(read_messages(ss).size(), 2u);
}

TEST(Messages, MissingFieldNamed) {
  try {
    parse_json_line(R"({"t":0,"client_id":0,"theta":[1],"eta":0.1,"p":1})");
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("gradients"), std::string::npos);
  }
  EXPECT_THROW(parse_json_line("not json"), ProtocolError);
  EXPECT_THROW(parse_json_line(R"({"t":0,"client_id":0,"gradients":[1,2],"theta":[1],"eta":0.1,"p":1})"),
               ProtocolError);
  EXPECT_THROW(parse_json_line(R"({"t":"x","client_id":0,"gradients":[1],"theta":[1],"eta":0.1,"p":1})"),
               ProtocolError);
}

TEST(Training, ZeroEpochs) {
  auto s = make_server(1);
  std::vector<ClientState> cs;
  cs.emplace_back(0, line_data(5), 5, 0);
  const auto grid = line_data(5);
  TrainingConfig cfg;
  cfg.epochs = 0;
  cfg.snapshot_epochs = {0};
  const auto h = run_training(s, cs, cfg, grid);
  EXPECT_EQ(h.mse.size(), 1u);
  EXPECT_EQ(h.rounds, 0u);
  ASSERT_EQ(h.snapshots.size(), 1u);
  cfg.epochs = -1;
  EXPECT_THROW(run_training(s, cs, cfg, grid), ConfigError);
}

TEST(Training, RoundsAndRecords) {
  auto s = make_server(2);
  std::vector<ClientState> cs;
  cs.emplace_back(0, line_data(10), 3, 1);
  cs.emplace_back(1, line_data(4, 10), 3, 2);
  TrainingConfig cfg;
  cfg.epochs = 2;
  std::vector<RoundRecord> recs;
  const auto h = run_training(s, cs, cfg, line_data(14), [&](const RoundRecord& r) { recs.push_back(r); });
  EXPECT_EQ(h.rounds, 8u);  // max(ceil(10/3), ceil(4/3)) = 4 rounds per epoch
  ASSERT_EQ(recs.size(), 8u);
  for (std::size_t t = 0; t < recs.size(); ++t) {
    EXPECT_EQ(recs[t].t, t);
    if (t > 0) EXPECT_EQ(recs[t].theta_before.values, recs[t - 1].theta_after.values);
    const auto msgs = messages_from_round(recs[t], s);
    ASSERT_EQ(msgs.size(), 2u);
    EXPECT_EQ(msgs[1].client_id, 1);
    EXPECT_EQ(msgs[0].theta.values, recs[t].theta_before.values);
  }
  EXPECT_EQ(h.mse.size(), 3u);
}

TEST(Training, Deterministic) {
  auto run = [] {
    auto s = make_server(2, 5);
    s.learning_rate = 0.05;
    std::vector<ClientState> cs;
    cs.emplace_back(0, line_data(10), 2, 1);
    cs.emplace_back(1, line_data(10, 10), 2, 2);
    TrainingConfig cfg;
    cfg.epochs = 5;
    cfg.optimizer = ServerOptimizer::Adam;
    cfg.snapshot_epochs = {0, 5};
    return run_training(s, cs, cfg, line_data(20));
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.mse, b.mse);
  ASSERT_EQ(a.snapshots.size(), 2u);
  EXPECT_EQ(a.snapshots[1].theta.values, b.snapshots[1].theta.values);
  EXPECT_LT(a.mse.back(), a.mse.front());
}
