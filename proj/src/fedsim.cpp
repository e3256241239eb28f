#include "qflab/fedsim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "qflab/errors.hpp"
#include "qflab/gradient_engine.hpp"

namespace qflab {

ClientState::ClientState(int client_id, std::vector<Sample> dataset, std::size_t batch_size,
                         std::uint64_t rng_seed)
    : id_(client_id), dataset_(std::move(dataset)), batch_size_(batch_size), rng_(rng_seed) {
  if (dataset_.empty()) throw ConfigError("client dataset must be non-empty");
  if (batch_size_ < 1 || batch_size_ > dataset_.size()) {
    throw ConfigError("client batch size must be in [1, N_i]");
  }
  order_.resize(dataset_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  rng_.shuffle(order_);
}

std::vector<std::size_t> ClientState::next_batch() {
  if (cursor_ >= order_.size()) {
    rng_.shuffle(order_);
    cursor_ = 0;
  }
  const std::size_t end = std::min(cursor_ + batch_size_, order_.size());
  std::vector<std::size_t> batch(order_.begin() + cursor_, order_.begin() + end);
  cursor_ = end;
  return batch;
}

ClientUpdate client_round(ClientState& client, const ModelSpec& model, const ParameterVector& theta) {
  ClientUpdate up;
  up.batch = client.next_batch();
  const GradientEngine engine(model, theta);
  up.gradient = GradientVector(model.param_count());
  for (std::size_t idx : up.batch) {
    const auto g = engine.cost_gradient(client.dataset()[idx]);
    for (std::size_t j = 0; j < g.size(); ++j) up.gradient[j] += g[j];
  }
  const double inv = 1.0 / static_cast<double>(up.batch.size());
  for (auto& v : up.gradient.values) v *= inv;
  return up;
}

void ServerState::validate() const {
  model.validate();
  if (theta.size() != model.param_count()) throw ConfigError("server theta length mismatch");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (weights.empty()) throw ConfigError("server needs at least one client weight");
  double s = 0.0;
  for (double p : weights) {
    if (!(p >= 0.0)) throw ConfigError("client weights must be non-negative");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ConfigError("client weights must sum to 1");
}

std::vector<double> dataset_weights(std::span<const ClientState> clients) {
  double total = 0.0;
  for (const auto& c : clients) total += static_cast<double>(c.dataset().size());
  std::vector<double> w;
  for (const auto& c : clients) w.push_back(static_cast<double>(c.dataset().size()) / total);
  return w;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

RoundRecord server_aggregate_update(ServerState& server, std::span<const GradientVector> gradients,
                                    Adam* adam) {
  if (gradients.size() != server.weights.size()) {
    throw ProtocolError("received " + std::to_string(gradients.size()) + " gradients for " +
                        std::to_string(server.weights.size()) + " clients");
  }
  const std::size_t d = server.theta.size();
  RoundRecord rec;
  rec.theta_before = server.theta;
  rec.aggregated = GradientVector(d);
  for (std::size_t i = 0; i < gradients.size(); ++i) {
    if (gradients[i].size() != d) {
      throw ProtocolError("client gradient " + std::to_string(i) + " has length " +
                          std::to_string(gradients[i].size()) + ", expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) rec.aggregated[j] += server.weights[i] * gradients[i][j];
  }
  if (adam) {
    adam->step(server.theta.values, rec.aggregated.values);
  } else {
    for (std::size_t j = 0; j < d; ++j) server.theta[j] -= server.learning_rate * rec.aggregated[j];
  }
  for (auto& t : server.theta.values) t = wrap_angle(t);
  rec.theta_after = server.theta;
  rec.client_gradients.assign(gradients.begin(), gradients.end());
  return rec;
}

double grid_mse(const ModelSpec& model, const ParameterVector& theta, std::span<const Sample> grid) {
  if (grid.empty()) return 0.0;
  const GradientEngine engine(model, theta);
  double s = 0.0;
  for (const auto& smp : grid) {
    const double r = smp.y - engine.output(smp.x);
    s += r * r;
  }
  return s / static_cast<double>(grid.size());
}

TrainingHistory run_training(ServerState& server, std::vector<ClientState>& clients,
                             const TrainingConfig& config, std::span<const Sample> training_grid,
                             const std::function<void(const RoundRecord&)>& on_round) {
  if (config.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (clients.size() != server.weights.size()) throw ConfigError("one weight per client required");
  server.validate();

  std::optional<Adam> adam;
  if (config.optimizer == ServerOptimizer::Adam) {
    AdamConfig a = config.adam;
    a.learning_rate = server.learning_rate;
    adam.emplace(server.theta.size(), a);
  }
  std::size_t rounds_per_epoch = 1;
  for (const auto& c : clients) rounds_per_epoch = std::max(rounds_per_epoch, c.batches_per_epoch());

  auto wants_snapshot = [&](int e) {
    return std::find(config.snapshot_epochs.begin(), config.snapshot_epochs.end(), e) !=
           config.snapshot_epochs.end();
  };

  TrainingHistory h;
  h.mse.push_back(grid_mse(server.model, server.theta, training_grid));
  if (wants_snapshot(0)) h.snapshots.push_back({0, server.theta});
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t r = 0; r < rounds_per_epoch; ++r) {
      std::vector<GradientVector> grads;
      std::vector<std::vector<std::size_t>> batches;
      std::vector<int> ids;
      for (auto& c : clients) {
        auto up = client_round(c, server.model, server.theta);
        grads.push_back(std::move(up.gradient));
        batches.push_back(std::move(up.batch));
        ids.push_back(c.client_id());
      }
      RoundRecord rec = server_aggregate_update(server, grads, adam ? &*adam : nullptr);
      rec.t = h.rounds++;
      rec.client_ids = std::move(ids);
      rec.batches = std::move(batches);
      if (on_round) on_round(rec);
    }
    const double mse = grid_mse(server.model, server.theta, training_grid);
    h.mse.push_back(mse);
    if (!std::isfinite(mse)) {
      h.diverged = true;
      h.diagnostic = "non-finite training MSE at epoch " + std::to_string(epoch);
      break;
    }
    if (wants_snapshot(epoch)) h.snapshots.push_back({epoch, server.theta});
  }
  return h;
}

std::vector<GradientMessage> messages_from_round(const RoundRecord& record, const ServerState& server) {
  std::vector<GradientMessage> out;
  for (std::size_t i = 0; i < record.client_gradients.size(); ++i) {
    GradientMessage m;
    m.t = record.t;
    m.client_id = i < record.client_ids.size() ? record.client_ids[i] : static_cast<int>(i);
    m.gradients = record.client_gradients[i];
    m.theta = record.theta_before;
    m.eta = server.learning_rate;
    m.p = server.weights[i];
    out.push_back(std::move(m));
  }
  return out;
}

std::string to_json_line(const GradientMessage& msg) {
  nlohmann::ordered_json j;
  j["t"] = msg.t;
  j["client_id"] = msg.client_id;
  j["gradients"] = msg.gradients.values;
  j["theta"] = msg.theta.values;
  j["eta"] = msg.eta;
  j["p"] = msg.p;
  if (msg.y) j["y"] = *msg.y;
  return j.dump();
}

GradientMessage parse_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("round record is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("round record must be a JSON object");
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ProtocolError(std::string("round record missing field '") + key + "'");
    return j.at(key);
  };
  GradientMessage m;
  try {
    m.t = need("t").get<std::size_t>();
    m.client_id = need("client_id").get<int>();
    m.gradients.values = need("gradients").get<std::vector<double>>();
    m.theta.values = need("theta").get<std::vector<double>>();
    m.eta = need("eta").get<double>();
    m.p = need("p").get<double>();
    if (j.contains("y")) m.y = j.at("y").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("round record field has wrong type: ") + e.what());
  }
  if (m.gradients.size() != m.theta.size()) {
    throw ProtocolError("round record gradients and theta differ in length");
  }
  return m;
}

void write_messages(std::ostream& out, std::span<const GradientMessage> messages) {
  for (const auto& m : messages) out << to_json_line(m) << '\n';
}

std::vector<GradientMessage> read_messages(std::istream& in) {
  std::vector<GradientMessage> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

}  // namespace qflab
