#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qflab/adam.hpp"
#include "qflab/qmodel.hpp"
#include "qflab/rng.hpp"

namespace qflab {

// A federated client holding a private dataset. Batches are drawn without
// replacement from a seeded permutation that is reshuffled whenever it is
// exhausted, so every sample is visited once per local epoch.
class ClientState {
 public:
  ClientState(int client_id, std::vector<Sample> dataset, std::size_t batch_size,
              std::uint64_t rng_seed);

  int client_id() const { return id_; }
  const std::vector<Sample>& dataset() const { return dataset_; }
  std::size_t batch_size() const { return batch_size_; }
  std::size_t batches_per_epoch() const {
    return (dataset_.size() + batch_size_ - 1) / batch_size_;
  }

  std::vector<std::size_t> next_batch();

 private:
  int id_;
  std::vector<Sample> dataset_;
  std::size_t batch_size_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

struct ClientUpdate {
  GradientVector gradient;
  std::vector<std::size_t> batch;
};

// Draws the next batch and returns its mean cost gradient.
ClientUpdate client_round(ClientState& client, const ModelSpec& model, const ParameterVector& theta);

enum class ServerOptimizer { Sgd, Adam };

struct ServerState {
  ModelSpec model;
  ParameterVector theta;
  double learning_rate = 0.01;
  std::vector<double> weights;  // p_i, summing to one

  // Throws ConfigError unless weights are non-negative and sum to 1 within 1e-12.
  void validate() const;
};

// p_i = N_i / N.
std::vector<double> dataset_weights(std::span<const ClientState> clients);

struct RoundRecord {
  std::size_t t = 0;
  std::vector<int> client_ids;
  std::vector<GradientVector> client_gradients;
  GradientVector aggregated;
  ParameterVector theta_before;
  ParameterVector theta_after;
  std::vector<std::vector<std::size_t>> batches;
};

// theta <- wrap(theta - eta * sum_i p_i g_i). With `adam`, the aggregated
// gradient is fed to the optimizer instead of the plain step (eta is then the
// optimizer's learning rate).
RoundRecord server_aggregate_update(ServerState& server, std::span<const GradientVector> gradients,
                                    Adam* adam = nullptr);

double wrap_angle(double a);

struct TrainingConfig {
  int epochs = 1;
  ServerOptimizer optimizer = ServerOptimizer::Sgd;
  AdamConfig adam;  // learning_rate is taken from the server
  std::vector<int> snapshot_epochs;
};

struct ThetaSnapshot {
  int epoch = 0;
  ParameterVector theta;
};

struct TrainingHistory {
  std::vector<double> mse;  // entry e: MSE on the grid after e epochs
  std::vector<ThetaSnapshot> snapshots;
  std::size_t rounds = 0;
  bool diverged = false;
  std::string diagnostic;
};

double grid_mse(const ModelSpec& model, const ParameterVector& theta, std::span<const Sample> grid);

// Runs `epochs` epochs of max_i ceil(N_i / B_i) rounds each. `on_round` sees
// every round record before the next round starts.
TrainingHistory run_training(ServerState& server, std::vector<ClientState>& clients,
                             const TrainingConfig& config, std::span<const Sample> training_grid,
                             const std::function<void(const RoundRecord&)>& on_round = {});

// One line of the round-record stream: what the server receives from one client.
struct GradientMessage {
  std::size_t t = 0;
  int client_id = 0;
  GradientVector gradients;
  ParameterVector theta;
  double eta = 0.0;
  double p = 1.0;
  std::optional<double> y;  // label, present when the label is assumed leaked
};

std::vector<GradientMessage> messages_from_round(const RoundRecord& record, const ServerState& server);
std::string to_json_line(const GradientMessage& msg);
// Throws ProtocolError naming the offending field.
GradientMessage parse_json_line(const std::string& line);
void write_messages(std::ostream& out, std::span<const GradientMessage> messages);
std::vector<GradientMessage> read_messages(std::istream& in);

}  // namespace qflab
