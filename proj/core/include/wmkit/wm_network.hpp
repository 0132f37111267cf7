#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "wmkit/autolabel.hpp"
#include "wmkit/lstm.hpp"
#include "wmkit/motion.hpp"

namespace wmkit {

constexpr int kHistorySteps = 4;
constexpr int kFutureSteps = 5;
constexpr int kInputFrames = kHistorySteps + 1 + kFutureSteps;

/// Relaxation-level predictor: stacked LSTM over windows of reference joint
/// positions, one sigmoid output per actuated joint.
struct WMNetwork {
  int joint_count = 23;
  LstmNet net;

  explicit WMNetwork(int k = 23,
                     std::vector<int> hidden_sizes = {256, 256, 64},
                     double dropout = 0.1)
      : joint_count(k),
        net(k * kInputFrames, std::move(hidden_sizes), k, dropout) {}

  int input_size() const { return joint_count * kInputFrames; }

  void save(const std::string& path) const;
  static WMNetwork load(const std::string& path);
};

/// x_t: [q_{t-4..t-1}, q_t, q_{t+d..t+d+4}], frame indices clamped to the
/// sequence bounds.
Eigen::VectorXd build_input(const MotionSequence& seq, int t, int offset);

/// Mean BCE over frames and joints; predictions clamped to
/// [1e-7, 1 - 1e-7].
double bce_loss(const std::vector<Eigen::VectorXd>& pred,
                const std::vector<Eigen::VectorXd>& target);

/// (1/K) sum_i sum_t (w_{t,i} - w_{t-1,i})^2; zero for fewer than 2 frames.
double smoothness_loss(const std::vector<Eigen::VectorXd>& pred);

double total_loss(const std::vector<Eigen::VectorXd>& pred,
                  const std::vector<Eigen::VectorXd>& target, double lambda);

/// Gradient of total_loss w.r.t. each prediction entry (for feeding BPTT).
std::vector<Eigen::VectorXd> total_loss_grad(
    const std::vector<Eigen::VectorXd>& pred,
    const std::vector<Eigen::VectorXd>& target, double lambda);

struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 64;
  double lambda_smooth = 0.1;
  int max_future_offset = 10;  // frames; delta ~ U(-t~, t~)
  int epochs = 30;
  int window_len = 48;  // frames per BPTT window
  std::uint64_t seed = 0;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
};

struct TrainResult {
  std::vector<double> loss_history;  // mean total loss per epoch
};

using LabeledSequence = std::pair<MotionSequence, WeightlessAnnotation>;

/// Mini-batch BPTT over fixed-length windows with seeded per-epoch shuffling;
/// the future offset delta is resampled per window per epoch. Fully
/// deterministic given the seed.
TrainResult train(WMNetwork& wm, const std::vector<LabeledSequence>& dataset,
                  const TrainConfig& config);

/// Deterministic full-sequence prediction (zero initial state, delta = 0).
std::vector<Eigen::VectorXd> predict_sequence(const WMNetwork& wm,
                                              const MotionSequence& seq);

struct EvalReport {
  double accuracy = 0.0;   // fraction correct at threshold 0.5
  double bce = 0.0;        // mean BCE
  double mean_tv = 0.0;    // mean per-joint total variation of w
};

EvalReport evaluate(const WMNetwork& wm,
                    const std::vector<LabeledSequence>& dataset);

/// Streaming inference for deployment: measured history/current joint
/// positions plus the reference future window; recurrent state carries
/// across calls.
class OnlineInferencer {
 public:
  explicit OnlineInferencer(const WMNetwork& wm)
      : wm_(wm), state_(wm.net.zero_state()) {}

  Eigen::VectorXd infer(const std::vector<Eigen::VectorXd>& q_history,
                        const Eigen::VectorXd& q_current,
                        const std::vector<Eigen::VectorXd>& q_ref_future);

  void reset() { state_ = wm_.net.zero_state(); }

 private:
  const WMNetwork& wm_;
  LstmNet::State state_;
};

}  // namespace wmkit
