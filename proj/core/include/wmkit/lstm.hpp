#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wmkit/rng.hpp"

namespace wmkit {

/// Stacked LSTM with a sigmoid output map. Parameters live in one flat
/// vector so the optimizer and the finite-difference checks can treat the
/// network as a plain R^n function.
///
/// Per-layer layout inside the flat vector: W (4H x In), R (4H x H), b (4H),
/// column-major; then the output map (K x H_last) and its bias. Gate row
/// blocks are ordered input, forget, candidate, output.
class LstmNet {
 public:
  LstmNet(int input_size, std::vector<int> hidden_sizes, int output_size,
          double dropout_rate = 0.1);

  int input_size() const { return input_size_; }
  int output_size() const { return output_size_; }
  const std::vector<int>& hidden_sizes() const { return hidden_sizes_; }
  double dropout_rate() const { return dropout_rate_; }

  Eigen::VectorXd& params() { return theta_; }
  const Eigen::VectorXd& params() const { return theta_; }
  int param_count() const { return static_cast<int>(theta_.size()); }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases except
  /// forget-gate bias = 1.
  void init_params(Rng& rng);

  struct State {
    std::vector<Eigen::VectorXd> h, c;
  };
  State zero_state() const;

  /// Everything backward() needs, recorded by forward_sequence in training
  /// mode: per-timestep per-layer inputs, gate activations, cell states and
  /// dropout masks.
  struct Cache {
    int steps = 0;
    // [layer][t]
    std::vector<std::vector<Eigen::VectorXd>> x, gi, gf, gg, go, c, tanh_c, h;
    std::vector<std::vector<Eigen::VectorXd>> dropout_mask;  // layers 0..L-2
    std::vector<Eigen::VectorXd> output;  // sigmoid outputs, [t]
  };

  /// Single step, carrying recurrent state; no dropout (inference path).
  Eigen::VectorXd step(const Eigen::VectorXd& x, State& state) const;

  /// Runs a whole sequence from zero state. With training=true, dropout
  /// masks are sampled from rng and the cache is filled for backward().
  std::vector<Eigen::VectorXd> forward_sequence(
      const std::vector<Eigen::VectorXd>& inputs, bool training, Rng* rng,
      Cache* cache) const;

  /// Exact BPTT gradient of the recorded sequence given the gradient of the
  /// loss w.r.t. each sigmoid output.
  Eigen::VectorXd backward(const Cache& cache,
                           const std::vector<Eigen::VectorXd>& d_output) const;

 private:
  struct LayerView {
    Eigen::Map<const Eigen::MatrixXd> w, r;
    Eigen::Map<const Eigen::VectorXd> b;
  };
  struct LayerViewMut {
    Eigen::Map<Eigen::MatrixXd> w, r;
    Eigen::Map<Eigen::VectorXd> b;
  };
  LayerView layer(const Eigen::VectorXd& theta, int l) const;
  LayerViewMut layer_mut(Eigen::VectorXd& theta, int l) const;
  Eigen::Map<const Eigen::MatrixXd> out_w(const Eigen::VectorXd& theta) const;
  Eigen::Map<const Eigen::VectorXd> out_b(const Eigen::VectorXd& theta) const;

  int layer_input(int l) const {
    return l == 0 ? input_size_ : hidden_sizes_[l - 1];
  }

  int input_size_;
  std::vector<int> hidden_sizes_;
  int output_size_;
  double dropout_rate_;
  std::vector<int> layer_offsets_;
  int out_offset_ = 0;
  Eigen::VectorXd theta_;
};

/// Adam with bias correction over a flat parameter vector.
class AdamOptimizer {
 public:
  struct Config {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  AdamOptimizer(int param_count, Config config);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);

  const Config& config() const { return config_; }
  long long steps_taken() const { return t_; }

 private:
  Config config_;
  long long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace wmkit
