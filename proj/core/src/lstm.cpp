#include "wmkit/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace wmkit {

namespace {

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

}  // namespace

LstmNet::LstmNet(int input_size, std::vector<int> hidden_sizes,
                 int output_size, double dropout_rate)
    : input_size_(input_size),
      hidden_sizes_(std::move(hidden_sizes)),
      output_size_(output_size),
      dropout_rate_(dropout_rate) {
  if (input_size_ < 1 || output_size_ < 1 || hidden_sizes_.empty())
    throw std::invalid_argument("bad LSTM dimensions");
  int off = 0;
  for (size_t l = 0; l < hidden_sizes_.size(); ++l) {
    layer_offsets_.push_back(off);
    const int h = hidden_sizes_[l];
    const int in = layer_input(static_cast<int>(l));
    off += 4 * h * in + 4 * h * h + 4 * h;
  }
  out_offset_ = off;
  off += output_size_ * hidden_sizes_.back() + output_size_;
  theta_ = Eigen::VectorXd::Zero(off);
}

LstmNet::LayerView LstmNet::layer(const Eigen::VectorXd& theta, int l) const {
  const int h = hidden_sizes_[l];
  const int in = layer_input(l);
  const double* p = theta.data() + layer_offsets_[l];
  return {Eigen::Map<const Eigen::MatrixXd>(p, 4 * h, in),
          Eigen::Map<const Eigen::MatrixXd>(p + 4 * h * in, 4 * h, h),
          Eigen::Map<const Eigen::VectorXd>(p + 4 * h * in + 4 * h * h, 4 * h)};
}

LstmNet::LayerViewMut LstmNet::layer_mut(Eigen::VectorXd& theta, int l) const {
  const int h = hidden_sizes_[l];
  const int in = layer_input(l);
  double* p = theta.data() + layer_offsets_[l];
  return {Eigen::Map<Eigen::MatrixXd>(p, 4 * h, in),
          Eigen::Map<Eigen::MatrixXd>(p + 4 * h * in, 4 * h, h),
          Eigen::Map<Eigen::VectorXd>(p + 4 * h * in + 4 * h * h, 4 * h)};
}

Eigen::Map<const Eigen::MatrixXd> LstmNet::out_w(
    const Eigen::VectorXd& theta) const {
  return {theta.data() + out_offset_, output_size_, hidden_sizes_.back()};
}

Eigen::Map<const Eigen::VectorXd> LstmNet::out_b(
    const Eigen::VectorXd& theta) const {
  return {theta.data() + out_offset_ + output_size_ * hidden_sizes_.back(),
          output_size_};
}

void LstmNet::init_params(Rng& rng) {
  theta_.setZero();
  const int layers = static_cast<int>(hidden_sizes_.size());
  for (int l = 0; l < layers; ++l) {
    auto v = layer_mut(theta_, l);
    const int h = hidden_sizes_[l];
    const double bound_w = 1.0 / std::sqrt(double(layer_input(l)));
    const double bound_r = 1.0 / std::sqrt(double(h));
    for (int j = 0; j < v.w.cols(); ++j)
      for (int i = 0; i < v.w.rows(); ++i)
        v.w(i, j) = rng.uniform(-bound_w, bound_w);
    for (int j = 0; j < v.r.cols(); ++j)
      for (int i = 0; i < v.r.rows(); ++i)
        v.r(i, j) = rng.uniform(-bound_r, bound_r);
    v.b.setZero();
    v.b.segment(h, h).setOnes();  // forget-gate bias
  }
  const int h_last = hidden_sizes_.back();
  const double bound = 1.0 / std::sqrt(double(h_last));
  double* p = theta_.data() + out_offset_;
  for (int i = 0; i < output_size_ * h_last; ++i)
    p[i] = rng.uniform(-bound, bound);
}

LstmNet::State LstmNet::zero_state() const {
  State s;
  for (int h : hidden_sizes_) {
    s.h.push_back(Eigen::VectorXd::Zero(h));
    s.c.push_back(Eigen::VectorXd::Zero(h));
  }
  return s;
}

Eigen::VectorXd LstmNet::step(const Eigen::VectorXd& x, State& state) const {
  if (x.size() != input_size_) throw std::invalid_argument("bad input size");
  if (state.h.size() != hidden_sizes_.size())
    throw std::invalid_argument("state does not match network");
  Eigen::VectorXd in = x;
  const int layers = static_cast<int>(hidden_sizes_.size());
  for (int l = 0; l < layers; ++l) {
    const int h = hidden_sizes_[l];
    auto v = layer(theta_, l);
    const Eigen::VectorXd z = v.w * in + v.r * state.h[l] + v.b;
    const Eigen::ArrayXd gi = sigmoid(z.segment(0, h).array());
    const Eigen::ArrayXd gf = sigmoid(z.segment(h, h).array());
    const Eigen::ArrayXd gg = z.segment(2 * h, h).array().tanh();
    const Eigen::ArrayXd go = sigmoid(z.segment(3 * h, h).array());
    state.c[l] = (gf * state.c[l].array() + gi * gg).matrix();
    state.h[l] = (go * state.c[l].array().tanh()).matrix();
    in = state.h[l];
  }
  return sigmoid((out_w(theta_) * in + out_b(theta_)).array()).matrix();
}

std::vector<Eigen::VectorXd> LstmNet::forward_sequence(
    const std::vector<Eigen::VectorXd>& inputs, bool training, Rng* rng,
    Cache* cache) const {
  const int layers = static_cast<int>(hidden_sizes_.size());
  const int steps = static_cast<int>(inputs.size());
  if (training && (!rng || !cache))
    throw std::invalid_argument("training forward needs rng and cache");
  if (cache) {
    cache->steps = steps;
    auto alloc = [&](auto& v) { v.assign(layers, {}); };
    alloc(cache->x);
    alloc(cache->gi);
    alloc(cache->gf);
    alloc(cache->gg);
    alloc(cache->go);
    alloc(cache->c);
    alloc(cache->tanh_c);
    alloc(cache->h);
    cache->dropout_mask.assign(layers > 0 ? layers - 1 : 0, {});
    cache->output.clear();
  }

  State state = zero_state();
  std::vector<Eigen::VectorXd> outputs;
  outputs.reserve(steps);
  const double keep = 1.0 - dropout_rate_;
  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd in = inputs[t];
    if (in.size() != input_size_) throw std::invalid_argument("bad input size");
    for (int l = 0; l < layers; ++l) {
      const int h = hidden_sizes_[l];
      auto v = layer(theta_, l);
      const Eigen::VectorXd z = v.w * in + v.r * state.h[l] + v.b;
      const Eigen::ArrayXd gi = sigmoid(z.segment(0, h).array());
      const Eigen::ArrayXd gf = sigmoid(z.segment(h, h).array());
      const Eigen::ArrayXd gg = z.segment(2 * h, h).array().tanh();
      const Eigen::ArrayXd go = sigmoid(z.segment(3 * h, h).array());
      const Eigen::ArrayXd c = gf * state.c[l].array() + gi * gg;
      const Eigen::ArrayXd tc = c.tanh();
      if (cache) {
        cache->x[l].push_back(in);
        cache->gi[l].push_back(gi.matrix());
        cache->gf[l].push_back(gf.matrix());
        cache->gg[l].push_back(gg.matrix());
        cache->go[l].push_back(go.matrix());
        cache->c[l].push_back(c.matrix());
        cache->tanh_c[l].push_back(tc.matrix());
        cache->h[l].push_back(state.h[l]);  // h_{t-1}, for the R gradient
      }
      state.c[l] = c.matrix();
      state.h[l] = (go * tc).matrix();
      in = state.h[l];
      if (l + 1 < layers) {
        if (training && dropout_rate_ > 0.0) {
          // Inverted dropout on inter-layer activations.
          Eigen::VectorXd mask(h);
          for (int i = 0; i < h; ++i)
            mask[i] = rng->uniform() < dropout_rate_ ? 0.0 : 1.0 / keep;
          in = in.cwiseProduct(mask);
          cache->dropout_mask[l].push_back(mask);
        } else if (cache) {
          cache->dropout_mask[l].push_back(Eigen::VectorXd::Ones(h));
        }
      }
    }
    Eigen::VectorXd w =
        sigmoid((out_w(theta_) * in + out_b(theta_)).array()).matrix();
    if (cache) cache->output.push_back(w);
    outputs.push_back(std::move(w));
  }
  return outputs;
}

Eigen::VectorXd LstmNet::backward(
    const Cache& cache, const std::vector<Eigen::VectorXd>& d_output) const {
  const int layers = static_cast<int>(hidden_sizes_.size());
  const int steps = cache.steps;
  if (static_cast<int>(d_output.size()) != steps)
    throw std::invalid_argument("d_output/cache length mismatch");

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_.size());
  const int h_last = hidden_sizes_.back();
  Eigen::Map<Eigen::MatrixXd> g_out_w(grad.data() + out_offset_, output_size_,
                                      h_last);
  Eigen::Map<Eigen::VectorXd> g_out_b(
      grad.data() + out_offset_ + output_size_ * h_last, output_size_);

  // Output map first; collect dL/dh for the top LSTM layer at every step.
  const auto w_o = out_w(theta_);
  std::vector<Eigen::VectorXd> dh_top(steps);
  for (int t = 0; t < steps; ++t) {
    const Eigen::ArrayXd p = cache.output[t].array();
    // d_output is w.r.t. the sigmoid output; convert to pre-activation.
    const Eigen::VectorXd dz = (d_output[t].array() * p * (1.0 - p)).matrix();
    const Eigen::ArrayXd go = cache.go[layers - 1][t].array();
    const Eigen::VectorXd h_t =
        (go * cache.tanh_c[layers - 1][t].array()).matrix();
    g_out_w += dz * h_t.transpose();
    g_out_b += dz;
    dh_top[t] = w_o.transpose() * dz;
  }

  // Layer-by-layer BPTT from the top; dx of layer l feeds dh of layer l-1
  // through the dropout mask.
  std::vector<Eigen::VectorXd> dh_in = std::move(dh_top);
  for (int l = layers - 1; l >= 0; --l) {
    const int h = hidden_sizes_[l];
    const int in_size = layer_input(l);
    auto v = layer(theta_, l);
    double* gp = grad.data() + layer_offsets_[l];
    Eigen::Map<Eigen::MatrixXd> g_w(gp, 4 * h, in_size);
    Eigen::Map<Eigen::MatrixXd> g_r(gp + 4 * h * in_size, 4 * h, h);
    Eigen::Map<Eigen::VectorXd> g_b(gp + 4 * h * in_size + 4 * h * h, 4 * h);

    std::vector<Eigen::VectorXd> dx(steps);
    Eigen::VectorXd dh_rec = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);
    for (int t = steps - 1; t >= 0; --t) {
      const Eigen::ArrayXd dh = dh_in[t].array() + dh_rec.array();
      const Eigen::ArrayXd gi = cache.gi[l][t].array();
      const Eigen::ArrayXd gf = cache.gf[l][t].array();
      const Eigen::ArrayXd gg = cache.gg[l][t].array();
      const Eigen::ArrayXd go = cache.go[l][t].array();
      const Eigen::ArrayXd tc = cache.tanh_c[l][t].array();
      const Eigen::ArrayXd c_prev =
          t > 0 ? cache.c[l][t - 1].array()
                : Eigen::ArrayXd(Eigen::ArrayXd::Zero(h));

      const Eigen::ArrayXd dc_t = dc.array() + dh * go * (1.0 - tc * tc);
      const Eigen::ArrayXd dzo = dh * tc * go * (1.0 - go);
      const Eigen::ArrayXd dzi = dc_t * gg * gi * (1.0 - gi);
      const Eigen::ArrayXd dzf = dc_t * c_prev * gf * (1.0 - gf);
      const Eigen::ArrayXd dzg = dc_t * gi * (1.0 - gg * gg);
      dc = (dc_t * gf).matrix();

      Eigen::VectorXd dz(4 * h);
      dz.segment(0, h) = dzi.matrix();
      dz.segment(h, h) = dzf.matrix();
      dz.segment(2 * h, h) = dzg.matrix();
      dz.segment(3 * h, h) = dzo.matrix();

      g_w += dz * cache.x[l][t].transpose();
      g_r += dz * cache.h[l][t].transpose();  // cached h_{t-1}
      g_b += dz;
      dx[t] = v.w.transpose() * dz;
      dh_rec = v.r.transpose() * dz;
    }
    if (l > 0) {
      for (int t = 0; t < steps; ++t)
        dh_in[t] = dx[t].cwiseProduct(cache.dropout_mask[l - 1][t]);
    }
  }
  return grad;
}

AdamOptimizer::AdamOptimizer(int param_count, Config config)
    : config_(config),
      m_(Eigen::VectorXd::Zero(param_count)),
      v_(Eigen::VectorXd::Zero(param_count)) {}

void AdamOptimizer::step(Eigen::VectorXd& params,
                         const Eigen::VectorXd& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("optimizer/parameter size mismatch");
  ++t_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grads;
  v_ = config_.beta2 * v_.array().matrix() +
       (1.0 - config_.beta2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(config_.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, double(t_));
  params.array() -= config_.lr * (m_.array() / bc1) /
                    ((v_.array() / bc2).sqrt() + config_.eps);
}

}  // namespace wmkit
