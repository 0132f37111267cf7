#include "wmkit/wm_network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace wmkit {

namespace {

constexpr double kProbClamp = 1e-7;
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kCheckpointMagic[5] = "WMKT";

}  // namespace

Eigen::VectorXd build_input(const MotionSequence& seq, int t, int offset) {
  const int n = seq.frame_count();
  if (n == 0) throw std::invalid_argument("empty sequence");
  const int k = static_cast<int>(seq.frames[0].q.size());
  Eigen::VectorXd x(k * kInputFrames);
  int slot = 0;
  auto put = [&](int frame) {
    frame = std::clamp(frame, 0, n - 1);
    for (int i = 0; i < k; ++i) x[slot * k + i] = seq.frames[frame].q[i];
    ++slot;
  };
  for (int h = kHistorySteps; h >= 1; --h) put(t - h);
  put(t);
  for (int f = 0; f < kFutureSteps; ++f) put(t + offset + f);
  return x;
}

double bce_loss(const std::vector<Eigen::VectorXd>& pred,
                const std::vector<Eigen::VectorXd>& target) {
  if (pred.size() != target.size())
    throw std::invalid_argument("pred/target length mismatch");
  double sum = 0.0;
  long long count = 0;
  for (size_t t = 0; t < pred.size(); ++t) {
    if (pred[t].size() != target[t].size())
      throw std::invalid_argument("pred/target shape mismatch");
    for (int i = 0; i < pred[t].size(); ++i) {
      const double p =
          std::clamp(pred[t][i], kProbClamp, 1.0 - kProbClamp);
      const double y = target[t][i];
      sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

double smoothness_loss(const std::vector<Eigen::VectorXd>& pred) {
  if (pred.size() < 2) return 0.0;
  const int k = static_cast<int>(pred[0].size());
  double sum = 0.0;
  for (size_t t = 1; t < pred.size(); ++t)
    sum += (pred[t] - pred[t - 1]).squaredNorm();
  return sum / k;
}

double total_loss(const std::vector<Eigen::VectorXd>& pred,
                  const std::vector<Eigen::VectorXd>& target, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  return bce_loss(pred, target) + lambda * smoothness_loss(pred);
}

std::vector<Eigen::VectorXd> total_loss_grad(
    const std::vector<Eigen::VectorXd>& pred,
    const std::vector<Eigen::VectorXd>& target, double lambda) {
  const int steps = static_cast<int>(pred.size());
  const int k = steps > 0 ? static_cast<int>(pred[0].size()) : 0;
  const double inv_count = steps > 0 ? 1.0 / (double(steps) * k) : 0.0;
  std::vector<Eigen::VectorXd> grad(steps);
  for (int t = 0; t < steps; ++t) {
    grad[t] = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i) {
      const double p = pred[t][i];
      // The clamp flattens BCE outside the band, so the gradient there is 0.
      if (p > kProbClamp && p < 1.0 - kProbClamp)
        grad[t][i] =
            inv_count * (-target[t][i] / p + (1.0 - target[t][i]) / (1.0 - p));
    }
    if (t >= 1) grad[t] += (2.0 * lambda / k) * (pred[t] - pred[t - 1]);
    if (t + 1 < steps) grad[t] -= (2.0 * lambda / k) * (pred[t + 1] - pred[t]);
  }
  return grad;
}

namespace {

struct Window {
  int seq = 0;
  int start = 0;
  int len = 0;
};

// The network outputs the relaxation level w (0 = weightless), so a
// weightless label of 1 trains toward w = 0.
std::vector<Eigen::VectorXd> window_targets(const WeightlessAnnotation& ann,
                                            const Window& w, int k) {
  std::vector<Eigen::VectorXd> targets(w.len);
  for (int t = 0; t < w.len; ++t) {
    targets[t] = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i)
      targets[t][i] = 1.0 - ann.labels[w.start + t][i];
  }
  return targets;
}

}  // namespace

TrainResult train(WMNetwork& wm, const std::vector<LabeledSequence>& dataset,
                  const TrainConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  const int k = wm.joint_count;
  for (const auto& [seq, ann] : dataset) {
    seq.validate(k);
    if (static_cast<int>(ann.labels.size()) != seq.frame_count())
      throw std::invalid_argument("annotation/sequence length mismatch");
  }

  std::vector<Window> windows;
  for (int s = 0; s < static_cast<int>(dataset.size()); ++s) {
    const int n = dataset[s].first.frame_count();
    const int len = std::min(config.window_len, n);
    for (int start = 0; start + len <= n; start += len)
      windows.push_back({s, start, len});
    if (n % len != 0) windows.push_back({s, n - len, len});
  }

  Rng init_rng(derive_seed(config.seed, "wm-init"));
  wm.net.init_params(init_rng);
  Rng train_rng(derive_seed(config.seed, "wm-train"));

  AdamOptimizer adam(wm.net.param_count(),
                     {config.lr, config.beta1, config.beta2, config.adam_eps});

  TrainResult result;
  std::vector<int> order(windows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with the project Rng keeps the shuffle reproducible.
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[train_rng.uniform_int(0, i)]);

    double epoch_loss = 0.0;
    int seen = 0;
    for (size_t b = 0; b < order.size(); b += config.batch_size) {
      const size_t end = std::min(b + config.batch_size, order.size());
      Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(wm.net.param_count());
      for (size_t wi = b; wi < end; ++wi) {
        const Window& w = windows[order[wi]];
        const auto& [seq, ann] = dataset[w.seq];
        const int delta = static_cast<int>(train_rng.uniform_int(
            -config.max_future_offset, config.max_future_offset));
        std::vector<Eigen::VectorXd> inputs(w.len);
        for (int t = 0; t < w.len; ++t)
          inputs[t] = build_input(seq, w.start + t, delta);
        const auto targets = window_targets(ann, w, k);

        LstmNet::Cache cache;
        const auto pred =
            wm.net.forward_sequence(inputs, true, &train_rng, &cache);
        epoch_loss += total_loss(pred, targets, config.lambda_smooth);
        ++seen;
        grad_sum += wm.net.backward(
            cache, total_loss_grad(pred, targets, config.lambda_smooth));
      }
      grad_sum /= double(end - b);
      adam.step(wm.net.params(), grad_sum);
    }
    result.loss_history.push_back(epoch_loss / seen);
  }
  return result;
}

std::vector<Eigen::VectorXd> predict_sequence(const WMNetwork& wm,
                                              const MotionSequence& seq) {
  std::vector<Eigen::VectorXd> inputs(seq.frame_count());
  for (int t = 0; t < seq.frame_count(); ++t)
    inputs[t] = build_input(seq, t, 0);
  return wm.net.forward_sequence(inputs, false, nullptr, nullptr);
}

EvalReport evaluate(const WMNetwork& wm,
                    const std::vector<LabeledSequence>& dataset) {
  EvalReport report;
  long long correct = 0, total = 0;
  double bce_sum = 0.0, tv_sum = 0.0;
  for (const auto& [seq, ann] : dataset) {
    const auto pred = predict_sequence(wm, seq);
    std::vector<Eigen::VectorXd> targets(pred.size());
    for (size_t t = 0; t < pred.size(); ++t) {
      targets[t] = Eigen::VectorXd::Zero(wm.joint_count);
      for (int i = 0; i < wm.joint_count; ++i) {
        targets[t][i] = 1.0 - ann.labels[t][i];
        correct += (pred[t][i] < 0.5) == (ann.labels[t][i] != 0);
        ++total;
      }
      if (t >= 1) tv_sum += (pred[t] - pred[t - 1]).cwiseAbs().sum();
    }
    bce_sum += bce_loss(pred, targets);
  }
  report.accuracy = total > 0 ? double(correct) / total : 0.0;
  report.bce = dataset.empty() ? 0.0 : bce_sum / dataset.size();
  report.mean_tv = dataset.empty()
                       ? 0.0
                       : tv_sum / (double(dataset.size()) * wm.joint_count);
  return report;
}

Eigen::VectorXd OnlineInferencer::infer(
    const std::vector<Eigen::VectorXd>& q_history,
    const Eigen::VectorXd& q_current,
    const std::vector<Eigen::VectorXd>& q_ref_future) {
  if (static_cast<int>(q_history.size()) != kHistorySteps ||
      static_cast<int>(q_ref_future.size()) != kFutureSteps)
    throw std::invalid_argument("history/future window length mismatch");
  const int k = wm_.joint_count;
  Eigen::VectorXd x(wm_.input_size());
  for (int h = 0; h < kHistorySteps; ++h) x.segment(h * k, k) = q_history[h];
  x.segment(kHistorySteps * k, k) = q_current;
  for (int f = 0; f < kFutureSteps; ++f)
    x.segment((kHistorySteps + 1 + f) * k, k) = q_ref_future[f];
  return wm_.net.step(x, state_);
}

void WMNetwork::save(const std::string& path) const {
  nlohmann::ordered_json header;
  header["format_version"] = kCheckpointVersion;
  header["joint_count"] = joint_count;
  header["hidden_sizes"] = net.hidden_sizes();
  header["dropout"] = net.dropout_rate();
  header["param_count"] = net.param_count();
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(kCheckpointMagic, 4);
  const std::uint32_t ver = kCheckpointVersion;
  const std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
  out.write(reinterpret_cast<const char*>(&ver), 4);
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(hs.data(), hs.size());
  out.write(reinterpret_cast<const char*>(net.params().data()),
            net.param_count() * sizeof(double));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

WMNetwork WMNetwork::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[4];
  std::uint32_t ver = 0, hlen = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&ver), 4);
  in.read(reinterpret_cast<char*>(&hlen), 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw std::runtime_error("'" + path + "' is not a WM checkpoint");
  if (ver != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(ver));
  std::string hs(hlen, '\0');
  in.read(hs.data(), hlen);
  const auto header = nlohmann::json::parse(hs);
  WMNetwork wm(header.at("joint_count").get<int>(),
               header.at("hidden_sizes").get<std::vector<int>>(),
               header.at("dropout").get<double>());
  if (header.at("param_count").get<int>() != wm.net.param_count())
    throw std::runtime_error("checkpoint parameter count mismatch");
  in.read(reinterpret_cast<char*>(wm.net.params().data()),
          wm.net.param_count() * sizeof(double));
  if (!in) throw std::runtime_error("truncated checkpoint '" + path + "'");
  return wm;
}

}  // namespace wmkit
