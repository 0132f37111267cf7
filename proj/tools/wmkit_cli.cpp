// Command-line front end for the motion-relaxation pipeline: smoothing,
// auto-labeling, relaxation-network training/evaluation, reward and metric
// reports, domain-randomization sampling and the planar simulator demo.
//
// Every subcommand is deterministic given (inputs, --seed) and writes only
// under --out. Exit codes: 0 success, 1 data error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wmkit/autolabel.hpp"
#include "wmkit/io.hpp"
#include "wmkit/metrics.hpp"
#include "wmkit/minisim.hpp"
#include "wmkit/rewards.hpp"
#include "wmkit/smoothing.hpp"
#include "wmkit/wm_network.hpp"

namespace fs = std::filesystem;
using namespace wmkit;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string tree_path, scene_path, out_dir = ".";
};

fs::path out_file(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

KinematicTree require_tree(const GlobalOpts& g) {
  if (g.tree_path.empty())
    throw CLI::ValidationError("--tree", "this subcommand needs --tree");
  return load_tree(g.tree_path);
}

TerrainScene optional_scene(const GlobalOpts& g) {
  return g.scene_path.empty() ? TerrainScene{} : load_scene(g.scene_path);
}

void write_json(const nlohmann::ordered_json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<LabeledSequence> load_dataset(
    const std::vector<std::string>& motions,
    const std::vector<std::string>& annotations) {
  if (motions.size() != annotations.size())
    throw CLI::ValidationError(
        "--motion/--annotation",
        "need one --annotation per --motion, in matching order");
  std::vector<LabeledSequence> dataset;
  for (size_t i = 0; i < motions.size(); ++i)
    dataset.push_back({load_motion(motions[i]), load_annotation(annotations[i])});
  return dataset;
}

// Maximal runs of frames where any joint's relaxation drops below 0.5.
std::vector<FrameRange> low_w_intervals(
    const std::vector<Eigen::VectorXd>& w) {
  std::vector<FrameRange> runs;
  for (int t = 0; t < static_cast<int>(w.size()); ++t) {
    const bool low = w[t].minCoeff() < 0.5;
    if (low && (runs.empty() || runs.back().end != t))
      runs.push_back({t, t + 1});
    else if (low)
      runs.back().end = t + 1;
  }
  return runs;
}

// ------------------------------------------------------------------ smooth

struct SmoothOpts {
  std::string motion;
  SmoothingConfig config;
};

void run_smooth(const GlobalOpts& g, const SmoothOpts& o) {
  const MotionSequence seq = load_motion(o.motion);
  const MotionSequence smoothed = smooth_pipeline(seq, o.config);
  const fs::path path = out_file(g, "smoothed.json");
  save_motion(smoothed, path.string());

  // Record the pipeline configuration in the artifact itself so the file is
  // self-describing; loaders ignore the extra block.
  std::ifstream in(path);
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(in);
  in.close();
  j["smoothing"] = {{"downsample_factor", o.config.downsample_factor},
                    {"ma_window", o.config.ma_window},
                    {"median_window", o.config.median_window}};
  write_json(j, path);
  std::cout << "smoothed " << seq.frame_count() << " frames -> " << path.string()
            << "\n";
}

// ------------------------------------------------------------------- label

struct LabelOpts {
  std::string motion;
  LabelParams params;
};

void run_label(const GlobalOpts& g, const LabelOpts& o) {
  const KinematicTree tree = require_tree(g);
  const MotionSequence seq = load_motion(o.motion);
  seq.validate(tree.actuated_count());
  const WeightlessAnnotation ann =
      annotate_sequence(seq, tree, optional_scene(g), o.params, g.seed);
  const fs::path path = out_file(g, "annotation.json");
  save_annotation(ann, path.string());
  std::cout << "labeled " << seq.frame_count() << " frames, "
            << ann.intervals.size() << " weightless interval(s) -> "
            << path.string() << "\n";
}

// ---------------------------------------------------------------- train-wm

struct TrainOpts {
  std::vector<std::string> motions, annotations;
  std::vector<int> hidden = {256, 256, 64};
  double dropout = 0.1;
  TrainConfig config;
};

void run_train(const GlobalOpts& g, const TrainOpts& o) {
  const auto dataset = load_dataset(o.motions, o.annotations);
  const int k = static_cast<int>(dataset[0].first.frames[0].q.size());
  WMNetwork wm(k, o.hidden, o.dropout);
  TrainConfig cfg = o.config;
  cfg.seed = g.seed;
  const TrainResult result = train(wm, dataset, cfg);

  const fs::path ckpt = out_file(g, "wm.ckpt");
  wm.save(ckpt.string());
  std::ofstream csv(out_file(g, "loss_history.csv"));
  csv.precision(17);
  csv << "epoch,loss\n";
  for (size_t e = 0; e < result.loss_history.size(); ++e)
    csv << e << ',' << result.loss_history[e] << '\n';
  std::cout << "trained " << cfg.epochs << " epochs, final loss "
            << result.loss_history.back() << " -> " << ckpt.string() << "\n";
}

// ----------------------------------------------------------------- eval-wm

struct EvalOpts {
  std::string checkpoint;
  std::vector<std::string> motions, annotations;
};

void run_eval(const GlobalOpts& g, const EvalOpts& o) {
  const WMNetwork wm = WMNetwork::load(o.checkpoint);
  const auto dataset = load_dataset(o.motions, o.annotations);
  const EvalReport report = evaluate(wm, dataset);

  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["accuracy"] = report.accuracy;
  j["bce"] = report.bce;
  j["mean_tv"] = report.mean_tv;
  j["sequences"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < dataset.size(); ++i) {
    const auto w = predict_sequence(wm, dataset[i].first);
    const std::string trace = "w_trace_" + std::to_string(i) + ".csv";
    std::vector<std::vector<double>> rows;
    for (const auto& wt : w)
      rows.emplace_back(wt.data(), wt.data() + wt.size());
    write_w_trace_csv(out_file(g, trace).string(), rows);

    nlohmann::ordered_json entry;
    entry["motion"] = o.motions[i];
    entry["w_trace"] = trace;
    entry["weightless_intervals"] = nlohmann::ordered_json::array();
    for (const FrameRange& r : low_w_intervals(w))
      entry["weightless_intervals"].push_back({r.begin, r.end});
    j["sequences"].push_back(entry);
  }
  const fs::path path = out_file(g, "eval_report.json");
  write_json(j, path);
  std::cout << "accuracy " << report.accuracy << ", bce " << report.bce
            << ", mean_tv " << report.mean_tv << " -> " << path.string()
            << "\n";
}

// ------------------------------------------------------------------ reward

struct RewardOpts {
  std::string result, reference;
};

struct DiffedSequence {
  MotionSequence seq;
  std::vector<std::vector<double>> qdot, qddot;
  std::vector<Vec3> root_vel;
};

DiffedSequence differentiate(MotionSequence seq) {
  DiffedSequence d;
  seq.recompute_velocities();
  d.qdot = seq.joint_velocities;
  const int n = seq.frame_count();
  const int k = static_cast<int>(seq.frames[0].q.size());
  d.qddot.assign(n, std::vector<double>(k, 0.0));
  d.root_vel.assign(n, Vec3{});
  for (int t = 0; t < n && n > 1; ++t) {
    const int a = std::max(0, t - 1), b = std::min(n - 1, t + 1);
    const double dt = (b - a) / seq.fps;
    for (int i = 0; i < k; ++i)
      d.qddot[t][i] = (d.qdot[b][i] - d.qdot[a][i]) / dt;
    d.root_vel[t] =
        (seq.frames[b].root_position - seq.frames[a].root_position) *
        (1.0 / dt);
  }
  d.seq = std::move(seq);
  return d;
}

void split_feet(const KinematicTree& tree, const std::vector<double>& all,
                std::vector<double>& no_feet) {
  no_feet.clear();
  for (int j = 1; j < tree.joint_count(); ++j)
    if (!tree.is_foot(j)) no_feet.push_back(all[j - 1]);
}

void run_reward(const GlobalOpts& g, const RewardOpts& o) {
  const KinematicTree tree = require_tree(g);
  const DiffedSequence res = differentiate(load_motion(o.result));
  const DiffedSequence ref = differentiate(load_motion(o.reference));
  res.seq.validate(tree.actuated_count());
  ref.seq.validate(tree.actuated_count());
  if (res.seq.frame_count() != ref.seq.frame_count())
    throw std::runtime_error("result and reference frame counts differ");

  const RewardWeights weights;
  std::vector<RewardBreakdown> rows;
  for (int t = 0; t < res.seq.frame_count(); ++t) {
    const Pose& p = res.seq.frames[t];
    FrameState s;
    s.q = p.q;
    s.qdot = res.qdot[t];
    s.qddot = res.qddot[t];
    s.root_position = p.root_position;
    s.root_orientation = p.root_orientation;
    s.root_velocity = res.root_vel[t];
    const FkResult fk = forward_kinematics(tree, p);
    s.keypoints = fk.world_positions;
    // The motion file carries no action or torque stream; the corresponding
    // regularization terms report their zero-state value.
    s.action.assign(tree.actuated_count(), 0.0);
    s.prev_action = s.action;
    s.torques = s.action;
    for (int f : tree.feet_indices)
      s.feet_orientations.push_back(fk.world_orientations[f]);
    split_feet(tree, s.q, s.joints_no_feet);
    split_feet(tree, s.qdot, s.joint_vel_no_feet);

    const Pose& rp = ref.seq.frames[t];
    ReferenceFrame r;
    const FkResult rfk = forward_kinematics(tree, rp);
    r.keypoints = rfk.world_positions;
    r.root_orientation = rp.root_orientation;
    r.root_velocity = ref.root_vel[t];
    split_feet(tree, rp.q, r.joints_no_feet);
    split_feet(tree, ref.qdot[t], r.joint_vel_no_feet);

    rows.push_back(total_reward(s, r, weights));
  }
  const fs::path path = out_file(g, "rewards.csv");
  write_reward_csv(path.string(), rows);
  double mean = 0.0;
  for (const RewardBreakdown& row : rows) mean += row.total;
  mean /= rows.size();
  std::cout << "mean per-frame total " << mean << " over " << rows.size()
            << " frames -> " << path.string() << "\n";
}

// --------------------------------------------------------------- randomize

struct RandomizeOpts {
  std::string ranges;
  int count = 1000;
  int links = 1;
  int joints = 1;
};

void run_randomize(const GlobalOpts& g, const RandomizeOpts& o) {
  const DomainRandRanges ranges =
      o.ranges.empty() ? DomainRandRanges{} : load_rand_ranges(o.ranges);
  Rng rng(derive_seed(g.seed, "domain-rand"));

  const fs::path path = out_file(g, "samples.csv");
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  out.precision(17);
  for (int l = 0; l < o.links; ++l) out << "link_mass_" << l << ',';
  out << "com_x,com_y,com_z,friction,";
  for (int j = 0; j < o.joints; ++j) out << "motor_strength_" << j << ',';
  out << "kp_scale,kd_scale,action_delay_ms\n";
  for (int i = 0; i < o.count; ++i) {
    const DomainRandSample s =
        sample_domain_rand(ranges, o.links, o.joints, rng);
    for (double v : s.link_mass_scale) out << v << ',';
    out << s.com_offset[0] << ',' << s.com_offset[1] << ',' << s.com_offset[2]
        << ',' << s.friction << ',';
    for (double v : s.motor_strength_scale) out << v << ',';
    out << s.kp_scale << ',' << s.kd_scale << ',' << s.action_delay_ms << '\n';
  }
  std::cout << o.count << " samples -> " << path.string() << "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string motion, annotation, checkpoint;
  std::vector<double> link_lengths = {0.4, 0.4};
  std::vector<double> link_masses = {1.0, 1.0};
  std::vector<double> kp = {60.0, 60.0};
  std::vector<double> kd = {3.0, 3.0};
  double base_mass = 10.0;
  double base_length = 0.6;
  double base_x = 0.0, base_z = 0.0, base_pitch = 0.0;
  DemoConfig config;
};

void run_simulate(const GlobalOpts& g, const SimulateOpts& o) {
  if (o.link_lengths.size() != o.link_masses.size() ||
      o.kp.size() != o.link_lengths.size() || o.kd.size() != o.kp.size())
    throw CLI::ValidationError(
        "--link-lengths", "link lengths, masses, kp and kd must align");

  PlanarChain chain;
  for (size_t i = 0; i < o.link_lengths.size(); ++i)
    chain.links.push_back({o.link_lengths[i], o.link_masses[i]});
  chain.gains = {o.kp, o.kd};
  chain.base_mass = o.base_mass;
  chain.base_length = o.base_length;
  chain.validate();

  const MotionSequence reference = load_motion(o.motion);
  reference.validate(chain.joint_count());

  std::vector<std::vector<double>> w_schedule(
      reference.frame_count(), std::vector<double>(chain.joint_count(), 1.0));
  std::optional<WMNetwork> net;
  if (!o.annotation.empty() && !o.checkpoint.empty())
    throw CLI::ValidationError(
        "--annotation", "--annotation and --checkpoint are exclusive");
  if (!o.annotation.empty()) {
    const WeightlessAnnotation ann = load_annotation(o.annotation);
    if (ann.labels.size() != w_schedule.size())
      throw std::runtime_error("annotation/reference frame count mismatch");
    if (!ann.labels.empty() &&
        static_cast<int>(ann.labels[0].size()) != chain.joint_count())
      throw std::runtime_error("annotation joint count does not match chain");
    for (size_t t = 0; t < ann.labels.size(); ++t)
      for (size_t i = 0; i < ann.labels[t].size(); ++i)
        w_schedule[t][i] = 1.0 - ann.labels[t][i];
  }
  if (!o.checkpoint.empty()) net = WMNetwork::load(o.checkpoint);

  const SimState initial =
      make_state(chain, {o.base_x, o.base_z}, o.base_pitch,
                 reference.frames[0].q);
  const DemoReport report =
      run_weightless_demo(chain, optional_scene(g), reference, w_schedule,
                          net ? &*net : nullptr, o.config, initial);

  write_trajectory_csv(out_file(g, "trajectory.csv").string(), report,
                       o.config.control_hz);
  write_w_trace_csv(out_file(g, "w_trace.csv").string(), report.w_trace);
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["contact_time"] = report.contact_time;
  j["settle_time"] = report.settle_time;
  j["fell"] = report.fell;
  j["ticks"] = report.trajectory.size();
  write_json(j, out_file(g, "demo_report.json"));
  std::cout << "contact_time " << report.contact_time << ", settle_time "
            << report.settle_time << ", fell " << (report.fell ? "yes" : "no")
            << " -> " << out_file(g, "demo_report.json").string() << "\n";
}

// ----------------------------------------------------------------- metrics

struct MetricsOpts {
  std::string result, reference;
};

void run_metrics(const GlobalOpts& g, const MetricsOpts& o) {
  const KinematicTree tree = require_tree(g);
  const TrackingMetrics m =
      compute_metrics(tree, load_motion(o.result), load_motion(o.reference));
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["mpjpe"] = m.mpjpe;
  j["mpjae"] = m.mpjae;
  j["mpjve"] = m.mpjve;
  j["root_p"] = m.root_p;
  j["root_r"] = m.root_r;
  j["root_v"] = m.root_v;
  const fs::path path = out_file(g, "metrics.json");
  write_json(j, path);
  std::cout << "mpjpe " << m.mpjpe << ", root_p " << m.root_p << " -> "
            << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion relaxation pipeline: smoothing, weightlessness "
               "labeling, relaxation-network training and the planar "
               "simulator demo"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Global seed; per-stage seeds derive from it")
      ->capture_default_str();
  app.add_option("--tree", g.tree_path, "Kinematic tree JSON");
  app.add_option("--scene", g.scene_path, "Terrain scene JSON");
  app.add_option("--out", g.out_dir, "Output directory (all artifacts go here)")
      ->capture_default_str();

  SmoothOpts smooth_opts;
  CLI::App* smooth = app.add_subcommand(
      "smooth", "Downsample, average, median-filter and resample a motion");
  smooth->add_option("--motion", smooth_opts.motion, "Input motion JSON")
      ->required();
  smooth->add_option("--factor", smooth_opts.config.downsample_factor,
                     "Downsample factor")
      ->capture_default_str();
  smooth->add_option("--ma-window", smooth_opts.config.ma_window,
                     "Causal moving-average window, frames")
      ->capture_default_str();
  smooth->add_option("--median-window", smooth_opts.config.median_window,
                     "Centered median window, odd")
      ->capture_default_str();
  smooth->callback([&] { run_smooth(g, smooth_opts); });

  LabelOpts label_opts;
  CLI::App* label = app.add_subcommand(
      "label", "Annotate weightless intervals and per-joint labels");
  label->add_option("--motion", label_opts.motion, "Input motion JSON")
      ->required();
  label->add_option("--eps", label_opts.params.contact_eps,
                    "Contact distance threshold, meters")
      ->capture_default_str();
  label->add_option("--delta-t", label_opts.params.delta_t,
                    "Interval endpoint perturbation span, frames")
      ->capture_default_str();
  label->add_flag("--feet-in-test", label_opts.params.feet_in_interval_test,
                  "Count feet contacts toward the interval test");
  label->callback([&] { run_label(g, label_opts); });

  TrainOpts train_opts;
  CLI::App* train_wm = app.add_subcommand(
      "train-wm", "Train the relaxation network on labeled motions");
  train_wm
      ->add_option("--motion", train_opts.motions,
                   "Motion JSON (repeat per sequence)")
      ->required();
  train_wm
      ->add_option("--annotation", train_opts.annotations,
                   "Annotation JSON, one per --motion in order")
      ->required();
  train_wm->add_option("--epochs", train_opts.config.epochs, "Training epochs")
      ->capture_default_str();
  train_wm->add_option("--batch", train_opts.config.batch_size, "Batch size")
      ->capture_default_str();
  train_wm->add_option("--lr", train_opts.config.lr, "Adam learning rate")
      ->capture_default_str();
  train_wm
      ->add_option("--lambda", train_opts.config.lambda_smooth,
                   "Smoothness loss weight")
      ->capture_default_str();
  train_wm
      ->add_option("--window", train_opts.config.window_len,
                   "BPTT window length, frames")
      ->capture_default_str();
  train_wm
      ->add_option("--max-offset", train_opts.config.max_future_offset,
                   "Future-window offset span, frames")
      ->capture_default_str();
  train_wm
      ->add_option("--hidden", train_opts.hidden,
                   "Hidden layer sizes")
      ->capture_default_str();
  train_wm->add_option("--dropout", train_opts.dropout, "Dropout rate")
      ->capture_default_str();
  train_wm->callback([&] { run_train(g, train_opts); });

  EvalOpts eval_opts;
  CLI::App* eval_wm = app.add_subcommand(
      "eval-wm",
      "Evaluate a checkpoint: accuracy, BCE, per-frame w traces and detected "
      "weightless intervals");
  eval_wm->add_option("--checkpoint", eval_opts.checkpoint, "Network checkpoint")
      ->required();
  eval_wm
      ->add_option("--motion", eval_opts.motions,
                   "Motion JSON (repeat per sequence)")
      ->required();
  eval_wm
      ->add_option("--annotation", eval_opts.annotations,
                   "Annotation JSON, one per --motion in order")
      ->required();
  eval_wm->callback([&] { run_eval(g, eval_opts); });

  RewardOpts reward_opts;
  CLI::App* reward = app.add_subcommand(
      "reward", "Per-frame reward table for a result/reference motion pair");
  reward->add_option("--result", reward_opts.result, "Result motion JSON")
      ->required();
  reward
      ->add_option("--reference", reward_opts.reference,
                   "Reference motion JSON")
      ->required();
  reward->callback([&] { run_reward(g, reward_opts); });

  RandomizeOpts rand_opts;
  CLI::App* randomize = app.add_subcommand(
      "randomize", "Sample domain-randomization parameters to CSV");
  randomize->add_option("--ranges", rand_opts.ranges,
                        "Ranges JSON (defaults when omitted)");
  randomize->add_option("--count", rand_opts.count, "Number of samples")
      ->capture_default_str();
  randomize->add_option("--links", rand_opts.links, "Links per sample")
      ->capture_default_str();
  randomize->add_option("--joints", rand_opts.joints, "Joints per sample")
      ->capture_default_str();
  randomize->callback([&] { run_randomize(g, rand_opts); });

  SimulateOpts sim_opts;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Closed-loop planar chain demo with relaxation modulation");
  simulate
      ->add_option("--motion", sim_opts.motion,
                   "Reference joint trajectory JSON")
      ->required();
  simulate->add_option("--annotation", sim_opts.annotation,
                       "Annotation JSON driving the relaxation schedule");
  simulate->add_option("--checkpoint", sim_opts.checkpoint,
                       "Network checkpoint for online relaxation inference");
  simulate
      ->add_option("--link-lengths", sim_opts.link_lengths,
                   "Link lengths, meters")
      ->capture_default_str();
  simulate
      ->add_option("--link-masses", sim_opts.link_masses, "Link masses, kg")
      ->capture_default_str();
  simulate->add_option("--kp", sim_opts.kp, "PD stiffness per joint")
      ->capture_default_str();
  simulate->add_option("--kd", sim_opts.kd, "PD damping per joint")
      ->capture_default_str();
  simulate->add_option("--base-mass", sim_opts.base_mass, "Base mass, kg")
      ->capture_default_str();
  simulate
      ->add_option("--base-length", sim_opts.base_length, "Base length, m")
      ->capture_default_str();
  simulate->add_option("--base-x", sim_opts.base_x, "Initial base x, m")
      ->capture_default_str();
  simulate->add_option("--base-z", sim_opts.base_z, "Initial base height, m")
      ->capture_default_str();
  simulate
      ->add_option("--base-pitch", sim_opts.base_pitch,
                   "Initial base pitch, rad")
      ->capture_default_str();
  simulate
      ->add_option("--duration", sim_opts.config.duration, "Run length, s")
      ->capture_default_str();
  simulate
      ->add_option("--fall-height", sim_opts.config.fall_base_height,
                   "Base height below which an uncontacted chain counts as "
                   "fallen, m")
      ->capture_default_str();
  simulate->callback([&] { run_simulate(g, sim_opts); });

  MetricsOpts metrics_opts;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Tracking error report for a result/reference motion pair");
  metrics->add_option("--result", metrics_opts.result, "Result motion JSON")
      ->required();
  metrics
      ->add_option("--reference", metrics_opts.reference,
                   "Reference motion JSON")
      ->required();
  metrics->callback([&] { run_metrics(g, metrics_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
