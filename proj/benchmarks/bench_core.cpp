#include <benchmark/benchmark.h>

#include "wmkit/geometry.hpp"
#include "wmkit/kinematics.hpp"
#include "wmkit/lstm.hpp"
#include "wmkit/minisim.hpp"
#include "wmkit/rng.hpp"
#include "wmkit/wm_network.hpp"

using namespace wmkit;

namespace {

KinematicTree chain_tree(int joints) {
  KinematicTree tree;
  tree.joints.push_back({"root", -1, {0, 0, 0}, {0, 0, 1}, 1.0, Vec3{}});
  for (int i = 1; i <= joints; ++i)
    tree.joints.push_back({"j" + std::to_string(i), i - 1, {0.1, 0.02, -0.05},
                           {0, 0, 1}, 0.5, Vec3{}});
  tree.waist_index = 1;
  tree.feet_indices = {joints - 1, joints};
  for (int i = 1; i <= joints; ++i) tree.contact_point_indices.push_back(i);
  return tree;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const int joints = static_cast<int>(state.range(0));
  const KinematicTree tree = chain_tree(joints);
  Rng rng(1);
  Pose pose;
  pose.root_position = {0, 0, 1};
  for (int i = 0; i < joints; ++i) pose.q.push_back(rng.uniform(-1, 1));
  for (auto _ : state)
    benchmark::DoNotOptimize(forward_kinematics(tree, pose));
}
BENCHMARK(BM_ForwardKinematics)->Arg(5)->Arg(23)->Arg(64);

void BM_ConvexHull(benchmark::State& state) {
  Rng rng(2);
  std::vector<Vec2> points;
  for (int i = 0; i < state.range(0); ++i)
    points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
  for (auto _ : state) benchmark::DoNotOptimize(convex_hull(points));
}
BENCHMARK(BM_ConvexHull)->Arg(8)->Arg(64)->Arg(512);

void BM_HeightMap(benchmark::State& state) {
  TerrainScene scene;
  Rng rng(3);
  for (int i = 0; i < 8; ++i)
    scene.boxes.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.2},
                           {0.2, 0.2, 0.2},
                           rng.uniform(-3, 3)});
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_height_map(scene, {0.1, 0.2, 1.0}, 0.7));
}
BENCHMARK(BM_HeightMap);

void BM_LstmForward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  WMNetwork wm(k, {256, 256, 64}, 0.1);
  Rng rng(4);
  wm.net.init_params(rng);
  std::vector<Eigen::VectorXd> inputs(48);
  for (auto& x : inputs) {
    x = Eigen::VectorXd(wm.input_size());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(
        wm.net.forward_sequence(inputs, false, nullptr, nullptr));
}
BENCHMARK(BM_LstmForward)->Arg(5)->Arg(23);

void BM_LstmTrainStep(benchmark::State& state) {
  WMNetwork wm(5, {16, 8}, 0.1);
  Rng rng(5);
  wm.net.init_params(rng);
  std::vector<Eigen::VectorXd> inputs(30), targets(30);
  for (int t = 0; t < 30; ++t) {
    inputs[t] = Eigen::VectorXd(wm.input_size());
    for (int i = 0; i < inputs[t].size(); ++i) inputs[t][i] = rng.uniform(-1, 1);
    targets[t] = Eigen::VectorXd::Ones(5);
  }
  for (auto _ : state) {
    LstmNet::Cache cache;
    const auto pred = wm.net.forward_sequence(inputs, true, &rng, &cache);
    benchmark::DoNotOptimize(
        wm.net.backward(cache, total_loss_grad(pred, targets, 0.1)));
  }
}
BENCHMARK(BM_LstmTrainStep);

void BM_SimStep(benchmark::State& state) {
  PlanarChain chain;
  chain.links = {{0.4, 1.0}, {0.4, 1.0}};
  chain.gains = {{60.0, 60.0}, {3.0, 3.0}};
  chain.base_mass = 10.0;
  chain.base_length = 0.6;
  TerrainScene scene;
  scene.boxes.push_back({{1.15, 0, 0.075}, {0.3, 1.0, 0.075}, 0.0});
  SimState s = make_state(chain, {0, 0}, 0.0, {1.2, -0.6});
  const std::vector<double> tau = {5.0, -2.0};
  for (auto _ : state) {
    s = step(chain, s, tau, scene, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SimStep);

}  // namespace

BENCHMARK_MAIN();
