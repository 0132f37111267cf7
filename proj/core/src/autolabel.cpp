#include "wmkit/autolabel.hpp"

#include <algorithm>

namespace wmkit {

namespace {

ContactSet without_feet(const KinematicTree& tree, const ContactSet& c) {
  ContactSet out;
  for (int j : c.contacts)
    if (!tree.is_foot(j)) out.contacts.insert(j);
  return out;
}

}  // namespace

std::vector<FrameRange> weightless_interval(const MotionSequence& seq,
                                            const KinematicTree& tree,
                                            const TerrainScene& scene,
                                            double eps,
                                            bool feet_in_interval_test) {
  seq.validate(tree.actuated_count());
  std::vector<FrameRange> ranges;
  bool in_run = false;
  int run_start = 0;
  for (int t = 0; t < seq.frame_count(); ++t) {
    const FkResult fk = forward_kinematics(tree, seq.frames[t]);
    const Vec2 proj = gravity_projection(center_of_mass(tree, fk));
    const SupportPolygon support = support_polygon(tree, fk, scene, eps);
    ContactSet contacts = detect_contacts(tree, fk, scene, eps);
    if (!feet_in_interval_test) contacts = without_feet(tree, contacts);
    const bool weightless =
        !point_in_polygon(proj, support) && !contacts.empty();
    if (weightless && !in_run) {
      in_run = true;
      run_start = t;
    } else if (!weightless && in_run) {
      in_run = false;
      ranges.push_back({run_start, t});
    }
  }
  if (in_run) ranges.push_back({run_start, seq.frame_count()});
  return ranges;
}

std::vector<FrameRange> perturb_interval(const std::vector<FrameRange>& ranges,
                                         int delta_t, int frame_count,
                                         Rng& rng) {
  std::vector<FrameRange> out;
  for (const FrameRange& r : ranges) {
    const int ds = static_cast<int>(rng.uniform_int(-delta_t, delta_t));
    const int de = static_cast<int>(rng.uniform_int(-delta_t, delta_t));
    FrameRange shifted{std::clamp(r.begin + ds, 0, frame_count),
                       std::clamp(r.end + de, 0, frame_count)};
    if (shifted.end > shifted.begin) out.push_back(shifted);
  }
  std::sort(out.begin(), out.end(),
            [](const FrameRange& a, const FrameRange& b) {
              return a.begin < b.begin;
            });
  std::vector<FrameRange> merged;
  for (const FrameRange& r : out) {
    if (!merged.empty() && r.begin <= merged.back().end)
      merged.back().end = std::max(merged.back().end, r.end);
    else
      merged.push_back(r);
  }
  return merged;
}

std::set<int> active_joints(const KinematicTree& tree,
                            const ContactSet& contacts) {
  std::set<int> active;
  if (tree.waist_index > 0) active.insert(tree.waist_index);
  for (int c : contacts.contacts) {
    if (c < 0 || c >= tree.joint_count())
      throw std::invalid_argument("contact joint index out of range");
    // ParentPath(c): c and its ancestors, stopping at the waist or root.
    int j = c;
    while (j > 0) {
      active.insert(j);
      if (j == tree.waist_index) break;
      j = tree.joints[j].parent;
    }
  }
  return active;
}

WeightlessAnnotation annotate_sequence(const MotionSequence& seq,
                                       const KinematicTree& tree,
                                       const TerrainScene& scene,
                                       const LabelParams& params,
                                       std::uint64_t seed) {
  const int n = seq.frame_count();
  const int k = tree.actuated_count();

  WeightlessAnnotation ann;
  ann.seed = seed;
  ann.params = params;

  Rng rng(seed);
  const std::vector<FrameRange> raw = weightless_interval(
      seq, tree, scene, params.contact_eps, params.feet_in_interval_test);
  ann.intervals = perturb_interval(raw, params.delta_t, n, rng);

  // Full contact sets (feet included) drive A(t), per the limb-node rule.
  std::vector<ContactSet> contacts(n);
  for (int t = 0; t < n; ++t) {
    const FkResult fk = forward_kinematics(tree, seq.frames[t]);
    contacts[t] = detect_contacts(tree, fk, scene, params.contact_eps);
  }

  // Perturbation can pull frames without contacts into an interval; those
  // borrow A(t) from the nearest contacting frame so the joints-to-relax
  // stay well-defined.
  auto nearest_contacting = [&](int t) -> int {
    for (int d = 0; d < n; ++d) {
      if (t - d >= 0 && !contacts[t - d].empty()) return t - d;
      if (t + d < n && !contacts[t + d].empty()) return t + d;
    }
    return -1;
  };

  ann.labels.assign(n, std::vector<std::uint8_t>(k, 0));
  ann.active_sets.assign(n, {});
  for (const FrameRange& r : ann.intervals) {
    for (int t = r.begin; t < r.end; ++t) {
      const int src = contacts[t].empty() ? nearest_contacting(t) : t;
      const ContactSet c = src >= 0 ? contacts[src] : ContactSet{};
      ann.active_sets[t] = active_joints(tree, c);
      for (int j = 1; j <= k; ++j)
        ann.labels[t][j - 1] = ann.active_sets[t].count(j) ? 0 : 1;
    }
  }
  return ann;
}

}  // namespace wmkit
