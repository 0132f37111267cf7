#include "wmkit/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wmkit {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries the byte offset of the failure.
    throw std::runtime_error("malformed JSON in '" + path + "': " + e.what());
  }
}

void check_version(const json& j, const std::string& path) {
  const int v = j.at("format_version").get<int>();
  if (v != kFormatVersion)
    throw std::runtime_error("'" + path + "': unsupported format_version " +
                             std::to_string(v));
}

void write_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw std::runtime_error("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Quat quat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::runtime_error("expected a quaternion [w, x, y, z]");
  return Quat{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
              j[3].get<double>()}
      .normalized();
}

}  // namespace

KinematicTree load_tree(const std::string& path) {
  const json j = parse_file(path);
  check_version(j, path);
  KinematicTree tree;
  for (const json& jj : j.at("joints")) {
    Joint joint;
    joint.name = jj.at("name").get<std::string>();
    joint.parent = jj.value("parent", -1);
    joint.local_offset = vec3_from_json(jj.at("local_offset"));
    if (jj.contains("axis")) joint.axis = vec3_from_json(jj.at("axis"));
    joint.mass = jj.value("mass", 0.0);
    if (jj.contains("com_local"))
      joint.com_local = vec3_from_json(jj.at("com_local"));
    tree.joints.push_back(std::move(joint));
  }
  tree.waist_index = j.at("waist_index").get<int>();
  tree.feet_indices = j.at("feet_indices").get<std::vector<int>>();
  tree.contact_point_indices =
      j.at("contact_point_indices").get<std::vector<int>>();
  tree.validate();
  return tree;
}

void save_tree(const KinematicTree& tree, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["joints"] = json::array();
  for (const Joint& joint : tree.joints) {
    json jj;
    jj["name"] = joint.name;
    jj["parent"] = joint.parent;
    jj["local_offset"] = vec3_to_json(joint.local_offset);
    jj["axis"] = vec3_to_json(joint.axis);
    jj["mass"] = joint.mass;
    if (joint.com_local) jj["com_local"] = vec3_to_json(*joint.com_local);
    j["joints"].push_back(std::move(jj));
  }
  j["waist_index"] = tree.waist_index;
  j["feet_indices"] = tree.feet_indices;
  j["contact_point_indices"] = tree.contact_point_indices;
  write_file(j, path);
}

TerrainScene load_scene(const std::string& path) {
  const json j = parse_file(path);
  check_version(j, path);
  TerrainScene scene;
  scene.ground_height = j.value("ground_height", 0.0);
  if (j.contains("boxes")) {
    for (const json& jb : j.at("boxes")) {
      Box box;
      box.center = vec3_from_json(jb.at("center"));
      box.half_extents = vec3_from_json(jb.at("half_extents"));
      box.yaw = jb.value("yaw", 0.0);
      if (box.half_extents.x <= 0 || box.half_extents.y <= 0 ||
          box.half_extents.z <= 0)
        throw std::runtime_error("'" + path + "': non-positive half extents");
      scene.boxes.push_back(box);
    }
  }
  return scene;
}

void save_scene(const TerrainScene& scene, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["ground_height"] = scene.ground_height;
  j["boxes"] = json::array();
  for (const Box& box : scene.boxes) {
    json jb;
    jb["center"] = vec3_to_json(box.center);
    jb["half_extents"] = vec3_to_json(box.half_extents);
    jb["yaw"] = box.yaw;
    j["boxes"].push_back(std::move(jb));
  }
  write_file(j, path);
}

MotionSequence load_motion(const std::string& path) {
  const json j = parse_file(path);
  check_version(j, path);
  MotionSequence seq;
  seq.fps = j.at("fps").get<double>();
  if (seq.fps <= 0.0) throw std::runtime_error("'" + path + "': fps <= 0");
  for (const json& jf : j.at("frames")) {
    Pose p;
    p.root_position = vec3_from_json(jf.at("root_position"));
    p.root_orientation = quat_from_json(jf.at("root_orientation"));
    p.q = jf.at("q").get<std::vector<double>>();
    seq.frames.push_back(std::move(p));
  }
  if (j.contains("joint_velocities"))
    seq.joint_velocities =
        j.at("joint_velocities").get<std::vector<std::vector<double>>>();
  if (seq.frames.empty())
    throw std::runtime_error("'" + path + "': no frames");
  return seq;
}

void save_motion(const MotionSequence& seq, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["fps"] = seq.fps;
  j["frames"] = json::array();
  for (const Pose& p : seq.frames) {
    json jf;
    jf["root_position"] = vec3_to_json(p.root_position);
    jf["root_orientation"] = json::array({p.root_orientation.w,
                                          p.root_orientation.x,
                                          p.root_orientation.y,
                                          p.root_orientation.z});
    jf["q"] = p.q;
    j["frames"].push_back(std::move(jf));
  }
  if (!seq.joint_velocities.empty())
    j["joint_velocities"] = seq.joint_velocities;
  write_file(j, path);
}

WeightlessAnnotation load_annotation(const std::string& path) {
  const json j = parse_file(path);
  check_version(j, path);
  WeightlessAnnotation ann;
  ann.seed = j.at("seed").get<std::uint64_t>();
  const json& jp = j.at("params");
  ann.params.contact_eps = jp.at("contact_eps").get<double>();
  ann.params.delta_t = jp.at("delta_t").get<int>();
  ann.params.feet_in_interval_test =
      jp.value("feet_in_interval_test", false);
  for (const json& jr : j.at("intervals"))
    ann.intervals.push_back({jr[0].get<int>(), jr[1].get<int>()});

  const int frames = j.at("frame_count").get<int>();
  const int k = j.at("joint_count").get<int>();
  // Run-length decoding of the frame-major label bit stream.
  std::uint8_t value = j.at("labels_rle").at("first").get<int>() ? 1 : 0;
  std::vector<std::uint8_t> flat;
  flat.reserve(size_t(frames) * k);
  for (const json& run : j.at("labels_rle").at("runs")) {
    flat.insert(flat.end(), run.get<std::size_t>(), value);
    value = 1 - value;
  }
  if (static_cast<long long>(flat.size()) != 1LL * frames * k)
    throw std::runtime_error("'" + path + "': label RLE length mismatch");
  ann.labels.assign(frames, std::vector<std::uint8_t>(k));
  for (int t = 0; t < frames; ++t)
    for (int i = 0; i < k; ++i) ann.labels[t][i] = flat[size_t(t) * k + i];
  return ann;
}

void save_annotation(const WeightlessAnnotation& ann,
                     const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = ann.seed;
  j["params"] = {{"contact_eps", ann.params.contact_eps},
                 {"delta_t", ann.params.delta_t},
                 {"feet_in_interval_test", ann.params.feet_in_interval_test}};
  j["intervals"] = json::array();
  for (const FrameRange& r : ann.intervals)
    j["intervals"].push_back(json::array({r.begin, r.end}));
  const int frames = static_cast<int>(ann.labels.size());
  const int k = frames > 0 ? static_cast<int>(ann.labels[0].size()) : 0;
  j["frame_count"] = frames;
  j["joint_count"] = k;

  std::vector<std::size_t> runs;
  std::uint8_t first = frames > 0 ? ann.labels[0][0] : 0;
  std::uint8_t current = first;
  std::size_t run = 0;
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < k; ++i) {
      if (ann.labels[t][i] == current) {
        ++run;
      } else {
        runs.push_back(run);
        current = ann.labels[t][i];
        run = 1;
      }
    }
  }
  if (run > 0) runs.push_back(run);
  j["labels_rle"] = {{"first", int(first)}, {"runs", runs}};
  write_file(j, path);
}

DomainRandRanges load_rand_ranges(const std::string& path) {
  const json j = parse_file(path);
  check_version(j, path);
  DomainRandRanges r;
  auto read = [&](const char* key, double (&dst)[2]) {
    const json& ja = j.at(key);
    dst[0] = ja[0].get<double>();
    dst[1] = ja[1].get<double>();
    if (dst[1] < dst[0])
      throw std::runtime_error("'" + path + "': inverted range for " + key);
  };
  read("link_mass", r.link_mass);
  read("com_offset", r.com_offset);
  read("friction", r.friction);
  read("motor_strength", r.motor_strength);
  read("kp_scale", r.kp_scale);
  read("kd_scale", r.kd_scale);
  read("action_delay_ms", r.action_delay_ms);
  return r;
}

void save_rand_ranges(const DomainRandRanges& r, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  auto put = [&](const char* key, const double (&src)[2]) {
    j[key] = json::array({src[0], src[1]});
  };
  put("link_mass", r.link_mass);
  put("com_offset", r.com_offset);
  put("friction", r.friction);
  put("motor_strength", r.motor_strength);
  put("kp_scale", r.kp_scale);
  put("kd_scale", r.kd_scale);
  put("action_delay_ms", r.action_delay_ms);
  write_file(j, path);
}

void write_reward_csv(const std::string& path,
                      const std::vector<RewardBreakdown>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "frame";
  for (const std::string& name : reward_term_names()) out << ',' << name;
  out << ",total\n";
  out.precision(17);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out << t;
    for (const auto& [name, value] : rows[t].weighted_terms)
      out << ',' << value;
    out << ',' << rows[t].total << '\n';
  }
}

void write_w_trace_csv(const std::string& path,
                       const std::vector<std::vector<double>>& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::size_t k = w.empty() ? 0 : w[0].size();
  out << "frame";
  for (std::size_t i = 0; i < k; ++i) out << ",w" << i;
  out << '\n';
  out.precision(17);
  for (std::size_t t = 0; t < w.size(); ++t) {
    out << t;
    for (double v : w[t]) out << ',' << v;
    out << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const DemoReport& report,
                          double control_hz) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "time,base_x,base_z,base_pitch";
  const std::size_t n =
      report.trajectory.empty() ? 0 : report.trajectory[0].joint_angles().size();
  for (std::size_t i = 0; i < n; ++i) out << ",q" << i;
  for (std::size_t i = 0; i < n; ++i) out << ",qd" << i;
  for (std::size_t i = 0; i < n; ++i) out << ",w" << i;
  out << ",contacts,box_contact\n";
  out.precision(17);
  for (std::size_t t = 0; t < report.trajectory.size(); ++t) {
    const SimState& s = report.trajectory[t];
    out << (t / control_hz) << ',' << s.base_position().x << ','
        << s.base_position().y << ',' << s.base_pitch();
    for (double q : s.joint_angles()) out << ',' << q;
    for (double qd : s.joint_velocities()) out << ',' << qd;
    for (double v : report.w_trace[t]) out << ',' << v;
    out << ',' << s.contacts.size() << ',' << (s.any_box_contact() ? 1 : 0)
        << '\n';
  }
}

void write_obs_layout(const std::string& path, int joint_count,
                      int history_steps) {
  json j;
  j["format_version"] = kFormatVersion;
  const int k = joint_count;
  json fields = json::array();
  int off = 0;
  auto field = [&](const char* name, int size) {
    fields.push_back({{"name", name}, {"offset", off}, {"size", size}});
    off += size;
  };
  field("q", k);
  field("qdot", k);
  field("root_ang_velocity", 3);
  field("projected_gravity", 3);
  field("prev_action", k);
  field("q_ref", k);
  field("qdot_ref", k);
  field("height_map", kHeightMapSize);
  j["block_fields"] = fields;
  j["block_size"] = off;
  j["history_steps"] = history_steps;
  j["actor_size"] = off * (1 + history_steps);
  j["critic_privileged"] = {"v_root[3]", "friction[1]", "external_force[3]"};
  j["critic_size"] = off * (1 + history_steps) + 7;
  write_file(j, path);
}

}  // namespace wmkit
