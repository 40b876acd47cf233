#include "rocap/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "rocap/parallel.hpp"

namespace rocap {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError("bad numeric field in coverage CSV: '" + field + "'");
  }
  return v;
}

double joint_distance(const JointState& a, const JointState& b) { return (a - b).norm(); }

}  // namespace

std::vector<OrientationSample> sample_euler_grid(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 360.0 ||
      std::abs(std::remainder(360.0, step_deg)) > 1e-9) {
    throw InvalidStep("step must be in (0, 360] and divide 360");
  }
  const int n = static_cast<int>(std::lround(360.0 / step_deg));
  std::vector<OrientationSample> samples;
  samples.reserve(static_cast<std::size_t>(n) * n * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ip = 0; ip < n; ++ip) {
      for (int ir = 0; ir < n; ++ir) {
        OrientationSample s;
        s.source_euler = {iy * step_deg, ip * step_deg, ir * step_deg};
        s.quaternion = quat_from_euler(s.source_euler);
        samples.push_back(std::move(s));
      }
    }
  }
  return samples;
}

void dedup_by_arc(std::vector<OrientationSample>& samples, double threshold_rad) {
  if (threshold_rad < 0.0 || !std::isfinite(threshold_rad)) {
    throw InvalidRange("dedup threshold must be finite and >= 0");
  }
  std::vector<const UnitQuaternion*> kept;
  for (OrientationSample& s : samples) {
    bool retained = true;
    for (const UnitQuaternion* q : kept) {
      if (arc_distance(s.quaternion, *q) < threshold_rad) {
        retained = false;
        break;
      }
    }
    s.retained = retained;
    if (retained) {
      kept.push_back(&s.quaternion);
    }
  }
}

void filter_reachable(std::vector<OrientationSample>& samples, const DHChain& chain,
                      const Vec3& capture_position, const Transform& tool_offset,
                      const ReachabilityOptions& options) {
  const Transform tool_inv = tool_offset.inverse();
  const JointState home = JointState::Zero(static_cast<Eigen::Index>(chain.joint_count()));

  parallel_for(samples.size(), options.threads, [&](std::size_t i) {
    OrientationSample& s = samples[i];
    s.reachable = false;
    s.joint_solution.reset();
    if (!s.retained) {
      return;
    }
    Vec3 position = capture_position;
    if (options.position_jitter > 0.0) {
      std::mt19937_64 rng(derive_seed(options.seed, "jitter-" + std::to_string(i)));
      std::uniform_real_distribution<double> u(-options.position_jitter, options.position_jitter);
      position += Vec3(u(rng), u(rng), u(rng));
    }
    const Transform target =
        Transform(s.quaternion.to_rotation(), position) * tool_inv;
    IkOptions ik = options.ik;
    ik.seed = derive_seed(options.seed, "ik-" + std::to_string(i));
    if (auto q = solve_ik(chain, target, home, ik)) {
      s.reachable = true;
      s.joint_solution = std::move(*q);
    }
  });
}

CapturePlan build_capture_plan(const std::vector<OrientationSample>& samples,
                               const ObjectSpec& object, const DHChain& chain,
                               const Vec3& capture_position, PlanOrdering ordering) {
  object.validate();

  std::vector<const OrientationSample*> reachable;
  for (const OrientationSample& s : samples) {
    if (s.reachable && s.joint_solution) {
      reachable.push_back(&s);
    }
  }
  if (reachable.empty()) {
    throw EmptyPlan("no reachable orientation samples");
  }

  if (ordering == PlanOrdering::kNearestNeighbor) {
    std::vector<const OrientationSample*> ordered;
    ordered.reserve(reachable.size());
    std::vector<bool> used(reachable.size(), false);
    std::size_t current = 0;
    used[0] = true;
    ordered.push_back(reachable[0]);
    for (std::size_t step = 1; step < reachable.size(); ++step) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t pick = 0;
      for (std::size_t i = 0; i < reachable.size(); ++i) {
        if (used[i]) continue;
        const double d =
            joint_distance(*reachable[current]->joint_solution, *reachable[i]->joint_solution);
        if (d < best) {
          best = d;
          pick = i;
        }
      }
      used[pick] = true;
      ordered.push_back(reachable[pick]);
      current = pick;
    }
    reachable = std::move(ordered);
  }

  std::vector<Transform> poses;
  poses.reserve(reachable.size());
  for (const OrientationSample* s : reachable) {
    poses.push_back(forward_kinematics(chain, *s->joint_solution));
  }

  CapturePlan plan;
  plan.object_ref = object.name;
  plan.capture_position = capture_position;
  for (std::size_t gi = 0; gi < object.states.size(); ++gi) {
    const ObjectState& state = object.states[gi];
    if (gi > 0 && state.change.kind == StateChangeKind::kManual) {
      // The arm parks at the group's first pose while the operator alters
      // the object.
      Waypoint pause;
      pause.joint_state = *reachable.front()->joint_solution;
      pause.base_to_gripper = poses.front();
      pause.state_id = state.id;
      pause.operator_pause = true;
      plan.waypoints.push_back(std::move(pause));
    }
    for (std::size_t i = 0; i < reachable.size(); ++i) {
      Waypoint w;
      w.joint_state = *reachable[i]->joint_solution;
      w.base_to_gripper = poses[i];
      w.state_id = state.id;
      w.operator_pause = false;
      plan.waypoints.push_back(std::move(w));
    }
  }
  return plan;
}

std::string coverage_csv(const std::vector<OrientationSample>& samples) {
  std::ostringstream out;
  out << "qw,qx,qy,qz,zx,zy,zz,retained,reachable\n";
  for (const OrientationSample& s : samples) {
    const Vec3 z = s.quaternion.to_rotation() * Vec3::UnitZ();
    out << format_double(s.quaternion.w()) << ',' << format_double(s.quaternion.x()) << ','
        << format_double(s.quaternion.y()) << ',' << format_double(s.quaternion.z()) << ','
        << format_double(z.x()) << ',' << format_double(z.y()) << ',' << format_double(z.z())
        << ',' << (s.retained ? 1 : 0) << ',' << (s.reachable ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_coverage_csv(const std::vector<OrientationSample>& samples,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << coverage_csv(samples);
}

std::vector<CoverageRow> read_coverage_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "qw,qx,qy,qz,zx,zy,zz,retained,reachable") {
    throw DataError("unexpected coverage CSV header");
  }
  std::vector<CoverageRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() != 9) {
      throw DataError("coverage CSV row has " + std::to_string(fields.size()) + " fields");
    }
    CoverageRow r;
    r.qw = parse_double(fields[0]);
    r.qx = parse_double(fields[1]);
    r.qy = parse_double(fields[2]);
    r.qz = parse_double(fields[3]);
    r.zx = parse_double(fields[4]);
    r.zy = parse_double(fields[5]);
    r.zz = parse_double(fields[6]);
    r.retained = fields[7] == "1";
    r.reachable = fields[8] == "1";
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rocap
