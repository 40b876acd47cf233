#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rocap/kinematics.hpp"
#include "rocap/object.hpp"
#include "rocap/transforms.hpp"

namespace rocap {

struct OrientationSample {
  UnitQuaternion quaternion;
  EulerAngles source_euler;
  bool retained = true;
  bool reachable = false;
  std::optional<JointState> joint_solution;
};

struct Waypoint {
  JointState joint_state;
  Transform base_to_gripper;  // exactly FK(joint_state)
  int state_id = 0;
  bool operator_pause = false;  // marker entry; no image is captured here
};

struct CapturePlan {
  std::vector<Waypoint> waypoints;
  std::string object_ref;
  Vec3 capture_position = Vec3::Zero();  // fixed workspace point, base frame
};

/// All yaw/pitch/roll triples in {0, step, ..., 360-step} degrees,
/// lexicographic (yaw outermost), converted to quaternions. The step must
/// divide 360.
std::vector<OrientationSample> sample_euler_grid(double step_deg);

/// Greedy sweep in input order: a sample stays retained iff its arc
/// distance to every previously retained sample is >= threshold.
void dedup_by_arc(std::vector<OrientationSample>& samples, double threshold_rad = 0.35);

struct ReachabilityOptions {
  double position_jitter = 0.0;  // m, uniform cube jitter on the capture point
  std::uint64_t seed = 0;        // drives jitter and the IK restarts
  IkOptions ik;
  unsigned threads = 1;
};

/// Solves IK for every retained sample at the capture position with the
/// sample's orientation: target bTg = (capture_position, R) * tool_offset^-1.
/// Marks reachability and stores the joint solution.
void filter_reachable(std::vector<OrientationSample>& samples, const DHChain& chain,
                      const Vec3& capture_position, const Transform& tool_offset,
                      const ReachabilityOptions& options = {});

enum class PlanOrdering {
  kGrid,             // keep grid order
  kNearestNeighbor,  // greedy joint-space chaining
};

/// Expands reachable samples into a waypoint list: states x orientations,
/// grouped by state. Every manual-change state after the first group is
/// preceded by an operator-pause waypoint. Each waypoint stores the exact
/// forward-kinematics pose of its joint state.
CapturePlan build_capture_plan(const std::vector<OrientationSample>& samples,
                               const ObjectSpec& object, const DHChain& chain,
                               const Vec3& capture_position,
                               PlanOrdering ordering = PlanOrdering::kGrid);

struct CoverageRow {
  double qw, qx, qy, qz;
  double zx, zy, zz;  // rotated z-axis direction
  bool retained;
  bool reachable;
};

std::string coverage_csv(const std::vector<OrientationSample>& samples);
void write_coverage_csv(const std::vector<OrientationSample>& samples,
                        const std::filesystem::path& path);
std::vector<CoverageRow> read_coverage_csv(const std::filesystem::path& path);

}  // namespace rocap
