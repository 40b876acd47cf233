#pragma once

#include <cstdint>
#include <vector>

#include "rocap/kinematics.hpp"
#include "rocap/transforms.hpp"

namespace rocap {

/// One calibration station: the arm pose from forward kinematics and the
/// checkerboard pose observed by the fixed camera.
struct Station {
  Transform base_to_gripper;   // bTg
  Transform camera_to_target;  // cTt
};

/// A pair of relative motions derived from two stations i -> j:
///   a = bTg(j) * bTg(i)^-1   (gripper motion, base frame)
///   b = cTt(j) * cTt(i)^-1   (target motion, camera frame)
/// Both describe the same physical motion, so their rotation angles agree.
/// Pairs whose rotation is too small to constrain the solve are flagged
/// degenerate.
struct MotionPair {
  Transform a;
  Transform b;
  bool degenerate = false;
};

struct CalibrationResult {
  Transform base_to_camera_inv;  // cTb, the calibration target
  Transform gripper_to_target;   // gTt, byproduct of the solve
  double rot_residual_rms = 0.0;    // rad, RMS of ||log(Ra) - Rx log(Rb)||
  double trans_residual_rms = 0.0;  // m, RMS over the stacked linear system
};

enum class PairingStrategy {
  kConsecutive,
  kAllPairs,
  kAuto,  // all-pairs up to 20 stations, consecutive above
};

/// Builds relative-motion pairs from >= 3 stations. Motions with rotation
/// angle below ~1e-3 rad are kept but flagged degenerate.
std::vector<MotionPair> build_motion_pairs(const std::vector<Station>& stations,
                                           PairingStrategy pairing = PairingStrategy::kAuto);

/// Solves A X = X B for X = bTc over the pair set (rotation by least
/// squares on the log-map axes, translation by stacked linear least
/// squares), then reports cTb = X^-1 and the gripper-to-target byproduct.
/// `stations` supplies the frame chain for recovering gTt.
CalibrationResult solve_ax_xb(const std::vector<MotionPair>& pairs,
                              const std::vector<Station>& stations);

struct StationNoise {
  double rot_deg = 0.0;   // std dev of the rotation perturbation angle
  double trans_m = 0.0;   // std dev per translation component
};

/// Synthesizes stations for a known ground truth: bTg from forward
/// kinematics, cTt from the frame chain cTt = X^-1 * bTg * gTt, with
/// optional seeded noise applied to cTt on the log map.
std::vector<Station> simulate_stations(const Transform& base_to_camera_true,
                                       const Transform& gripper_to_target_true,
                                       const DHChain& chain,
                                       const std::vector<JointState>& configs,
                                       const StationNoise& noise, std::uint64_t seed);

}  // namespace rocap
