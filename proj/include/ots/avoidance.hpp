#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ots/error.hpp"
#include "ots/model.hpp"

namespace ots {

struct AvoidanceConfig {
  double sample_time = 0.02;     // s
  double avoid_velocity = 0.5;   // actuator units per s
  double alpha_limit = 0.1047;   // rad

  static AvoidanceConfig five_bar_defaults() { return {0.020, 0.5, 0.1047}; }
  static AvoidanceConfig ups_rpu_defaults() { return {0.010, 0.01, 0.0349}; }

  /// Joint offset per accumulator count.
  double step() const { return avoid_velocity * sample_time; }
  void validate() const;
};

enum class Mode { Track, Avoid, Hold, Return };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

/// 1-based limb pair, first < second.
using LimbPair = std::pair<int, int>;

/// Candidate increments for the two selected accumulator rows, one column per
/// candidate.
inline constexpr std::array<std::array<int, 8>, 2> kCandidateIncrements{{
    {1, -1, 1, -1, 1, -1, 0, 0},
    {1, -1, -1, 1, 0, 0, 1, -1},
}};

struct AvoidanceState {
  std::vector<int> deviation;
  Mode mode = Mode::Track;
  std::optional<LimbPair> active_pair;
  std::optional<LimbPair> return_pair;

  AvoidanceState() = default;
  explicit AvoidanceState(int dof) : deviation(dof, 0) {}

  bool at_rest() const;
  int l1() const;
};

struct Candidate {
  int column = 0;
  std::vector<int> deviation;
  bool feasible = false;
  /// Pair element (avoid) or overall minimum index (return) at the candidate.
  double alpha = 0.0;
  Pose pose;
  std::string rejected;  // empty when feasible
};

struct Diagnostics {
  double alpha_ref = 0.0;
  double alpha_meas = 0.0;
  double alpha_des = 0.0;
  LimbPair meas_pair{0, 0};
  Mode mode = Mode::Track;
  std::vector<int> deviation;
  std::vector<Candidate> candidates;
  int selected_column = -1;
  bool no_improvement = false;
  bool measured_trigger = false;  // avoidance started by the measurement alone
  bool return_blocked = false;
  double step_time = 0.0;  // s, wall clock
};

struct StepResult {
  JointVector q_ref;
  JointVector q_des;
  Pose pose_des;
  AvoidanceState state;
  Diagnostics diag;
};

/// Raised when every candidate is infeasible; carries the tick diagnostics.
class TrappedError : public Error {
 public:
  TrappedError(const std::string& what, Diagnostics diag)
      : Error(ErrorKind::Trapped, what), diag_(std::move(diag)) {}
  const Diagnostics& diagnostics() const { return diag_; }

 private:
  Diagnostics diag_;
};

struct Decision {
  std::vector<int> deviation;
  std::vector<Candidate> candidates;
  int selected_column = -1;
  std::optional<Pose> pose;
  bool no_improvement = false;
  bool blocked = false;
};

/// Per-tick singularity avoidance. Holds no run state; the caller threads
/// `AvoidanceState` through successive ticks.
class Avoider {
 public:
  Avoider(const RobotModel& model, AvoidanceConfig config);

  const AvoidanceConfig& config() const { return config_; }
  const RobotModel& model() const { return model_; }

  StepResult step(const AvoidanceState& state, const Pose& x_ref, const Pose& x_meas) const;

  /// Moves the accumulator one count on the rows of `pair` to raise the pair
  /// index above `alpha_meas`. Throws TrappedError when no candidate is
  /// feasible.
  Decision avoid_modify(const std::vector<int>& deviation, const JointVector& q_ref, const Pose& seed,
                        double alpha_meas, LimbPair pair) const;

  /// Shrinks the accumulator toward zero on its two largest rows without
  /// re-entering the singular zone.
  Decision return_step(const std::vector<int>& deviation, const JointVector& q_ref, const Pose& seed) const;

  JointVector command(const JointVector& q_ref, const std::vector<int>& deviation) const;

 private:
  Candidate evaluate(const std::vector<int>& deviation, int column, const JointVector& q_ref, const Pose& seed) const;

  const RobotModel& model_;
  AvoidanceConfig config_;
};

/// Rows of the two largest |entries|, ties to the lowest index, 1-based and
/// ascending.
LimbPair largest_rows(const std::vector<int>& deviation);

}  // namespace ots
