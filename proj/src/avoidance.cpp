#include "ots/avoidance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ots {

void AvoidanceConfig::validate() const {
  if (!(sample_time > 0.0)) throw Error(ErrorKind::ContractViolation, "sample time must be > 0");
  if (!(avoid_velocity > 0.0)) throw Error(ErrorKind::ContractViolation, "avoidance velocity must be > 0");
  if (!(alpha_limit > 0.0 && alpha_limit < std::numbers::pi / 2)) {
    throw Error(ErrorKind::ContractViolation, "alpha limit must lie in (0, pi/2)");
  }
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Track: return "TRACK";
    case Mode::Avoid: return "AVOID";
    case Mode::Hold: return "HOLD";
    case Mode::Return: return "RETURN";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& text) {
  for (Mode m : {Mode::Track, Mode::Avoid, Mode::Hold, Mode::Return}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

bool AvoidanceState::at_rest() const {
  return std::all_of(deviation.begin(), deviation.end(), [](int d) { return d == 0; });
}

int AvoidanceState::l1() const {
  return std::accumulate(deviation.begin(), deviation.end(), 0, [](int acc, int d) { return acc + std::abs(d); });
}

namespace {

int l1_norm(const std::vector<int>& d) {
  return std::accumulate(d.begin(), d.end(), 0, [](int acc, int v) { return acc + std::abs(v); });
}

std::vector<int> apply_column(const std::vector<int>& deviation, LimbPair rows, int column) {
  std::vector<int> out = deviation;
  out[rows.first - 1] += kCandidateIncrements[0][column];
  out[rows.second - 1] += kCandidateIncrements[1][column];
  return out;
}

}  // namespace

LimbPair largest_rows(const std::vector<int>& deviation) {
  const int n = static_cast<int>(deviation.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(deviation[a]) > std::abs(deviation[b]); });
  const int a = std::min(order[0], order[1]);
  const int b = std::max(order[0], order[1]);
  return {a + 1, b + 1};
}

Avoider::Avoider(const RobotModel& model, AvoidanceConfig config) : model_(model), config_(config) {
  config_.validate();
}

JointVector Avoider::command(const JointVector& q_ref, const std::vector<int>& deviation) const {
  JointVector q = q_ref;
  for (Eigen::Index k = 0; k < q.size(); ++k) q(k) += config_.step() * deviation[k];
  return q;
}

Candidate Avoider::evaluate(const std::vector<int>& deviation, int column, const JointVector& q_ref,
                            const Pose& seed) const {
  Candidate c;
  c.column = column;
  c.deviation = deviation;
  const JointVector q = command(q_ref, deviation);
  if (!model_.joint_limits().contains(q)) {
    c.rejected = "joint limits";
    return c;
  }
  try {
    c.pose = model_.forward_kinematics(q, seed);
    c.feasible = true;
  } catch (const Error& e) {
    c.rejected = e.what();
  }
  return c;
}

Decision Avoider::avoid_modify(const std::vector<int>& deviation, const JointVector& q_ref, const Pose& seed,
                               double alpha_meas, LimbPair pair) const {
  Decision out;
  out.deviation = deviation;
  int best = -1;
  for (int k = 0; k < 8; ++k) {
    Candidate c = evaluate(apply_column(deviation, pair, k), k, q_ref, seed);
    if (c.feasible) {
      try {
        const IndexVectors v = indices_at(model_, c.pose);
        const IndexPair& p = find_pair(active_indices(model_, v), pair.first, pair.second);
        if (p.defined()) {
          c.alpha = *p.value;
        } else {
          c.feasible = false;
          c.rejected = "undefined index";
        }
      } catch (const Error& e) {
        c.feasible = false;
        c.rejected = e.what();
      }
    }
    // Strict comparison keeps the lowest column on ties.
    if (c.feasible && (best < 0 || c.alpha > out.candidates[best].alpha)) best = k;
    out.candidates.push_back(std::move(c));
  }
  if (best < 0) {
    Diagnostics diag;
    diag.candidates = out.candidates;
    diag.deviation = deviation;
    diag.alpha_meas = alpha_meas;
    diag.meas_pair = pair;
    diag.mode = Mode::Avoid;
    throw TrappedError("no feasible avoidance candidate", std::move(diag));
  }
  if (out.candidates[best].alpha > alpha_meas) {
    out.selected_column = best;
    out.deviation = out.candidates[best].deviation;
    out.pose = out.candidates[best].pose;
  } else {
    out.no_improvement = true;
  }
  return out;
}

Decision Avoider::return_step(const std::vector<int>& deviation, const JointVector& q_ref, const Pose& seed) const {
  Decision out;
  out.deviation = deviation;
  const LimbPair rows = largest_rows(deviation);
  const int current = l1_norm(deviation);
  int best = -1;
  int best_l1 = 0;
  for (int k = 0; k < 8; ++k) {
    std::vector<int> next = apply_column(deviation, rows, k);
    bool shrinks = l1_norm(next) < current;
    for (std::size_t r = 0; r < next.size() && shrinks; ++r) {
      // Entrywise: magnitude may not grow and the sign may not flip.
      if (std::abs(next[r]) > std::abs(deviation[r]) || next[r] * deviation[r] < 0) shrinks = false;
    }
    Candidate c;
    if (!shrinks) {
      c.column = k;
      c.deviation = std::move(next);
      c.rejected = "does not shrink";
    } else {
      c = evaluate(next, k, q_ref, seed);
      if (c.feasible) {
        try {
          c.alpha = alpha(model_, c.pose).value;
          if (c.alpha < config_.alpha_limit) {
            c.feasible = false;
            c.rejected = "re-enters singular zone";
          }
        } catch (const Error& e) {
          c.feasible = false;
          c.rejected = e.what();
        }
      }
    }
    if (c.feasible) {
      const int l1 = l1_norm(c.deviation);
      const bool better = best < 0 || l1 < best_l1 || (l1 == best_l1 && c.alpha > out.candidates[best].alpha);
      if (better) {
        best = k;
        best_l1 = l1;
      }
    }
    out.candidates.push_back(std::move(c));
  }
  if (best < 0) {
    out.blocked = true;
    return out;
  }
  out.selected_column = best;
  out.deviation = out.candidates[best].deviation;
  out.pose = out.candidates[best].pose;
  return out;
}

StepResult Avoider::step(const AvoidanceState& state, const Pose& x_ref, const Pose& x_meas) const {
  const auto started = std::chrono::steady_clock::now();
  const double lim = config_.alpha_limit;

  StepResult out;
  out.state = state;
  out.q_ref = model_.inverse_kinematics(x_ref);
  const AlphaResult a_ref = alpha(model_, x_ref);
  const AlphaResult a_meas = alpha(model_, x_meas);
  Diagnostics& diag = out.diag;
  diag.alpha_ref = a_ref.value;
  diag.alpha_meas = a_meas.value;
  diag.meas_pair = {a_meas.i, a_meas.j};

  std::optional<Pose> pose_des;
  AvoidanceState& next = out.state;
  if (a_ref.value < lim || a_meas.value < lim) {
    if (a_meas.value > lim && a_ref.value < lim) {
      next.mode = Mode::Hold;
    } else {
      next.mode = Mode::Avoid;
      next.active_pair = diag.meas_pair;
      diag.measured_trigger = a_ref.value >= lim;
      try {
        Decision d = avoid_modify(state.deviation, out.q_ref, x_meas, a_meas.value, diag.meas_pair);
        next.deviation = d.deviation;
        diag.candidates = std::move(d.candidates);
        diag.selected_column = d.selected_column;
        diag.no_improvement = d.no_improvement;
        pose_des = d.pose;
      } catch (TrappedError& e) {
        Diagnostics full = e.diagnostics();
        full.alpha_ref = a_ref.value;
        full.measured_trigger = diag.measured_trigger;
        throw TrappedError(e.what(), std::move(full));
      }
    }
  } else if (!state.at_rest()) {
    next.mode = Mode::Return;
    Decision d = return_step(state.deviation, out.q_ref, x_meas);
    next.return_pair = largest_rows(state.deviation);
    next.deviation = d.deviation;
    diag.candidates = std::move(d.candidates);
    diag.selected_column = d.selected_column;
    diag.return_blocked = d.blocked;
    pose_des = d.pose;
  } else {
    next.mode = Mode::Track;
    next.active_pair.reset();
    next.return_pair.reset();
  }

  out.q_des = command(out.q_ref, next.deviation);
  if (next.mode == Mode::Track) {
    out.pose_des = x_ref;
  } else if (pose_des) {
    out.pose_des = *pose_des;
  } else {
    try {
      out.pose_des = model_.forward_kinematics(out.q_des, x_meas);
    } catch (const Error& e) {
      diag.mode = next.mode;
      diag.deviation = next.deviation;
      throw TrappedError(std::string("held command infeasible: ") + e.what(), diag);
    }
  }
  if (next.at_rest() && next.mode == Mode::Return) {
    next.return_pair.reset();
    next.active_pair.reset();
  }

  diag.mode = next.mode;
  diag.deviation = next.deviation;
  diag.alpha_des = next.mode == Mode::Track ? a_ref.value : alpha(model_, out.pose_des).value;
  diag.step_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace ots
