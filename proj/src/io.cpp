#include "ots/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "ots/error.hpp"

namespace ots::io {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "not a number: '" + text + "'");
  }
}

int to_int(const std::string& text) {
  const double v = to_double(text);
  if (v != std::floor(v)) throw Error(ErrorKind::Parse, "not an integer: '" + text + "'");
  return static_cast<int>(v);
}

using boost::property_tree::ptree;

double get(const ptree& tree, const std::string& key, double fallback) {
  const auto v = tree.get_optional<std::string>(key);
  return v ? to_double(trim(*v)) : fallback;
}

std::array<double, 3> get3(const ptree& tree, const std::string& key, const std::array<double, 3>& fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  const auto vals = parse_list(*v);
  if (vals.size() == 1) return {vals[0], vals[0], vals[0]};
  if (vals.size() != 3) throw Error(ErrorKind::Parse, key + " needs 1 or 3 values");
  return {vals[0], vals[1], vals[2]};
}

std::string flags_text(const ReportRow& r) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(r.no_improvement, "no_improvement");
  add(r.measured_trigger, "measured_trigger");
  add(r.return_blocked, "return_blocked");
  return out.empty() ? "none" : out;
}

}  // namespace

const char* to_string(RobotType type) { return type == RobotType::FiveBar ? "5r" : "3ups_rpu"; }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : split(text, ',')) {
    if (cell.empty()) throw Error(ErrorKind::Parse, "empty list entry in '" + text + "'");
    out.push_back(to_double(cell));
  }
  return out;
}

std::unique_ptr<RobotModel> RunConfig::make_model() const {
  if (robot == RobotType::FiveBar) return std::make_unique<FiveBar>(five_bar, working_mode, five_bar_limits);
  return std::make_unique<UpsRpu>(spatial, stroke);
}

RunConfig default_config(RobotType robot) {
  RunConfig cfg;
  cfg.robot = robot;
  cfg.avoidance = robot == RobotType::FiveBar ? AvoidanceConfig::five_bar_defaults()
                                              : AvoidanceConfig::ups_rpu_defaults();
  return cfg;
}

RunConfig parse_config(std::istream& in) {
  ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  const std::string type = trim(tree.get<std::string>("robot.type", ""));
  RobotType robot;
  if (type == "5r") {
    robot = RobotType::FiveBar;
  } else if (type == "3ups_rpu") {
    robot = RobotType::UpsRpu;
  } else {
    throw Error(ErrorKind::Parse, "robot.type must be 5r or 3ups_rpu, got '" + type + "'");
  }
  RunConfig cfg = default_config(robot);
  const ptree empty;
  const ptree& geo = tree.get_child("geometry", empty);
  const ptree& lim = tree.get_child("limits", empty);
  const ptree& av = tree.get_child("avoidance", empty);
  const ptree& pl = tree.get_child("plant", empty);

  if (robot == RobotType::FiveBar) {
    auto& g = cfg.five_bar;
    g.r10 = get(geo, "r10", g.r10);
    g.r20 = get(geo, "r20", g.r20);
    g.r11 = get(geo, "r11", g.r11);
    g.r21 = get(geo, "r21", g.r21);
    g.r12 = get(geo, "r12", g.r12);
    g.r22 = get(geo, "r22", g.r22);
    if (const auto mode = geo.get_optional<std::string>("working_mode")) {
      const auto parsed = WorkingMode::parse(trim(*mode));
      if (!parsed) throw Error(ErrorKind::Parse, "unknown working_mode '" + *mode + "'");
      cfg.working_mode = *parsed;
    }
    const auto qmin = lim.get_optional<std::string>("q_min");
    const auto qmax = lim.get_optional<std::string>("q_max");
    if (qmin || qmax) {
      JointLimits jl;
      jl.lower = JointVector::Constant(2, -180.0 * kDeg);
      jl.upper = JointVector::Constant(2, 180.0 * kDeg);
      auto fill = [](const std::string& text, JointVector& dst) {
        const auto vals = parse_list(text);
        if (vals.size() != 2) throw Error(ErrorKind::Parse, "five-bar joint limits need 2 values");
        dst << vals[0] * kDeg, vals[1] * kDeg;
      };
      if (qmin) fill(*qmin, jl.lower);
      if (qmax) fill(*qmax, jl.upper);
      cfg.five_bar_limits = jl;
    }
  } else {
    auto& g = cfg.spatial;
    g.fixed_radius = get3(geo, "R", g.fixed_radius);
    g.fixed_radius[0] = get(geo, "R1", g.fixed_radius[0]);
    g.fixed_radius[1] = get(geo, "R2", g.fixed_radius[1]);
    g.fixed_radius[2] = get(geo, "R3", g.fixed_radius[2]);
    g.beta_fd = get(geo, "beta_fd", g.beta_fd / kDeg) * kDeg;
    g.beta_fi = get(geo, "beta_fi", g.beta_fi / kDeg) * kDeg;
    g.ds = get(geo, "ds", g.ds);
    g.mobile_radius = get3(geo, "Rm", g.mobile_radius);
    g.mobile_radius[0] = get(geo, "Rm1", g.mobile_radius[0]);
    g.mobile_radius[1] = get(geo, "Rm2", g.mobile_radius[1]);
    g.mobile_radius[2] = get(geo, "Rm3", g.mobile_radius[2]);
    g.beta_md = get(geo, "beta_md", g.beta_md / kDeg) * kDeg;
    g.beta_mi = get(geo, "beta_mi", g.beta_mi / kDeg) * kDeg;
    if (const auto conv = geo.get_optional<std::string>("convention")) {
      const auto idx = find_convention(trim(*conv));
      if (!idx) throw Error(ErrorKind::Parse, "unknown vertex convention '" + *conv + "'");
      g.convention = *idx;
    }
    const auto fa = geo.get_optional<std::string>("fixed_angles");
    const auto ma = geo.get_optional<std::string>("mobile_angles");
    if (fa || ma) {
      if (!fa || !ma) throw Error(ErrorKind::Parse, "fixed_angles and mobile_angles go together");
      const auto f = parse_list(*fa);
      const auto m = parse_list(*ma);
      if (f.size() != 3 || m.size() != 3) throw Error(ErrorKind::Parse, "vertex angles need 3 values each");
      g.custom_layout = VertexLayout{{f[0] * kDeg, f[1] * kDeg, f[2] * kDeg}, {m[0] * kDeg, m[1] * kDeg, m[2] * kDeg}};
    }
    cfg.stroke.min = get(lim, "stroke_min", cfg.stroke.min);
    cfg.stroke.max = get(lim, "stroke_max", cfg.stroke.max);
  }

  cfg.avoidance.sample_time = get(av, "t_s", cfg.avoidance.sample_time);
  cfg.avoidance.avoid_velocity = get(av, "v_d", cfg.avoidance.avoid_velocity);
  cfg.avoidance.alpha_limit = get(av, "lim_alpha", cfg.avoidance.alpha_limit / kDeg) * kDeg;

  cfg.plant.measurement_rate = get(pl, "measurement_rate", cfg.plant.measurement_rate);
  cfg.plant.lag = get(pl, "lag", cfg.plant.lag);
  cfg.plant.noise_position = get(pl, "noise_position", cfg.plant.noise_position);
  cfg.plant.noise_angle = get(pl, "noise_angle", cfg.plant.noise_angle / kDeg) * kDeg;
  cfg.plant.seed = static_cast<unsigned>(get(pl, "seed", cfg.plant.seed));

  // Validate against the model invariants before any run.
  cfg.avoidance.validate();
  (void)cfg.make_model();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open config '" + path + "'");
  return parse_config(in);
}

std::vector<std::string> pose_labels(RobotType robot) {
  if (robot == RobotType::FiveBar) return {"x", "y"};
  return {"x", "z", "theta", "psi"};
}

std::vector<std::string> joint_labels(RobotType robot) {
  if (robot == RobotType::FiveBar) return {"q11", "q21"};
  return {"q13", "q23", "q33", "q42"};
}

std::vector<bool> pose_angle_mask(RobotType robot) {
  if (robot == RobotType::FiveBar) return {false, false};
  return {false, false, true, true};
}

std::vector<bool> joint_angle_mask(RobotType robot) {
  if (robot == RobotType::FiveBar) return {true, true};
  return {false, false, false, false};
}

namespace {

SmallVector from_file(const std::vector<bool>& mask, const std::vector<double>& values) {
  SmallVector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) out(k) = mask[k] ? values[k] * kDeg : values[k];
  return out;
}

std::vector<double> to_file(const std::vector<bool>& mask, const SmallVector& v) {
  std::vector<double> out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = mask[k] ? v(k) / kDeg : v(k);
  return out;
}

}  // namespace

Pose pose_from_file_units(RobotType robot, const std::vector<double>& values) {
  const auto mask = pose_angle_mask(robot);
  if (values.size() != mask.size()) throw Error(ErrorKind::Parse, "wrong number of pose coordinates");
  return from_file(mask, values);
}

std::vector<double> pose_to_file_units(RobotType robot, const Pose& pose) {
  return to_file(pose_angle_mask(robot), pose);
}

std::vector<Waypoint> read_trajectory(std::istream& in, RobotType robot) {
  const std::size_t width = pose_labels(robot).size() + 1;
  std::vector<Waypoint> out;
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto cells = split(t, ',');
    if (cells.size() != width) {
      std::ostringstream msg;
      msg << "trajectory line " << line_no << ": expected " << width << " columns";
      throw Error(ErrorKind::Parse, msg.str());
    }
    std::vector<double> coords;
    for (std::size_t k = 1; k < cells.size(); ++k) coords.push_back(to_double(cells[k]));
    out.push_back({to_double(cells[0]), pose_from_file_units(robot, coords)});
  }
  if (out.size() < 2) throw Error(ErrorKind::Parse, "trajectory needs a header and at least two waypoints");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!(out[k].t > out[k - 1].t)) throw Error(ErrorKind::Parse, "trajectory times must increase strictly");
  }
  return out;
}

std::vector<Waypoint> load_trajectory(const std::string& path, RobotType robot) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open trajectory '" + path + "'");
  return read_trajectory(in, robot);
}

void write_trajectory(std::ostream& out, RobotType robot, const std::vector<Waypoint>& waypoints) {
  out << "t";
  for (const auto& l : pose_labels(robot)) out << ',' << l;
  out << '\n' << std::setprecision(17);
  for (const auto& w : waypoints) {
    out << w.t;
    for (double v : pose_to_file_units(robot, w.pose)) out << ',' << v;
    out << '\n';
  }
}

std::vector<std::string> report_columns(RobotType robot) {
  std::vector<std::string> cols{"t", "t_meas"};
  for (const char* prefix : {"xr_", "xm_", "xd_"}) {
    for (const auto& l : pose_labels(robot)) cols.push_back(prefix + l);
  }
  for (const char* prefix : {"r_", "d_"}) {
    for (const auto& l : joint_labels(robot)) cols.push_back(l + "_" + std::string(prefix).substr(0, 1));
  }
  for (const char* c : {"alpha_r", "alpha_m", "alpha_d", "detjd_r", "detjd_d"}) cols.emplace_back(c);
  const auto n = joint_labels(robot).size();
  for (std::size_t k = 1; k <= n; ++k) cols.push_back("dl_" + std::to_string(k));
  for (const char* c : {"mode", "pair_i", "pair_j", "flags", "step_time_us"}) cols.emplace_back(c);
  return cols;
}

void write_report(std::ostream& out, RobotType robot, const RunReport& report) {
  const auto cols = report_columns(robot);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n' << std::setprecision(17);
  const auto pmask = pose_angle_mask(robot);
  const auto jmask = joint_angle_mask(robot);
  for (const auto& r : report.rows) {
    out << r.t << ',' << r.t_meas;
    for (const Pose* p : {&r.x_ref, &r.x_meas, &r.x_des}) {
      for (double v : to_file(pmask, *p)) out << ',' << v;
    }
    for (const JointVector* q : {&r.q_ref, &r.q_des}) {
      for (double v : to_file(jmask, *q)) out << ',' << v;
    }
    out << ',' << r.alpha_ref / kDeg << ',' << r.alpha_meas / kDeg << ',' << r.alpha_des / kDeg;
    out << ',' << r.det_ref << ',' << r.det_des;
    for (int d : r.deviation) out << ',' << d;
    out << ',' << to_string(r.mode) << ',' << r.pair.first << ',' << r.pair.second << ',' << flags_text(r);
    out << ',' << r.step_time * 1e6 << '\n';
  }
}

std::vector<ReportRow> read_report(std::istream& in, RobotType robot) {
  const auto cols = report_columns(robot);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty report");
  if (split(trim(line), ',') != cols) throw Error(ErrorKind::Parse, "report header does not match schema");
  const auto np = pose_labels(robot).size();
  const auto nj = joint_labels(robot).size();
  const auto pmask = pose_angle_mask(robot);
  const auto jmask = joint_angle_mask(robot);

  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != cols.size()) throw Error(ErrorKind::Parse, "report row has wrong width");
    std::size_t c = 0;
    auto next_vec = [&](std::size_t n, const std::vector<bool>& mask) {
      std::vector<double> vals;
      for (std::size_t k = 0; k < n; ++k) vals.push_back(to_double(cells[c++]));
      return from_file(mask, vals);
    };
    ReportRow r;
    r.t = to_double(cells[c++]);
    r.t_meas = to_double(cells[c++]);
    r.x_ref = next_vec(np, pmask);
    r.x_meas = next_vec(np, pmask);
    r.x_des = next_vec(np, pmask);
    r.q_ref = next_vec(nj, jmask);
    r.q_des = next_vec(nj, jmask);
    r.alpha_ref = to_double(cells[c++]) * kDeg;
    r.alpha_meas = to_double(cells[c++]) * kDeg;
    r.alpha_des = to_double(cells[c++]) * kDeg;
    r.det_ref = to_double(cells[c++]);
    r.det_des = to_double(cells[c++]);
    for (std::size_t k = 0; k < nj; ++k) r.deviation.push_back(to_int(cells[c++]));
    const auto mode = parse_mode(cells[c++]);
    if (!mode) throw Error(ErrorKind::Parse, "unknown mode");
    r.mode = *mode;
    r.pair.first = to_int(cells[c++]);
    r.pair.second = to_int(cells[c++]);
    const std::string flags = cells[c++];
    if (flags != "none") {
      for (const auto& f : split(flags, '|')) {
        if (f == "no_improvement") r.no_improvement = true;
        else if (f == "measured_trigger") r.measured_trigger = true;
        else if (f == "return_blocked") r.return_blocked = true;
        else throw Error(ErrorKind::Parse, "unknown flag '" + f + "'");
      }
    }
    r.step_time = to_double(cells[c++]) * 1e-6;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_json(RobotType robot, const RunReport& report) {
  const bool angular = robot == RobotType::FiveBar;
  const double scale = angular ? 1.0 / kDeg : 1000.0;
  std::vector<int> max_dev(report.rows.empty() ? 0 : report.rows.front().deviation.size(), 0);
  for (const auto& r : report.rows) {
    for (std::size_t k = 0; k < max_dev.size(); ++k) max_dev[k] = std::max(max_dev[k], std::abs(r.deviation[k]));
  }
  nlohmann::ordered_json j;
  j["robot"] = to_string(robot);
  j["complete"] = report.complete;
  if (!report.complete) j["failure"] = report.failure;
  j["samples"] = report.summary.samples;
  j["t_l_ms"] = report.summary.mean_step_time * 1e3;
  j["delta_q"] = report.summary.max_joint_deviation * scale;
  j["delta_qdot"] = report.summary.mean_rate_deviation * scale;
  j["delta_q_unit"] = angular ? "deg" : "mm";
  j["delta_qdot_unit"] = angular ? "deg/s" : "mm/s";
  j["max_abs_dl"] = max_dev;
  return j.dump(2);
}

}  // namespace ots::io
