#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "ots/error.hpp"
#include "ots/io.hpp"
#include "ots/planner.hpp"
#include "ots/ups_rpu.hpp"

namespace {

using namespace ots;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitConvention = 4;

constexpr double kDeg = std::numbers::pi / 180.0;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::ContractViolation:
      return kExitUsage;
    case ErrorKind::ConventionValidation:
      return kExitConvention;
    default:
      return kExitInfeasible;
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path + "'");
  return out;
}

void write_summary(const std::string& path, const std::string& json) {
  if (path.empty()) {
    std::cout << json << '\n';
  } else {
    open_out(path) << json << '\n';
  }
}

int finish(const io::RunConfig& cfg, const RunReport& report, const std::string& out_path,
           const std::string& summary_path) {
  auto out = open_out(out_path);
  io::write_report(out, cfg.robot, report);
  write_summary(summary_path, io::summary_json(cfg.robot, report));
  if (!report.complete) {
    std::cerr << "otsplan: run aborted: " << report.failure << '\n';
    return kExitInfeasible;
  }
  return kExitOk;
}

std::vector<Disturbance> parse_disturbances(const std::vector<std::vector<double>>& raw, const io::RunConfig& cfg) {
  std::vector<Disturbance> out;
  for (const auto& d : raw) {
    if (d.size() != static_cast<std::size_t>(2 + cfg.dof())) {
      throw Error(ErrorKind::Parse, "--disturb needs t0 t1 and " + std::to_string(cfg.dof()) + " pose offsets");
    }
    if (!(d[1] > d[0])) throw Error(ErrorKind::Parse, "--disturb window needs t1 > t0");
    Disturbance dist;
    dist.t0 = d[0];
    dist.t1 = d[1];
    dist.offset = io::pose_from_file_units(cfg.robot, std::vector<double>(d.begin() + 2, d.end()));
    out.push_back(dist);
  }
  return out;
}

void print_indices(const io::RunConfig& cfg, const RobotModel& model, const Pose& x) {
  const IndexVectors v = indices_at(model, x);
  std::cout << "pose";
  for (double c : io::pose_to_file_units(cfg.robot, x)) std::cout << ' ' << fmt(c);
  std::cout << '\n';
  auto show = [](const char* label, const std::vector<IndexPair>& pairs) {
    for (const auto& p : pairs) {
      std::cout << label << '_' << p.i << p.j << " = " << (p.value ? fmt(*p.value / kDeg) : "undefined") << " deg\n";
    }
  };
  show("theta", v.theta);
  show("omega", v.omega);
  try {
    const AlphaResult a = alpha(model, x);
    std::cout << "alpha = " << fmt(a.value / kDeg) << " deg (pair " << a.i << ',' << a.j << ")\n";
  } catch (const Error& e) {
    std::cout << "alpha = undefined (" << e.what() << ")\n";
  }
  std::cout << "detJD = " << fmt(jacobians(model, x).det_forward) << '\n';
}

void write_scan(std::ostream& out, const io::RunConfig& cfg, const RobotModel& model,
                const std::vector<Sample>& samples) {
  const int n = cfg.dof();
  out << 't';
  for (const auto& l : io::pose_labels(cfg.robot)) out << ',' << l;
  for (const char* kind : {"theta", "omega"}) {
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) out << ',' << kind << '_' << i << j;
    }
  }
  out << ",alpha,pair_i,pair_j,detjd\n" << std::setprecision(17);
  for (const auto& s : samples) {
    out << s.t;
    for (double c : io::pose_to_file_units(cfg.robot, s.pose)) out << ',' << c;
    const IndexVectors v = indices_at(model, s.pose);
    for (const auto* pairs : {&v.theta, &v.omega}) {
      for (const auto& p : *pairs) out << ',' << (p.value ? *p.value / kDeg : std::nan(""));
    }
    try {
      const AlphaResult a = alpha(model, s.pose);
      out << ',' << a.value / kDeg << ',' << a.i << ',' << a.j;
    } catch (const Error&) {
      out << ",nan,0,0";
    }
    out << ',' << jacobians(model, s.pose).det_forward << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type II singularity detection and avoidance for parallel robots"};
  app.require_subcommand(1);

  std::string config_path;
  std::string trajectory_path;
  std::string out_path;
  std::string summary_path;
  std::string pose_text;
  std::vector<std::vector<double>> disturb;
  bool ideal = false;
  double scan_step = 0.0;

  auto* offline = app.add_subcommand("plan-offline", "Offline planning; measurement = previous command");
  offline->add_option("--config", config_path, "Run config (INI)")->required()->check(CLI::ExistingFile);
  offline->add_option("--trajectory", trajectory_path, "Waypoint CSV")->required()->check(CLI::ExistingFile);
  offline->add_option("--out", out_path, "Report CSV")->required();
  offline->add_option("--summary", summary_path, "Summary JSON (default: stdout)");

  auto* online = app.add_subcommand("simulate-online", "Online planning against a simulated plant");
  online->add_option("--config", config_path, "Run config (INI)")->required()->check(CLI::ExistingFile);
  online->add_option("--trajectory", trajectory_path, "Waypoint CSV")->required()->check(CLI::ExistingFile);
  online->add_option("--out", out_path, "Report CSV")->required();
  online->add_option("--summary", summary_path, "Summary JSON (default: stdout)");
  online->add_option("--disturb", disturb, "Pose offset window: t0 t1 d1 .. dF (repeatable)")
      ->expected(3, 6)
      ->type_name("T0 T1 D...")
      ->allow_extra_args(false);
  online->add_flag("--ideal", ideal, "Zero noise and lag, measurements aligned with control ticks");

  auto* indices = app.add_subcommand("indices", "Print Theta/Omega indices, alpha and det J_D at a pose");
  indices->add_option("--config", config_path, "Run config (INI)")->required()->check(CLI::ExistingFile);
  indices->add_option("--pose", pose_text, "Comma-separated pose (m, deg)")->required();

  auto* scan = app.add_subcommand("scan", "Index table along an interpolated trajectory");
  scan->add_option("--config", config_path, "Run config (INI)")->required()->check(CLI::ExistingFile);
  scan->add_option("--trajectory", trajectory_path, "Waypoint CSV")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out_path, "Index CSV (default: stdout)");
  scan->add_option("--step", scan_step, "Sample step in s (default: config t_s)")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate-convention", "Check the spatial vertex convention");
  validate->add_option("--config", config_path, "Run config (INI)")->required()->check(CLI::ExistingFile);
  validate->add_option("--trajectory", trajectory_path, "Waypoints: start, singular pose, ...")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const io::RunConfig cfg = io::load_config(config_path);
    const auto model = cfg.make_model();

    if (offline->parsed()) {
      const auto waypoints = io::load_trajectory(trajectory_path, cfg.robot);
      return finish(cfg, run_offline(*model, cfg.avoidance, waypoints), out_path, summary_path);
    }
    if (online->parsed()) {
      const auto waypoints = io::load_trajectory(trajectory_path, cfg.robot);
      PlantOptions plant = ideal ? PlantOptions::ideal() : cfg.plant;
      plant.disturbances = parse_disturbances(disturb, cfg);
      return finish(cfg, run_online_sim(*model, cfg.avoidance, waypoints, plant), out_path, summary_path);
    }
    if (indices->parsed()) {
      print_indices(cfg, *model, io::pose_from_file_units(cfg.robot, io::parse_list(pose_text)));
      return kExitOk;
    }
    if (scan->parsed()) {
      const auto waypoints = io::load_trajectory(trajectory_path, cfg.robot);
      const auto samples = interpolate(waypoints, scan_step > 0.0 ? scan_step : cfg.avoidance.sample_time);
      if (out_path.empty()) {
        write_scan(std::cout, cfg, *model, samples);
      } else {
        auto out = open_out(out_path);
        write_scan(out, cfg, *model, samples);
      }
      return kExitOk;
    }
    if (validate->parsed()) {
      if (cfg.robot != io::RobotType::UpsRpu) throw Error(ErrorKind::Parse, "validate-convention needs robot 3ups_rpu");
      const std::string path = trajectory_path.empty() ? std::string(OTS_PRESET_DIR) + "/table5.csv" : trajectory_path;
      const auto waypoints = io::load_trajectory(path, cfg.robot);
      const Pose& start = waypoints[0].pose;
      const Pose& singular = waypoints[1].pose;
      const auto& model_ref = static_cast<const UpsRpu&>(*model);
      const ConventionCheck own = check_convention(model_ref, start, singular);
      auto line = [](const ConventionCheck& c) {
        std::cout << std::left << std::setw(14) << c.id << (c.passed ? "pass" : "FAIL")
                  << "  omega_min=" << fmt(c.omega_at_pose / kDeg) << " deg (" << c.pair_i << ',' << c.pair_j << ')';
        if (c.crossing) std::cout << "  crossing s=" << fmt(*c.crossing) << " omega=" << fmt(c.omega_at_crossing / kDeg);
        if (!c.passed) std::cout << "  " << c.reason;
        std::cout << '\n';
      };
      std::cout << "configured: ";
      line(own);
      if (own.passed) return kExitOk;
      std::cout << "enumerated variants:\n";
      for (const auto& c : check_all_conventions(model_ref.geometry(), cfg.stroke, start, singular)) line(c);
      throw Error(ErrorKind::ConventionValidation, "configured vertex convention fails validation");
    }
  } catch (const Error& e) {
    std::cerr << "otsplan: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "otsplan: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return kExitUsage;
}
