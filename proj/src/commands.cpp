#include "qmeas/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "qmeas/error.hpp"

#ifndef QMEAS_VERSION
#define QMEAS_VERSION "unknown"
#endif

namespace qmeas {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : f_(std::fopen(path.c_str(), "wb")), width_(header.size()), path_(path) {
  if (!f_) throw Error(ErrorKind::config, "cannot write '" + path + "'");
  row(header);
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw Error(ErrorKind::contract_violation, path_ + ": row width does not match header");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', f_);
    std::fputs(cells[i].c_str(), f_);
  }
  std::fputc('\n', f_);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

namespace {

struct Run {
  const ExperimentConfig& cfg;
  fs::path dir;
  json outputs = json::array();
  json invariants = json::object();
  json extra = json::object();

  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }
};

json summary_json(const InvariantSummary& s) {
  return {{"max_trace_deviation", s.max_trace_deviation},
          {"max_hermiticity_error", s.max_hermiticity_error},
          {"min_eigenvalue", s.min_eigenvalue},
          {"max_leak", s.max_leak}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

double periods(double t) { return t / kDrivePeriod; }

StateVector initial_psi(const ExperimentConfig& c) {
  return initial_state(c.c_g, c.c_e, c.alpha, c.model);
}

void cmd_potential(Run& run) {
  const auto& c = run.cfg;
  std::vector<double> q(c.potential.n_q);
  for (int i = 0; i < c.potential.n_q; ++i) {
    q[i] = c.potential.q_min + (c.potential.q_max - c.potential.q_min) * i / (c.potential.n_q - 1);
  }
  const auto vm = effective_potential(q, -1.0, c.model);
  const auto v0 = effective_potential(q, 0.0, c.model);
  const auto vp = effective_potential(q, 1.0, c.model);
  CsvWriter csv(run.file("potential.csv"), {"q", "V_minus", "V_zero", "V_plus"});
  for (std::size_t i = 0; i < q.size(); ++i) csv.row(std::vector<double>{q[i], vm[i], v0[i], vp[i]});
}

void write_wigner(Run& run, const DensitySnapshot& snap, int index) {
  const WignerField w = wigner(partial_trace_qubit(snap.rho), run.cfg.wigner);
  char name[32];
  std::snprintf(name, sizeof name, "wigner_%02d.csv", index);
  CsvWriter csv(run.file(name), {"q", "p", "W"});
  for (int i = 0; i < w.grid.n_q; ++i) {
    for (int j = 0; j < w.grid.n_p; ++j) {
      csv.row(std::vector<double>{w.grid.q(i), w.grid.p(j), w.values(i, j)});
    }
  }
  run.extra["wigner_snapshots"].push_back(
      {{"file", name}, {"t_over_2pi", snap.t_periods}, {"integral", w.integral()}});
}

void cmd_master(Run& run) {
  const auto& c = run.cfg;
  const MasterRunOutput out =
      integrate_master(DensityMatrix::from_pure(initial_psi(c)), c.model, c.master);
  {
    CsvWriter csv(run.file("master.csv"),
                  {"t_over_2pi", "rho_gg", "rho_ee", "abs_rho_ge", "S_Q", "S_O", "S", "I", "leak",
                   "q", "p", "sigma_z", "trace_deviation", "min_eigenvalue"});
    for (const auto& s : out.samples) {
      csv.row(std::vector<double>{periods(s.t), s.qubit.rho_gg, s.qubit.rho_ee,
                                  s.qubit.abs_rho_ge, s.entropy.s_q, s.entropy.s_o, s.entropy.s,
                                  s.entropy.index, s.leak, s.q, s.p, s.sigma_z, s.trace_deviation,
                                  s.min_eigenvalue});
    }
  }
  run.extra["wigner_snapshots"] = json::array();
  for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
    write_wigner(run, out.snapshots[k], static_cast<int>(k));
  }
  run.invariants = summary_json(out.summary);
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& r) {
  CsvWriter csv(path, {"t_over_2pi", "p_g", "q", "p", "sigma_z", "abs_rho_ge", "S_Q", "leak"});
  for (const auto& s : r.samples) {
    csv.row(std::vector<double>{periods(s.t), s.p_g, s.q, s.p, s.sigma_z, s.abs_rho_ge, s.s_q,
                                s.leak});
  }
}

double max_leak(const TrajectoryRecord& r) {
  double m = 0.0;
  for (const auto& s : r.samples) m = std::max(m, s.leak);
  return m;
}

void cmd_trajectory(Run& run) {
  const auto& c = run.cfg;
  const TrajectoryRecord r = run_trajectory(initial_psi(c), c.model, c.trajectory);
  write_trajectory_csv(run.file("trajectory.csv"), r);
  json sw = json::array();
  for (const auto& e : find_switches(r, c.born.thresholds)) {
    sw.push_back({{"from", to_string(e.from)},
                  {"to", to_string(e.to)},
                  {"t_leave_over_2pi", periods(e.t_leave)},
                  {"t_enter_over_2pi", periods(e.t_enter)},
                  {"peak_S_Q", e.peak_s_q}});
  }
  run.extra["switches"] = sw;
  run.invariants = {{"max_leak", max_leak(r)}};
}

void cmd_ensemble(Run& run) {
  const auto& c = run.cfg;
  const EnsembleResult ens = run_ensemble(initial_psi(c), c.model, c.born.ensemble);
  const BornReport rep = born_report(ens, c.c_g, c.c_e, c.model, c.born);
  {
    CsvWriter csv(run.file("ensemble_mean.csv"),
                  {"t_over_2pi", "q", "q_se", "p", "p_se", "sigma_z", "sigma_z_se", "p_g", "p_g_se"});
    const auto& m = ens.mean;
    for (std::size_t k = 0; k < m.t.size(); ++k) {
      csv.row(std::vector<double>{periods(m.t[k]), m.q[k], m.q_se[k], m.p[k], m.p_se[k],
                                  m.sigma_z[k], m.sigma_z_se[k], m.p_g[k], m.p_g_se[k]});
    }
  }
  {
    CsvWriter csv(run.file("outcomes.csv"), {"index", "seed", "outcome"});
    for (std::size_t k = 0; k < ens.records.size(); ++k) {
      csv.row(std::vector<std::string>{
          std::to_string(ens.indices[k]), std::to_string(ens.records[k].seed),
          to_string(classify_outcome(ens.records[k], c.born.window_periods, c.born.thresholds))});
    }
  }
  json failures = json::array();
  for (const auto& f : ens.failures) {
    failures.push_back(
        {{"index", f.index}, {"seed", f.seed}, {"error_kind", f.error_kind}, {"message", f.message}});
  }
  const json report = {{"n_traj", c.born.ensemble.n_traj},
                       {"n_ground", rep.n_ground},
                       {"n_excited", rep.n_excited},
                       {"n_undecided", rep.n_undecided},
                       {"n_failed", rep.n_failed},
                       {"fraction_g", rep.fraction_g},
                       {"standard_error", rep.standard_error},
                       {"expected_g", rep.expected_g},
                       {"expected_e", rep.expected_e},
                       {"z_score", rep.z_score},
                       {"z_threshold", rep.z_threshold},
                       {"valid", rep.valid},
                       {"pass", rep.pass},
                       {"failures", failures}};
  write_json(run.file("born_report.json"), report);
  double leak = 0.0;
  for (const auto& r : ens.records) leak = std::max(leak, max_leak(r));
  run.invariants = {{"max_leak", leak}, {"failed_trajectories", rep.n_failed}};
}

void cmd_poincare(Run& run) {
  const auto& c = run.cfg;
  const auto& pc = c.poincare;

  // Sign-convention gate: classical equations against the quantum drift.
  json gate = json::object();
  bool gate_pass = true;
  for (int branch : {-1, 1}) {
    const EhrenfestReport er =
        ehrenfest_consistency(c.model, branch, pc.ehrenfest_alpha, pc.ehrenfest_horizon);
    gate[branch < 0 ? "branch_minus" : "branch_plus"] = er.max_deviation;
    gate_pass = gate_pass && er.max_deviation < pc.ehrenfest_tolerance;
  }
  gate["tolerance"] = pc.ehrenfest_tolerance;
  gate["pass"] = gate_pass;
  if (!gate_pass) {
    std::fprintf(stderr,
                 "warning: Ehrenfest gate failed (see manifest); region A is not trusted\n");
  }

  const ClassicalTrajectory periodic =
      integrate_classical(pc.classical_start, -1, c.model, pc.classical);
  const ClassicalTrajectory chaotic =
      integrate_classical(pc.classical_start, 1, c.model, pc.classical);
  const double extent = cloud_diameter(chaotic.section, pc.transient_periods);
  const double periodic_diameter = cloud_diameter(periodic.section, pc.transient_periods);
  const RegionBox box =
      calibrate_region_a(periodic.section, pc.transient_periods, extent, pc.pad_fraction);

  CsvWriter csv(run.file("poincare.csv"),
                {"source", "index", "period", "t_over_2pi", "q", "p", "label"});
  for (const auto* tr : {&periodic, &chaotic}) {
    for (const auto& pt : tr->section.points) {
      csv.row(std::vector<std::string>{"classical", std::to_string(tr->branch),
                                       std::to_string(pt.period), format_double(periods(pt.t)),
                                       format_double(pt.q), format_double(pt.p),
                                       to_string(pt.label)});
    }
  }

  json quantum = json::array();
  double leak = 0.0;
  const StateVector psi0 = initial_psi(c);
  for (int k = 0; k < pc.n_traj; ++k) {
    TrajectoryConfig tc = c.trajectory;
    tc.seed = derive_seed(c.born.ensemble.master_seed, static_cast<std::uint64_t>(k));
    tc.keep_final_state = false;
    const TrajectoryRecord r = run_trajectory(psi0, c.model, tc);
    leak = std::max(leak, max_leak(r));
    const PoincareSection sec = poincare_section(r, c.born.thresholds);
    for (const auto& pt : sec.points) {
      csv.row(std::vector<std::string>{"quantum", std::to_string(k), std::to_string(pt.period),
                                       format_double(periods(pt.t)), format_double(pt.q),
                                       format_double(pt.p), to_string(pt.label)});
    }
    quantum.push_back(
        {{"index", k},
         {"seed", tc.seed},
         {"qubit_outcome",
          to_string(classify_outcome(r, c.born.window_periods, c.born.thresholds))},
         {"region_outcome", to_string(classify_by_region(sec, box, kDrivePeriod))}});
  }

  const json region = {{"q_min", box.q_min},
                       {"q_max", box.q_max},
                       {"p_min", box.p_min},
                       {"p_max", box.p_max},
                       {"trusted", gate_pass},
                       {"periodic_cloud_diameter", periodic_diameter},
                       {"chaotic_attractor_extent", extent},
                       {"ehrenfest_gate", gate},
                       {"quantum_trajectories", quantum}};
  write_json(run.file("region_a.json"), region);
  run.invariants = {{"max_leak", leak}};
}

void cmd_zeno(Run& run) {
  const auto& c = run.cfg;
  ModelParams params = c.model;
  params.epsilon = c.zeno.epsilon;
  MasterRunConfig mc = c.master;
  mc.t_end_periods = c.zeno.t_end_periods;
  mc.snapshot_periods.clear();
  const ZenoSeries z = zeno_experiment(params, c.alpha, mc);
  CsvWriter csv(run.file("zeno.csv"), {"t", "t_over_2pi", "sigma_z_coupled", "sigma_z_free"});
  for (std::size_t k = 0; k < z.t.size(); ++k) {
    csv.row(std::vector<double>{z.t[k], periods(z.t[k]), z.coupled_sigma_z[k], z.free_sigma_z[k]});
  }
  run.invariants = summary_json(z.summary);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"potential", "master",   "trajectory",
                                                 "ensemble",  "poincare", "zeno"};
  return names;
}

json run_command(const std::string& command, const ExperimentConfig& cfg,
                 const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  Run run{cfg, fs::path(out_dir)};

  if (command == "potential") cmd_potential(run);
  else if (command == "master") cmd_master(run);
  else if (command == "trajectory") cmd_trajectory(run);
  else if (command == "ensemble") cmd_ensemble(run);
  else if (command == "poincare") cmd_poincare(run);
  else if (command == "zeno") cmd_zeno(run);
  else throw Error(ErrorKind::config, "unknown command '" + command + "'");

  const json resolved = to_json(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {
      {"artifact", "qmeas"},
      {"version", QMEAS_VERSION},
      {"command", command},
      {"config", resolved},
      {"config_digest", config_digest(resolved)},
      {"seeds",
       {{"trajectory_seed", cfg.trajectory.seed}, {"master_seed", cfg.born.ensemble.master_seed}}},
      {"workers", cfg.born.ensemble.workers},
      {"integrator",
       {{"master", {{"method", "rk4"}, {"dt", cfg.master.dt()}}},
        {"qsd", {{"method", to_string(cfg.trajectory.scheme)}, {"dt", cfg.trajectory.dt()}}},
        {"classical",
         {{"method", "rk4"}, {"dt", kDrivePeriod / cfg.poincare.classical.steps_per_period}}}}},
      {"invariants", run.invariants},
      {"outputs", run.outputs},
      {"details", run.extra},
      {"wall_time_seconds", wall}};
  write_json((run.dir / "manifest.json").string(), manifest);
  return manifest;
}

json replay_manifest(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::config, "cannot open manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, "manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("command") || !m.contains("config") || !m.at("command").is_string()) {
    throw Error(ErrorKind::config, "manifest '" + manifest_path + "' lacks command/config");
  }
  return run_command(m.at("command").get<std::string>(), load_config(m.at("config")), out_dir);
}

json diagnostic_json(const std::string& command, const std::exception& e) {
  json d = {{"command", command}, {"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    d["error_kind"] = to_string(err->kind());
    d["exit_code"] = exit_code(err->kind());
  } else {
    d["error_kind"] = "internal";
    d["exit_code"] = 1;
  }
  if (const auto* b = dynamic_cast<const InvariantBreach*>(&e)) {
    d["invariant"] = b->invariant();
    d["time"] = b->time();
    d["t_over_2pi"] = b->time() / kDrivePeriod;
    d["magnitude"] = b->magnitude();
  }
  if (const auto* l = dynamic_cast<const TruncationLeak*>(&e)) {
    d["suggested_fock_dim"] = l->suggested_dim();
  }
  return d;
}

}  // namespace qmeas
