#include "qmeas/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "qmeas/error.hpp"

namespace qmeas {

void EnsembleConfig::validate() const {
  if (n_traj < 1) throw Error(ErrorKind::config, "ensemble needs n_traj >= 1");
  if (workers < 1) throw Error(ErrorKind::config, "ensemble needs workers >= 1");
  trajectory.validate();
}

namespace {

struct Slot {
  std::optional<TrajectoryRecord> record;
  std::optional<TrajectoryFailure> failure;
};

void mean_and_se(const std::vector<double>& xs, double& mean, double& se) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / n;
  if (xs.size() < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

MeanSeries aggregate(const std::vector<TrajectoryRecord>& records) {
  MeanSeries out;
  if (records.empty()) return out;
  const std::size_t n_samples = records.front().samples.size();
  for (const auto& r : records) {
    if (r.samples.size() != n_samples) {
      throw Error(ErrorKind::contract_violation, "aggregate: records have different lengths");
    }
  }
  std::vector<double> col(records.size());
  auto column = [&](std::size_t k, double TrajectorySample::*field, std::vector<double>& mean,
                    std::vector<double>& se) {
    for (std::size_t r = 0; r < records.size(); ++r) col[r] = records[r].samples[k].*field;
    double m, s;
    mean_and_se(col, m, s);
    mean.push_back(m);
    se.push_back(s);
  };
  for (std::size_t k = 0; k < n_samples; ++k) {
    out.steps.push_back(records.front().samples[k].step);
    out.t.push_back(records.front().samples[k].t);
    column(k, &TrajectorySample::q, out.q, out.q_se);
    column(k, &TrajectorySample::p, out.p, out.p_se);
    column(k, &TrajectorySample::sigma_z, out.sigma_z, out.sigma_z_se);
    column(k, &TrajectorySample::p_g, out.p_g, out.p_g_se);
  }
  return out;
}

EnsembleResult run_ensemble(const StateVector& psi0, const ModelParams& params,
                            const EnsembleConfig& cfg) {
  params.validate();
  cfg.validate();

  std::vector<Slot> slots(cfg.n_traj);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < cfg.n_traj; k = next++) {
      TrajectoryConfig tc = cfg.trajectory;
      tc.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(k));
      tc.keep_final_state = cfg.keep_final_states;
      try {
        slots[k].record = run_trajectory(psi0, params, tc);
      } catch (const Error& e) {
        slots[k].failure = TrajectoryFailure{k, tc.seed, to_string(e.kind()), e.what()};
      }
    }
  };

  const int n_threads = std::min(cfg.workers, cfg.n_traj);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  }

  EnsembleResult out;
  for (int k = 0; k < cfg.n_traj; ++k) {
    if (slots[k].record) {
      out.indices.push_back(k);
      out.records.push_back(std::move(*slots[k].record));
    } else {
      out.failures.push_back(*slots[k].failure);
    }
  }
  if (!out.failures.empty() && 100 * out.failures.size() >= static_cast<std::size_t>(cfg.n_traj)) {
    const auto& f = out.failures.front();
    throw Error(ErrorKind::invariant_breach,
                std::to_string(out.failures.size()) + " of " + std::to_string(cfg.n_traj) +
                    " trajectories failed (>= 1%); first: index " + std::to_string(f.index) +
                    ": " + f.message);
  }
  out.mean = aggregate(out.records);
  return out;
}

BornReport born_experiment(Complex c_g, Complex c_e, Complex alpha, const ModelParams& params,
                           const BornConfig& cfg) {
  const StateVector psi0 = initial_state(c_g, c_e, alpha, params);
  return born_report(run_ensemble(psi0, params, cfg.ensemble), c_g, c_e, params, cfg);
}

BornReport born_report(const EnsembleResult& ens, Complex c_g, Complex c_e,
                       const ModelParams& params, const BornConfig& cfg) {
  BornReport rep;
  rep.expected_g = std::norm(c_g);
  rep.expected_e = std::norm(c_e);
  rep.z_threshold = cfg.z_threshold;
  rep.n_failed = static_cast<int>(ens.failures.size());
  for (const auto& r : ens.records) {
    switch (classify_outcome(r, cfg.window_periods, cfg.thresholds)) {
      case Outcome::ground: ++rep.n_ground; break;
      case Outcome::excited: ++rep.n_excited; break;
      case Outcome::undecided: ++rep.n_undecided; break;
    }
  }
  const int decided = rep.n_ground + rep.n_excited;
  rep.valid = !(params.epsilon == 0.0 && 10 * rep.n_undecided > cfg.ensemble.n_traj);
  if (decided > 0) {
    rep.fraction_g = static_cast<double>(rep.n_ground) / decided;
    rep.standard_error = std::sqrt(rep.expected_g * (1.0 - rep.expected_g) / decided);
  }
  const double diff = rep.fraction_g - rep.expected_g;
  if (rep.standard_error > 0.0) {
    rep.z_score = diff / rep.standard_error;
  } else {
    rep.z_score = std::abs(diff) < 1e-12 ? 0.0 : std::copysign(INFINITY, diff);
  }
  rep.pass = rep.valid && decided > 0 && std::abs(rep.z_score) <= rep.z_threshold;
  return rep;
}

double free_qubit_sigma_z(double t, double epsilon) { return -std::cos(2.0 * epsilon * t); }

ZenoSeries zeno_experiment(const ModelParams& params, Complex alpha, const MasterRunConfig& cfg) {
  const StateVector psi0 = initial_state(1.0, 0.0, alpha, params);
  const MasterRunOutput run = integrate_master(DensityMatrix::from_pure(psi0), params, cfg);
  ZenoSeries z;
  z.summary = run.summary;
  for (const auto& s : run.samples) {
    z.t.push_back(s.t);
    z.coupled_sigma_z.push_back(s.sigma_z);
    z.free_sigma_z.push_back(free_qubit_sigma_z(s.t, params.epsilon));
  }
  return z;
}

}  // namespace qmeas
