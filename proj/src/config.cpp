#include "qmeas/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "qmeas/error.hpp"

namespace qmeas {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::config, "config key '" + path + "': " + what);
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

// Typed access with the dotted key path in every error message.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  Reader at(const char* key) const {
    const std::string p = path_.empty() ? key : path_ + "." + key;
    if (!j_.contains(key)) fail(p, "missing");
    return Reader(j_.at(key), p);
  }

  double num() const {
    if (!j_.is_number()) fail(path_, "expected a number");
    return j_.get<double>();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail(path_, "expected an integer");
    return j_.get<int>();
  }
  long long_int() const {
    if (!j_.is_number_integer()) fail(path_, "expected an integer");
    return j_.get<long>();
  }
  std::uint64_t u64() const {
    if (!j_.is_number_unsigned()) fail(path_, "expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail(path_, "expected true or false");
    return j_.get<bool>();
  }
  std::string str() const {
    if (!j_.is_string()) fail(path_, "expected a string");
    return j_.get<std::string>();
  }
  Complex complex() const {
    if (j_.is_number()) return {j_.get<double>(), 0.0};
    if (!j_.is_array() || j_.size() != 2 || !j_[0].is_number() || !j_[1].is_number())
      fail(path_, "expected a number or [re, im]");
    return {j_[0].get<double>(), j_[1].get<double>()};
  }
  std::vector<double> numbers() const {
    if (!j_.is_array()) fail(path_, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j_) {
      if (!x.is_number()) fail(path_, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

void reject_unknown(const json& got, const json& schema, const std::string& path) {
  for (const auto& [key, value] : got.items()) {
    const std::string p = path.empty() ? key : path + "." + key;
    if (!schema.contains(key)) fail(p, "unknown key");
    if (value.is_object() && schema.at(key).is_object()) reject_unknown(value, schema.at(key), p);
  }
}

ExperimentConfig from_json(const json& j) {
  const Reader r(j, "");
  ExperimentConfig c;
  c.profile = r.at("profile").str();

  const Reader m = r.at("model");
  c.model.beta = m.at("beta").num();
  c.model.g = m.at("g").num();
  c.model.gamma = m.at("gamma").num();
  c.model.epsilon = m.at("epsilon").num();
  c.model.fock_dim = m.at("fock_dim").integer();

  const Reader init = r.at("initial");
  c.c_g = init.at("c_g").complex();
  c.c_e = init.at("c_e").complex();
  c.alpha = init.at("alpha").complex();

  const Reader ms = r.at("master");
  c.master.steps_per_period = ms.at("steps_per_period").integer();
  c.master.t_end_periods = ms.at("t_end_periods").num();
  c.master.record_stride = ms.at("record_stride").integer();
  c.master.trace_tol = ms.at("trace_tol").num();
  c.master.herm_tol = ms.at("herm_tol").num();
  c.master.psd_tol = ms.at("psd_tol").num();
  c.master.leak_tol = ms.at("leak_tol").num();
  c.master.snapshot_periods = ms.at("snapshot_periods").numbers();

  const Reader w = r.at("wigner");
  c.wigner.q_min = w.at("q_min").num();
  c.wigner.q_max = w.at("q_max").num();
  c.wigner.p_min = w.at("p_min").num();
  c.wigner.p_max = w.at("p_max").num();
  c.wigner.n_q = w.at("n_q").integer();
  c.wigner.n_p = w.at("n_p").integer();

  const Reader t = r.at("trajectory");
  c.trajectory.steps_per_period = t.at("steps_per_period").integer();
  c.trajectory.t_end_periods = t.at("t_end_periods").num();
  c.trajectory.record_stride = t.at("record_stride").integer();
  c.trajectory.seed = t.at("seed").u64();
  c.trajectory.scheme = qsd_scheme_from_string(t.at("scheme").str());
  c.trajectory.leak_tol = t.at("leak_tol").num();

  const Reader e = r.at("ensemble");
  c.born.ensemble.n_traj = e.at("n_traj").integer();
  c.born.ensemble.master_seed = e.at("master_seed").u64();
  c.born.ensemble.workers = e.at("workers").integer();
  c.born.window_periods = e.at("window_periods").num();
  c.born.z_threshold = e.at("z_threshold").num();
  c.born.thresholds.ground = e.at("ground_threshold").num();
  c.born.thresholds.excited = e.at("excited_threshold").num();
  c.born.ensemble.trajectory = c.trajectory;

  const Reader pot = r.at("potential");
  c.potential.q_min = pot.at("q_min").num();
  c.potential.q_max = pot.at("q_max").num();
  c.potential.n_q = pot.at("n_q").integer();

  const Reader pc = r.at("poincare");
  c.poincare.n_traj = pc.at("n_traj").integer();
  c.poincare.classical_start.q = pc.at("q0").num();
  c.poincare.classical_start.p = pc.at("p0").num();
  c.poincare.classical.steps_per_period = pc.at("classical_steps_per_period").integer();
  c.poincare.classical.t_end_periods = pc.at("classical_t_end_periods").num();
  c.poincare.classical.record_stride = c.poincare.classical.steps_per_period;
  c.poincare.transient_periods = pc.at("transient_periods").long_int();
  c.poincare.pad_fraction = pc.at("pad_fraction").num();
  c.poincare.ehrenfest_alpha = pc.at("ehrenfest_alpha").complex();
  c.poincare.ehrenfest_horizon = pc.at("ehrenfest_horizon_periods").num();
  c.poincare.ehrenfest_tolerance = pc.at("ehrenfest_tolerance").num();

  const Reader z = r.at("zeno");
  c.zeno.epsilon = z.at("epsilon").num();
  c.zeno.t_end_periods = z.at("t_end_periods").num();

  // Range checks live with the structs they belong to.
  c.model.validate();
  c.master.validate();
  c.wigner.validate();
  c.trajectory.validate();
  c.born.ensemble.validate();
  c.poincare.classical.validate();
  if (c.potential.n_q < 2 || !(c.potential.q_min < c.potential.q_max))
    fail("potential", "need n_q >= 2 and q_min < q_max");
  if (c.poincare.n_traj < 0) fail("poincare.n_traj", "must be >= 0");
  if (!(c.born.window_periods > 0.0)) fail("ensemble.window_periods", "must be > 0");
  return c;
}

}  // namespace

ExperimentConfig profile_config(const std::string& name) {
  ExperimentConfig c;
  c.profile = name;
  c.born.ensemble.n_traj = 500;
  c.born.ensemble.master_seed = 1;
  c.trajectory.t_end_periods = 3.0;
  if (name == "desk") {
    c.model = desk_params();
    c.alpha = {3.0, 0.0};
    c.master.t_end_periods = 2.0;
    c.master.snapshot_periods = {0.0, 0.2, 0.7, 1.0};
    c.wigner = {-8.0, 8.0, -8.0, 8.0, 81, 81};
    c.potential = {-6.0, 6.0, 601};
    c.poincare.classical.t_end_periods = 200.0;
  } else if (name == "paper") {
    c.model = paper_params();
    c.alpha = {11.0 / 1.4142135623730951, 0.0};
    c.master.t_end_periods = 3.0;
    c.master.snapshot_periods = {0.0, 0.2, 0.7, 0.9};
    c.wigner = {-20.0, 20.0, -20.0, 20.0, 161, 161};
    c.potential = {-15.0, 15.0, 601};
    c.poincare.classical.t_end_periods = 300.0;
  } else {
    throw Error(ErrorKind::config, "unknown profile '" + name + "' (expected desk or paper)");
  }
  c.poincare.classical.record_stride = c.poincare.classical.steps_per_period;
  c.born.ensemble.trajectory = c.trajectory;
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["model"] = {{"beta", c.model.beta},
                {"g", c.model.g},
                {"gamma", c.model.gamma},
                {"epsilon", c.model.epsilon},
                {"fock_dim", c.model.fock_dim}};
  j["initial"] = {{"c_g", complex_json(c.c_g)},
                  {"c_e", complex_json(c.c_e)},
                  {"alpha", complex_json(c.alpha)}};
  j["master"] = {{"steps_per_period", c.master.steps_per_period},
                 {"t_end_periods", c.master.t_end_periods},
                 {"record_stride", c.master.record_stride},
                 {"trace_tol", c.master.trace_tol},
                 {"herm_tol", c.master.herm_tol},
                 {"psd_tol", c.master.psd_tol},
                 {"leak_tol", c.master.leak_tol},
                 {"snapshot_periods", c.master.snapshot_periods}};
  j["wigner"] = {{"q_min", c.wigner.q_min}, {"q_max", c.wigner.q_max},
                 {"p_min", c.wigner.p_min}, {"p_max", c.wigner.p_max},
                 {"n_q", c.wigner.n_q},     {"n_p", c.wigner.n_p}};
  j["trajectory"] = {{"steps_per_period", c.trajectory.steps_per_period},
                     {"t_end_periods", c.trajectory.t_end_periods},
                     {"record_stride", c.trajectory.record_stride},
                     {"seed", c.trajectory.seed},
                     {"scheme", to_string(c.trajectory.scheme)},
                     {"leak_tol", c.trajectory.leak_tol}};
  j["ensemble"] = {{"n_traj", c.born.ensemble.n_traj},
                   {"master_seed", c.born.ensemble.master_seed},
                   {"workers", c.born.ensemble.workers},
                   {"window_periods", c.born.window_periods},
                   {"z_threshold", c.born.z_threshold},
                   {"ground_threshold", c.born.thresholds.ground},
                   {"excited_threshold", c.born.thresholds.excited}};
  j["potential"] = {
      {"q_min", c.potential.q_min}, {"q_max", c.potential.q_max}, {"n_q", c.potential.n_q}};
  j["poincare"] = {{"n_traj", c.poincare.n_traj},
                   {"q0", c.poincare.classical_start.q},
                   {"p0", c.poincare.classical_start.p},
                   {"classical_steps_per_period", c.poincare.classical.steps_per_period},
                   {"classical_t_end_periods", c.poincare.classical.t_end_periods},
                   {"transient_periods", c.poincare.transient_periods},
                   {"pad_fraction", c.poincare.pad_fraction},
                   {"ehrenfest_alpha", complex_json(c.poincare.ehrenfest_alpha)},
                   {"ehrenfest_horizon_periods", c.poincare.ehrenfest_horizon},
                   {"ehrenfest_tolerance", c.poincare.ehrenfest_tolerance}};
  j["zeno"] = {{"epsilon", c.zeno.epsilon}, {"t_end_periods", c.zeno.t_end_periods}};
  return j;
}

ExperimentConfig load_config(const json& overlay, const std::string& default_profile) {
  if (!overlay.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  std::string profile = default_profile;
  if (overlay.contains("profile")) profile = Reader(overlay.at("profile"), "profile").str();
  const json base = to_json(profile_config(profile));
  reject_unknown(overlay, base, "");
  json merged = base;
  merged.merge_patch(overlay);
  return from_json(merged);
}

ExperimentConfig load_config_file(const std::string& path, const std::string& default_profile) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, "config file '" + path + "' is not valid JSON: " + e.what());
  }
  return load_config(j, default_profile);
}

std::string config_digest(const json& resolved) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : resolved.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qmeas
