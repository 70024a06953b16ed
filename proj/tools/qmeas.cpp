// qmeas: run the measurement-model experiments from the command line.
//
//   qmeas <command> [--profile desk|paper] [--config FILE] [--out-dir DIR]
//                   [--seed U64] [--workers K]
//   qmeas replay MANIFEST [--out-dir DIR]
//   qmeas show-config [--profile desk|paper] [--config FILE]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "qmeas/commands.hpp"
#include "qmeas/error.hpp"

namespace {

struct Options {
  std::string profile = "desk";
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string manifest;
};

void write_diagnostic(const std::string& out_dir, const std::string& command,
                      const std::exception& e) {
  try {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(std::filesystem::path(out_dir) / "diagnostic.json", std::ios::binary);
    out << qmeas::diagnostic_json(command, e).dump(2) << '\n';
  } catch (...) {
    // The stderr message below is still printed.
  }
}

int execute(const std::string& command, const Options& opt) {
  qmeas::ExperimentConfig cfg = opt.config.empty()
                                    ? qmeas::load_config(nlohmann::json::object(), opt.profile)
                                    : qmeas::load_config_file(opt.config, opt.profile);
  if (opt.seed) {
    cfg.trajectory.seed = *opt.seed;
    cfg.born.ensemble.master_seed = *opt.seed;
    cfg.born.ensemble.trajectory.seed = *opt.seed;
  }
  if (opt.workers) {
    if (*opt.workers < 1) throw qmeas::Error(qmeas::ErrorKind::config, "--workers must be >= 1");
    cfg.born.ensemble.workers = *opt.workers;
  }
  const auto manifest = qmeas::run_command(command, cfg, opt.out_dir);
  std::printf("%s: wrote %zu output(s) to %s\n", command.c_str(), manifest["outputs"].size(),
              opt.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit measured by a damped, driven nonlinear oscillator"};
  app.require_subcommand(1);
  Options opt;

  for (const auto& name : qmeas::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--profile", opt.profile, "Base profile")
        ->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--config", opt.config, "JSON config merged over the profile");
    sub->add_option("--out-dir", opt.out_dir, "Output directory");
    sub->add_option("--seed", opt.seed, "Trajectory seed and ensemble master seed");
    sub->add_option("--workers", opt.workers, "Ensemble worker threads");
  }
  auto* show = app.add_subcommand("show-config", "Print the resolved config as JSON");
  show->add_option("--profile", opt.profile, "Base profile")->check(CLI::IsMember({"desk", "paper"}));
  show->add_option("--config", opt.config, "JSON config merged over the profile");

  auto* replay = app.add_subcommand("replay", "Re-run a manifest.json");
  replay->add_option("manifest", opt.manifest, "Path to manifest.json")->required();
  replay->add_option("--out-dir", opt.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qmeas::exit_code(qmeas::ErrorKind::config);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "show-config") {
      const auto cfg = opt.config.empty()
                           ? qmeas::load_config(nlohmann::json::object(), opt.profile)
                           : qmeas::load_config_file(opt.config, opt.profile);
      std::printf("%s\n", qmeas::to_json(cfg).dump(2).c_str());
      return 0;
    }
    if (command == "replay") {
      qmeas::replay_manifest(opt.manifest, opt.out_dir);
      std::printf("replay: wrote outputs to %s\n", opt.out_dir.c_str());
      return 0;
    }
    return execute(command, opt);
  } catch (const qmeas::Error& e) {
    std::fprintf(stderr, "qmeas %s: %s: %s\n", command.c_str(), qmeas::to_string(e.kind()),
                 e.what());
    write_diagnostic(opt.out_dir, command, e);
    return qmeas::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qmeas %s: %s\n", command.c_str(), e.what());
    write_diagnostic(opt.out_dir, command, e);
    return 1;
  }
}
