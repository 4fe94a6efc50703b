#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dispersar/cli.hpp"
#include "dispersar/errors.hpp"

namespace dispersar::cli {

namespace {

using Command = std::function<void(const CommandOptions&, std::ostream&)>;

struct Subcommand {
  const char* name;
  const char* help;
  Command run;
  bool uses_data;
};

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> list{
      {"synthesize", "Synthesize the data matrix (and noise) described by the config", cmd_synthesize,
       false},
      {"image", "Normalized KM image of the overview region and its peaks", cmd_image, true},
      {"zoom", "Tunable KM images of sub-regions around the peaks", cmd_zoom, true},
      {"rangeshift", "Range-shift sweep over sphere sizes: numeric argmax vs estimate",
       cmd_rangeshift, false},
      {"rcs", "Single-target RCS spectrum recovered at the imaged peak", cmd_rcs, true},
      {"multircs", "Multi-target location and RCS recovery", cmd_multircs, true},
  };
  return list;
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dispersive-target SAR simulation, imaging and RCS recovery", "dispersar"};
  app.require_subcommand(1);

  CommandOptions options;
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::map<CLI::App*, const Subcommand*> lookup;

  for (const auto& sc : subcommands()) {
    auto* sub = app.add_subcommand(sc.name, sc.help);
    sub->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    if (sc.uses_data) {
      sub->add_option("--data", data_path, "Data matrix CSV; synthesized from the config if omitted");
    }
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--threads", options.threads, "Worker threads for imaging (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Override noise.seed");
    lookup[sub] = &sc;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) {
    reversed.pop_back();  // program name
  }
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfigError;
  }

  const Subcommand* chosen = nullptr;
  for (const auto& [sub, sc] : lookup) {
    if (sub->parsed()) {
      chosen = sc;
      if (sub->count("--seed") > 0) {
        options.seed = seed;
      }
    }
  }
  options.config_path = config_path;
  if (!data_path.empty()) {
    options.data_path = data_path;
  }
  if (!out_dir.empty()) {
    options.out_dir = out_dir;
  }

  try {
    chosen->run(options, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const DomainError& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return kExitConfigError;
  } catch (const NumericalError& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumericalError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
  return kExitOk;
}

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_app(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace dispersar::cli
