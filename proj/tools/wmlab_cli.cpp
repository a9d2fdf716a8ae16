// wmlab command-line experiment runner.
//
//   wmlab <experiment> [--config file]... [--out path] [--format json|csv]
//         [--seed u64] [--parallel k]
//   wmlab schema
//   wmlab list
//
// Exit codes: 0 all criteria pass, 1 some criterion fails, 2 config or I/O
// error.
#include <future>
#include <iostream>

#include "CLI11.hpp"
#include "wmlab/experiments.hpp"

using namespace wmlab;

int main(int argc, char** argv) {
  CLI::App app{"wmlab: weighted Fourier multiplier laboratory"};
  app.require_subcommand(1);

  auto* schema_cmd = app.add_subcommand("schema", "print the config schema");
  auto* list_cmd = app.add_subcommand("list", "list experiment names");

  struct Options {
    std::vector<std::string> configs;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int parallel = 1;
  };
  std::map<std::string, std::shared_ptr<Options>> opts;
  for (const auto& name : experiment_names()) {
    auto o = std::make_shared<Options>();
    auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    cmd->add_option("--config", o->configs, "JSON config file(s)");
    cmd->add_option("--out", o->out, "report output path");
    cmd->add_option("--format", o->format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", o->seed, "seed override")
        ->each([o](const std::string&) { o->seed_set = true; });
    cmd->add_option("--parallel", o->parallel, "fan out configs over k threads")
        ->check(CLI::PositiveNumber);
    opts[name] = o;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (schema_cmd->parsed()) {
    std::cout << config_schema().dump(2) << "\n";
    return 0;
  }
  if (list_cmd->parsed()) {
    for (const auto& name : experiment_names()) std::cout << name << "\n";
    return 0;
  }

  std::string name;
  std::shared_ptr<Options> o;
  for (auto* sub : app.get_subcommands()) {
    if (opts.count(sub->get_name())) {
      name = sub->get_name();
      o = opts[name];
    }
  }

  try {
    std::vector<ExperimentConfig> cfgs;
    if (o->configs.empty()) {
      cfgs.push_back(validate_config(name, nlohmann::json::object()));
    } else {
      for (const auto& path : o->configs) {
        auto cfg = parse_config(path);
        if (cfg.name != name)
          throw std::invalid_argument("config file names experiment \"" +
                                      cfg.name + "\" but subcommand is \"" +
                                      name + "\"");
        cfgs.push_back(std::move(cfg));
      }
    }
    if (o->seed_set)
      for (auto& cfg : cfgs) cfg.seed = o->seed;

    std::vector<Report> reports(cfgs.size());
    if (o->parallel > 1 && cfgs.size() > 1) {
      std::vector<std::future<Report>> futs;
      for (const auto& cfg : cfgs)
        futs.push_back(std::async(std::launch::async,
                                  [&cfg] { return run(cfg); }));
      for (std::size_t i = 0; i < futs.size(); ++i) reports[i] = futs[i].get();
    } else {
      for (std::size_t i = 0; i < cfgs.size(); ++i) reports[i] = run(cfgs[i]);
    }

    bool all = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& rep = reports[i];
      all = all && rep.all_pass();
      ReportFormat fmt =
          o->format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
      if (!o->out.empty()) {
        std::string path = o->out;
        if (reports.size() > 1)
          path += "." + std::to_string(i);
        emit_report(rep, fmt, path);
      } else {
        std::cout << (fmt == ReportFormat::Csv ? rep.to_csv()
                                               : rep.to_json().dump(2))
                  << "\n";
      }
      for (const auto& c : rep.criteria)
        std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << rep.experiment << "/"
                  << c.id << " measured=" << c.measured
                  << " threshold=" << c.threshold << "\n";
    }
    return all ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
