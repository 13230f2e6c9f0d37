#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "popsim/errors.hpp"
#include "popsim/exact.hpp"

namespace popsim::cli {
namespace {

struct Options {
  ExperimentConfig config;
  std::string format = "csv";
  std::string out_path;
  // exact
  bool list = false;
  // export-graph / record
  std::string log_path;
  AgentId graph_agent = 0;
  std::size_t graph_step = 0;
  std::string graph_format = "edges";
  std::string series_path;
};

void add_sweep_flags(CLI::App& cmd, Options& o, bool with_protocol = true) {
  if (with_protocol) {
    auto* name = cmd.add_option("--protocol", o.config.protocol, "Catalog protocol name")
                     ->capture_default_str();
    cmd.add_option("--protocol-file", o.config.protocol_file, "JSON protocol definition")
        ->excludes(name);
  }
  cmd.add_option("--n", o.config.sizes, "Population size (repeatable)")->required();
  cmd.add_option("--trials", o.config.trials, "Trials per population size")->capture_default_str();
  cmd.add_option("--seed", o.config.seed, "Seed base")->capture_default_str();
  cmd.add_option("--max-steps", o.config.max_steps, "Step budget per trial");
  cmd.add_option("--threshold", o.config.threshold, "Threshold expression, e.g. n^2/3")
      ->capture_default_str();
  cmd.add_option("--jobs", o.config.jobs, "Concurrent trials")->capture_default_str();
  cmd.add_option("--out", o.out_path, "Output file (default stdout)");
  cmd.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "gnuplot"}))
      ->capture_default_str();
}

/// Writes through `out`, or into the --out file when one was given.
template <typename Fn>
void emit(const Options& o, std::ostream& out, Fn&& write) {
  if (o.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw UsageError(fmt::format("cannot open '{}' for writing", o.out_path));
  write(file);
  if (!file) throw ResourceError(fmt::format("write to '{}' failed", o.out_path));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Population protocol experiments: simulation, influencer sets, exact solves",
               "popsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_id());

  Options o;
  auto* run = app.add_subcommand("run", "Simulate trials and report steps and event times");
  add_sweep_flags(*run, o);
  auto* influencer = app.add_subcommand("influencer", "Measure t_min, the first step some influencer set exceeds the threshold");
  add_sweep_flags(*influencer, o);
  influencer->add_option("--agent", o.config.agent, "Track one agent instead of the maximum");
  auto* coupon = app.add_subcommand("coupon", "leave-init steps until fewer than f(n) agents are in the initial state");
  add_sweep_flags(*coupon, o, false);
  auto* exact = app.add_subcommand("exact", "Exact reachable-space analysis as JSON");
  {
    auto* name = exact->add_option("--protocol", o.config.protocol)->capture_default_str();
    exact->add_option("--protocol-file", o.config.protocol_file)->excludes(name);
    exact->add_option("--n", o.config.sizes, "Population size (repeatable)")->required();
    exact->add_option("--out", o.out_path);
    exact->add_flag("--list", o.list, "Include every configuration with its safety verdict");
  }
  auto* graph = app.add_subcommand("export-graph", "Graph H and backward influencer sets of a recorded log");
  graph->add_option("--log", o.log_path, "Interaction log file")->required();
  graph->add_option("--agent", o.graph_agent, "Query agent v")->required();
  graph->add_option("--step", o.graph_step, "Query step t")->required();
  graph->add_option("--graph-format", o.graph_format)
      ->check(CLI::IsMember({"edges", "dot"}))
      ->capture_default_str();
  graph->add_option("--out", o.out_path);
  auto* record = app.add_subcommand("record", "Run one trial and write its interaction log");
  add_sweep_flags(*record, o);
  record->add_option("--series", o.series_path, "Also write the influencer-size series as CSV");
  auto* list = app.add_subcommand("protocols", "List catalog protocols");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help and --version exit 0; every other parse failure is a usage error.
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    const auto format = parse_format(o.format);
    o.config.format = format;
    const auto write_table = [&](const Table& t) {
      emit(o, out, [&](std::ostream& s) { t.write(s, format); });
    };
    if (run->parsed()) {
      write_table(run_table(o.config));
    } else if (influencer->parsed()) {
      write_table(influencer_table(o.config));
    } else if (coupon->parsed()) {
      write_table(coupon_table(o.config));
    } else if (exact->parsed()) {
      const auto budget = exact::budget_from_environment();
      emit(o, out, [&](std::ostream& s) { exact_report(o.config, budget, o.list, s); });
    } else if (graph->parsed()) {
      std::ifstream in(o.log_path, std::ios::binary);
      if (!in) throw UsageError(fmt::format("cannot open log '{}'", o.log_path));
      const auto log = read_log(in);
      const auto gf = o.graph_format == "dot" ? GraphFormat::Dot : GraphFormat::EdgeList;
      emit(o, out, [&](std::ostream& s) { export_graph(log, o.graph_agent, o.graph_step, gf, s); });
    } else if (record->parsed()) {
      std::vector<InfluencerObserver::SeriesRow> series;
      const auto log = record_trial(o.config, o.series_path.empty() ? nullptr : &series);
      emit(o, out, [&](std::ostream& s) { write_log(s, log); });
      if (!o.series_path.empty()) {
        std::ofstream file(o.series_path, std::ios::binary);
        if (!file) throw UsageError(fmt::format("cannot open '{}' for writing", o.series_path));
        write_series_csv(file, series);
      }
    } else if (list->parsed()) {
      for (const auto& name : protocols::catalog_names()) out << name << '\n';
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "popsim: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError& e) {
    err << "popsim: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    err << "popsim: internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace popsim::cli
