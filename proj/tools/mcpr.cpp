// Command-line front end: solve a single instance, benchmark a directory of
// instances, or generate synthetic ones.
//
//   mcpr solve --method ncp --instance data/t1.mcpr
//   mcpr bench --dir data --method ncp,nbc,ils --out results
//   mcpr gen --m 10 --zones 50 --seed 7 --budgets 1,2,3
//
// Exit code is nonzero only for I/O, validation, or guard errors; a solver
// that stops on its time limit still exits 0 and reports status time_limit.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcpr/bench.hpp"
#include "mcpr/ils.hpp"
#include "mcpr/instance.hpp"
#include "mcpr/lp_io.hpp"
#include "mcpr/model.hpp"
#include "mcpr/oracle.hpp"
#include "mcpr/solver.hpp"

namespace {

mcpr::Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return mcpr::parse_instance(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << text;
}

mcpr::SecVariant sec_from_name(const std::string& name) {
  if (name == "sec1") return mcpr::SecVariant::Sec1;
  if (name == "sec2") return mcpr::SecVariant::Sec2;
  if (name == "both") return mcpr::SecVariant::Both;
  throw std::runtime_error("unknown --sec value '" + name + "' (expected sec1, sec2, or both)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

// Default export target: the instance path with its extension swapped for the
// model-specific suffix, so t1.mcpr becomes t1.li-milp.lp next to it.
std::string export_path(const std::string& instance_path, const std::string& suffix,
                        const std::string& override_path) {
  if (!override_path.empty()) return override_path;
  std::filesystem::path p(instance_path);
  std::filesystem::path target = p.parent_path() / (p.stem().string() + suffix);
  return target.string();
}

std::string join_tour(const std::vector<int>& tour) {
  std::string out;
  for (std::size_t i = 0; i < tour.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(tour[i]);
  }
  return out;
}

void print_report(const mcpr::Instance& inst, const std::string& method,
                  const mcpr::SolveReport& rep) {
  char time_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.3f", rep.wall_time_s);
  std::cout << "instance: " << inst.name << '\n'
            << "method: " << method << '\n'
            << "status: " << mcpr::to_string(rep.status) << '\n'
            << "objective: " << mcpr::detail::fmt17(rep.objective) << '\n'
            << "bound: " << mcpr::detail::fmt17(rep.bound) << '\n'
            << "tour: " << join_tour(rep.best_tour) << '\n'
            << "time_s: " << time_buf << '\n'
            << "outer_iters: " << rep.counters.outer_iters << '\n'
            << "sec_rounds: " << rep.counters.sec_rounds << '\n'
            << "cuts: " << rep.counters.total_cuts() << '\n';
}

struct SolveArgs {
  std::string method;
  std::string instance;
  double time_limit = 3600;
  double epsilon = 1e-6;
  int groups = 20;
  std::string sec = "both";
  std::uint64_t seed = 1;
  std::string trace;
  std::string out;
  bool relative_eps = false;
};

int run_solve(const SolveArgs& args) {
  mcpr::Instance inst = load_instance(args.instance);

  if (args.method == "milp-export" || args.method == "conic-export" ||
      args.method == "mtz-export") {
    std::string path, text;
    if (args.method == "milp-export") {
      path = export_path(args.instance, ".li-milp.lp", args.out);
      text = mcpr::write_lp(mcpr::build_linearized_milp(inst));
    } else if (args.method == "conic-export") {
      path = export_path(args.instance, ".conic.lp", args.out);
      text = mcpr::write_lp(mcpr::build_conic_model(inst));
    } else {
      path = export_path(args.instance, ".mtz.lp", args.out);
      text = mcpr::write_lp(mcpr::build_mtz_model(inst));
    }
    write_text_file(path, text);
    std::cout << "wrote " << path << '\n';
    return 0;
  }

  std::ofstream trace_stream;
  if (!args.trace.empty()) {
    trace_stream.open(args.trace);
    if (!trace_stream) throw std::runtime_error("cannot write trace file '" + args.trace + "'");
  }

  mcpr::SolveReport rep;
  if (args.method == "ils") {
    mcpr::IlsConfig cfg;
    cfg.time_limit = args.time_limit;
    cfg.seed = args.seed;
    if (trace_stream.is_open()) cfg.trace = &trace_stream;
    rep = mcpr::ils_run(inst, cfg, args.seed);
  } else if (args.method == "brute") {
    rep = mcpr::brute_force_optimum(inst);
  } else {
    mcpr::SolveConfig cfg;
    cfg.epsilon = args.epsilon;
    cfg.groups = args.groups;
    cfg.time_limit = args.time_limit;
    cfg.sec = sec_from_name(args.sec);
    cfg.relative_eps = args.relative_eps;
    if (trace_stream.is_open()) cfg.trace = &trace_stream;
    if (args.method == "ncp")
      rep = mcpr::nested_cutting_plane(inst, cfg);
    else if (args.method == "nbc")
      rep = mcpr::nested_branch_and_cut(inst, cfg);
    else if (args.method == "cp-mtz")
      rep = mcpr::cp_mtz(inst, cfg);
    else
      throw std::runtime_error("unknown method '" + args.method + "'");
  }
  print_report(inst, args.method, rep);
  return 0;
}

struct BenchArgs {
  std::string dir;
  std::string methods = "ncp";
  double time_limit = 3600;
  double epsilon = 1e-6;
  int groups = 20;
  std::string sec = "both";
  int runs = 20;
  std::string out = ".";
  bool relative_eps = false;
};

int run_bench_cmd(const BenchArgs& args) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(args.dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mcpr")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<mcpr::Instance> instances;
  for (const auto& f : files) instances.push_back(load_instance(f.string()));

  std::vector<std::string> methods = split_list(args.methods);
  if (methods.empty()) throw std::runtime_error("--method list is empty");

  mcpr::SolveConfig cfg;
  cfg.epsilon = args.epsilon;
  cfg.groups = args.groups;
  cfg.time_limit = args.time_limit;
  cfg.sec = sec_from_name(args.sec);
  cfg.relative_eps = args.relative_eps;
  mcpr::IlsConfig ils_cfg;
  ils_cfg.time_limit = args.time_limit;
  ils_cfg.runs = args.runs;

  mcpr::BenchResult result = mcpr::run_bench(instances, methods, cfg, ils_cfg);

  std::filesystem::create_directories(args.out);
  std::filesystem::path csv_path = std::filesystem::path(args.out) / "results.csv";
  std::filesystem::path md_path = std::filesystem::path(args.out) / "summary.md";
  write_text_file(csv_path.string(), result.csv);
  write_text_file(md_path.string(), result.summary);
  std::cout << result.summary;
  std::cout << "wrote " << csv_path.string() << '\n';
  std::cout << "wrote " << md_path.string() << '\n';
  return 0;
}

struct GenArgs {
  int m = 0;
  int zones = 20;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string budgets;
};

int run_gen(const GenArgs& args) {
  mcpr::Instance inst = mcpr::generate_synthetic(args.m, args.zones, args.seed);
  std::filesystem::create_directories(args.out);

  std::vector<mcpr::Instance> batch;
  if (args.budgets.empty()) {
    batch.push_back(inst);
  } else {
    std::vector<std::string> tokens = split_list(args.budgets);
    mcpr::Vec multipliers;
    for (const std::string& t : tokens) multipliers.push_back(std::stod(t));
    batch = mcpr::derive_budget_variants(inst, multipliers);
    for (std::size_t i = 0; i < batch.size(); ++i) batch[i].name += "-b" + tokens[i];
  }
  for (const mcpr::Instance& out_inst : batch) {
    std::filesystem::path path = std::filesystem::path(args.out) / (out_inst.name + ".mcpr");
    write_text_file(path.string(), mcpr::serialize_instance(out_inst));
    std::cout << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver suite for capture-maximizing facility placement with tour budgets"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "run one method on one instance");
  solve->add_option("--method", solve_args.method,
                    "ncp | nbc | cp-mtz | ils | brute | milp-export | conic-export | mtz-export")
      ->required();
  solve->add_option("--instance", solve_args.instance, "instance file")->required();
  solve->add_option("--time-limit", solve_args.time_limit, "seconds");
  solve->add_option("--epsilon", solve_args.epsilon, "optimality tolerance");
  solve->add_option("--groups", solve_args.groups, "zone group count");
  solve->add_option("--sec", solve_args.sec, "sec1 | sec2 | both");
  solve->add_option("--seed", solve_args.seed, "heuristic seed");
  solve->add_option("--trace", solve_args.trace, "per-iteration CSV trace file");
  solve->add_option("--out", solve_args.out, "export target path (export methods)");
  solve->add_flag("--relative-eps", solve_args.relative_eps, "scale group tolerance by value");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "run a method matrix over a directory");
  bench->add_option("--dir", bench_args.dir, "directory of .mcpr instances")->required();
  bench->add_option("--method", bench_args.methods, "comma-separated method list");
  bench->add_option("--time-limit", bench_args.time_limit, "seconds per run");
  bench->add_option("--epsilon", bench_args.epsilon, "optimality tolerance");
  bench->add_option("--groups", bench_args.groups, "zone group count");
  bench->add_option("--sec", bench_args.sec, "sec1 | sec2 | both");
  bench->add_option("--runs", bench_args.runs, "heuristic seeds per instance");
  bench->add_option("--out", bench_args.out, "output directory for results.csv and summary.md");
  bench->add_flag("--relative-eps", bench_args.relative_eps, "scale group tolerance by value");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate synthetic instances");
  gen->add_option("--m", gen_args.m, "candidate location count")->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--zones", gen_args.zones, "demand zone count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--out", gen_args.out, "output directory");
  gen->add_option("--budgets", gen_args.budgets, "comma-separated tour budget multipliers");

  try {
    app.parse(argc, argv);
    if (*solve) return run_solve(solve_args);
    if (*bench) return run_bench_cmd(bench_args);
    if (*gen) return run_gen(gen_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
