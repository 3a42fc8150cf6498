// Command-line front end: single bound evaluations, parameter sweeps,
// degradability reports, and regeneration of the built-in figure data.
#include "capbound/bounds.hpp"
#include "capbound/io.hpp"
#include "capbound/zoo.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace capbound {
namespace {

struct CommonOpts {
  double rank_tol = kRankTol;
  double sdp_tol = 1e-8;
  double eta_threshold = 1e-6;
  int alpha_grid = 101;
  int alpha_refine = 30;
  int restarts = 20;
  std::uint64_t seed = 1;
  int jobs = 1;
};

void attach(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--rank-tol", o.rank_tol, "relative numerical-rank cutoff");
  cmd->add_option("--sdp-tol", o.sdp_tol, "interior-point target tolerance");
  cmd->add_option("--eta-threshold", o.eta_threshold, "eta level treated as degradable");
  cmd->add_option("--alpha-grid", o.alpha_grid, "coarse flag-parameter grid points");
  cmd->add_option("--alpha-refine", o.alpha_refine, "golden-section refinement iterations");
  cmd->add_option("--restarts", o.restarts,
                  "multi-start count for the coherent-information ascent");
  cmd->add_option("--seed", o.seed, "seed for the ascent restarts");
  cmd->add_option("--jobs", o.jobs, "worker threads (default from CAPBOUND_JOBS)");
}

BoundOptions to_bound_options(const CommonOpts& o) {
  BoundOptions b;
  b.rank_tol = o.rank_tol;
  b.sdp_tol = o.sdp_tol;
  b.eta_threshold = o.eta_threshold;
  b.alpha_grid = o.alpha_grid;
  b.alpha_refine = o.alpha_refine;
  b.q1.restarts = o.restarts;
  b.q1.seed = o.seed;
  b.jobs = o.jobs;
  return b;
}

int default_jobs() {
  if (const char* env = std::getenv("CAPBOUND_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

// Inputs are either a channel-spec string or a path to a JSON file holding a
// channel, a decomposition, a state, or a tau/omega substate split.
struct Input {
  std::optional<ZooEntry> zoo;
  std::optional<CPMap> channel;
  std::optional<CPDecomposition> decomposition;
  std::optional<DensityMatrix> state;
  std::optional<std::pair<DensityMatrix, DensityMatrix>> state_split;
  std::string label;
};

Input load_input(const std::string& arg) {
  Input in;
  in.label = arg;
  if (std::filesystem::exists(arg)) {
    std::ifstream f(arg);
    json j;
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw ParseError(std::string("input file: malformed JSON (") + e.what() + ")");
    }
    if (j.contains("tau") && j.contains("omega")) {
      in.state_split = {state_from_json(j.at("tau")), state_from_json(j.at("omega"))};
    } else if (j.contains("parts")) {
      in.decomposition = decomposition_from_json(j);
    } else if (j.contains("kraus")) {
      in.channel = channel_from_json(j);
    } else if (j.contains("dims")) {
      in.state = state_from_json(j);
    } else {
      throw ParseError("input file: expected a channel, decomposition, state, or tau/omega split");
    }
    return in;
  }
  in.zoo = build_channel(parse_channel_spec(arg));
  in.label = in.zoo->label;
  return in;
}

BoundReport evaluate_kind(const Input& in, const std::string& kind, const ChannelSpec* spec,
                          std::optional<double> alpha, const BoundOptions& opts) {
  auto channel = [&]() -> const CPMap& {
    if (in.zoo) return in.zoo->channel;
    if (in.channel) return *in.channel;
    throw ParseError("bound: this kind needs a channel input");
  };
  auto split = [&]() -> const CPDecomposition& {
    if (in.decomposition) return *in.decomposition;
    if (in.zoo && in.zoo->has_split) return in.zoo->split;
    throw ParseError("bound: this kind needs a decomposition");
  };

  if (kind == "approx-degradable") return approx_degradable_bound(channel(), opts);
  if (kind == "choi-flag") {
    if (in.state_split)
      return choi_channel_bound(in.state_split->first, in.state_split->second, opts);
    if (in.zoo && in.zoo->tau) return choi_channel_bound(*in.zoo->tau, *in.zoo->omega, opts);
    throw ParseError("bound: choi-flag needs a tau/omega substate split");
  }
  if (kind == "pure-flag" || kind == "private-pf") {
    Flavor flavor = kind == "pure-flag" ? Flavor::quantum : Flavor::priv;
    if (alpha) return channel_flag_bound(split(), *alpha, flavor, opts);
    AlphaScanResult scan =
        alpha_scan([&](double a) { return channel_flag_bound(split(), a, flavor, opts); },
                   opts.alpha_grid, opts.alpha_refine, opts.jobs);
    BoundReport r = scan.best;
    r.alpha = scan.alpha_star;
    return r;
  }
  if (kind == "degradable-flag") return degradable_flag_bound(split(), Flavor::quantum, opts);
  if (kind == "private-degradable") return degradable_flag_bound(split(), Flavor::priv, opts);
  if (kind == "general-flag") return general_flag_bound(split(), opts);
  if (kind == "dp-gad") {
    if (!spec || spec->family != "gad")
      throw ParseError("bound: dp-gad applies to the gad family only");
    BoundReport r;
    r.kind = BoundKind::dp_gad;
    r.value = dp_gad_bound(spec->params.at("y"), spec->params.at("N"));
    r.value_upper = r.value;
    r.info_term = r.value;
    r.terms.push_back({"mapped_damping_capacity", r.value});
    return r;
  }
  throw ParseError("bound: unknown kind '" + kind + "'");
}

int cmd_bound(const std::string& input, const std::string& kind, std::optional<double> alpha,
              const CommonOpts& common, const std::string& format) {
  Input in = load_input(input);
  ChannelSpec spec;
  const ChannelSpec* spec_ptr = nullptr;
  if (!std::filesystem::exists(input)) {
    spec = parse_channel_spec(input);
    spec_ptr = &spec;
  }
  BoundReport r = evaluate_kind(in, kind, spec_ptr, alpha, to_bound_options(common));
  if (format == "text") {
    std::cout << in.label << "  kind=" << to_string(r.kind)
              << "  value=" << (r.finite() ? format_sig9(r.value) : "inf");
    if (r.alpha) std::cout << "  alpha=" << format_sig9(*r.alpha);
    std::cout << "  eta=" << format_sig9(r.eta) << "\n";
  } else {
    json j = report_to_json(r);
    j["input"] = in.label;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_eta(const std::string& input, const CommonOpts& common, const std::string& dump_path) {
  Input in = load_input(input);
  json out;
  auto fill = [&out](const SolveInfo& info, double eta, int env, const CPMap& degrading) {
    out["eta"] = eta;
    out["env_dim"] = env;
    out["gap"] = info.gap;
    out["primal_residual"] = info.primal_residual;
    out["dual_residual"] = info.dual_residual;
    out["status"] = to_string(info.status);
    out["degrading"] = channel_to_json(degrading);
  };
  if (in.state || in.state_split) {
    DensityMatrix rho =
        in.state ? *in.state
                 : DensityMatrix(Mat(in.state_split->first.matrix() +
                                     in.state_split->second.matrix()),
                                 in.state_split->first.dims());
    int env = numerical_rank(rho.matrix(), common.rank_tol);
    if (!dump_path.empty() && env > 1) {
      std::ofstream f(dump_path);
      f << problem_to_json(eta_state_problem(rho, env, common.rank_tol)).dump(2) << "\n";
    }
    EtaStateResult r = eta_state(rho, env, common.sdp_tol, common.rank_tol);
    out["kind"] = "state";
    fill(r.info, r.eta, r.env_dim, r.degrading);
  } else {
    const CPMap& n =
        in.zoo ? in.zoo->channel : (in.channel ? *in.channel : in.decomposition->total());
    if (!dump_path.empty()) {
      CPMap nc = complementary(n, common.rank_tol);
      if (nc.dim_out() > 1) {
        std::ofstream f(dump_path);
        f << problem_to_json(eta_channel_problem(n, nc)).dump(2) << "\n";
      }
    }
    EtaChannelResult r = eta_channel(n, common.sdp_tol, common.rank_tol);
    out["kind"] = "channel";
    fill(r.info, r.eta, r.env_dim, r.degrading);
  }
  out["input"] = in.label;
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct SweepRow {
  double param = 0.0;
  std::string kind;
  BoundReport report;
  double q1_lower = 0.0;
  std::string error;
};

std::string csv_escape(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

void write_rows(std::ostream& os, const std::string& param_name, const std::vector<SweepRow>& rows,
                const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const SweepRow& r : rows) {
      json j;
      j["param"] = r.param;
      j["param_name"] = param_name;
      j["kind"] = r.kind;
      if (r.error.empty()) {
        j["report"] = report_to_json(r.report);
        j["q1_lower_bits"] = r.q1_lower;
      } else {
        j["error"] = r.error;
      }
      arr.push_back(std::move(j));
    }
    os << arr.dump(2) << "\n";
    return;
  }
  os << "param:" << param_name
     << ",kind,value_bits_log2,value_upper_bits_log2,q1_lower_bits_log2,"
        "eta_half_diamond,env_dim,alpha_star,max_sdp_gap,status\n";
  for (const SweepRow& r : rows) {
    os << format_sig9(r.param) << "," << r.kind << ",";
    if (!r.error.empty()) {
      os << ",,,,,,error:" << csv_escape(r.error) << "\n";
      continue;
    }
    const BoundReport& b = r.report;
    os << (b.finite() ? format_sig9(b.value) : "inf") << ","
       << (std::isfinite(b.value_upper) ? format_sig9(b.value_upper) : "inf") << ","
       << format_sig9(r.q1_lower) << "," << format_sig9(b.eta) << "," << b.env_dim << ","
       << (b.alpha ? format_sig9(*b.alpha) : "") << "," << format_sig9(b.solver.max_gap)
       << ",ok\n";
  }
}

int cmd_sweep(const std::string& family, const std::string& param, double start, double stop,
              int steps, const std::vector<std::string>& kinds,
              const std::vector<std::string>& fixed, const CommonOpts& common,
              const std::string& out_path, const std::string& format) {
  if (steps < 1) throw ParseError("sweep: steps must be at least 1");
  std::string fixed_suffix;
  for (const std::string& f : fixed) fixed_suffix += "," + f;

  std::vector<double> points(steps);
  for (int i = 0; i < steps; ++i)
    points[i] = steps == 1 ? start : start + (stop - start) * i / (steps - 1);

  std::vector<std::vector<SweepRow>> results(steps);
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex errmtx;

  auto worker = [&] {
    for (int i = next++; i < steps; i = next++) {
      try {
        std::ostringstream spec_text;
        spec_text << family << ":" << param << "=" << std::setprecision(17) << points[i]
                  << fixed_suffix;
        ChannelSpec spec = parse_channel_spec(spec_text.str());
        ZooEntry entry = build_channel(spec);
        CommonOpts point_opts = common;
        point_opts.seed = common.seed + 1000003ULL * static_cast<std::uint64_t>(i);
        point_opts.jobs = 1;
        BoundOptions bopts = to_bound_options(point_opts);

        double q1_lower = q1_maximize(entry.channel, bopts.q1).value;

        Input in;
        in.zoo = entry;
        in.label = entry.label;
        for (const std::string& kind : kinds) {
          SweepRow row;
          row.param = points[i];
          row.kind = kind;
          row.q1_lower = q1_lower;
          try {
            row.report = evaluate_kind(in, kind, &spec, std::nullopt, bopts);
          } catch (const SolverError& e) {
            row.error = e.what();
          }
          results[i].push_back(std::move(row));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(errmtx);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(common.jobs, steps) - 1; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);

  std::vector<SweepRow> rows;
  for (auto& point_rows : results)
    for (SweepRow& r : point_rows) rows.push_back(std::move(r));

  if (out_path.empty()) {
    write_rows(std::cout, param, rows, format);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ParseError("sweep: cannot open output file " + out_path);
    write_rows(f, param, rows, format);
  }
  return 0;
}

int cmd_figures(const std::string& outdir, const CommonOpts& common) {
  std::filesystem::create_directories(outdir);
  auto path = [&](const char* name) { return (std::filesystem::path(outdir) / name).string(); };
  cmd_sweep("depolarizing", "w", 0.0, 0.02, 21, {"choi-flag", "approx-degradable"}, {}, common,
            path("depolarizing_low.csv"), "csv");
  std::cerr << "wrote " << path("depolarizing_low.csv") << "\n";
  cmd_sweep("depolarizing", "w", 0.0, 0.15, 31, {"choi-flag"}, {}, common,
            path("depolarizing_mid.csv"), "csv");
  std::cerr << "wrote " << path("depolarizing_mid.csv") << "\n";
  cmd_sweep("bb84", "p", 0.0, 0.04, 21, {"private-degradable"}, {}, common,
            path("bb84_private.csv"), "csv");
  std::cerr << "wrote " << path("bb84_private.csv") << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"upper bounds on quantum and private channel capacities via flagged extensions "
               "and approximate degradability"};
  app.require_subcommand(1);

  CommonOpts common;
  common.jobs = default_jobs();

  std::string input, kind = "approx-degradable", format = "json", out_path, dump_path,
                     outdir = ".";
  double alpha_value = -1.0;

  CLI::App* bound = app.add_subcommand("bound", "evaluate one bound with full itemization");
  bound->add_option("input", input, "channel spec (family:k=v,...) or JSON file")->required();
  bound->add_option("--kind", kind,
                    "approx-degradable | choi-flag | pure-flag | degradable-flag | private-pf | "
                    "private-degradable | general-flag | dp-gad");
  bound->add_option("--alpha", alpha_value, "fixed flag parameter (skips the scan)");
  bound->add_option("--format", format, "json | text");
  attach(bound, common);

  CLI::App* eta = app.add_subcommand("eta", "degradability parameter of a channel or state");
  eta->add_option("input", input, "channel spec or channel/decomposition/state JSON file")
      ->required();
  eta->add_option("--dump-sdp", dump_path, "write the conic problem as JSON");
  attach(eta, common);

  std::string family, param;
  double start = 0.0, stop = 0.0;
  int steps = 1;
  std::vector<std::string> kinds{"approx-degradable"};
  std::vector<std::string> fixed;
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate bounds over a parameter range");
  sweep->add_option("family", family, "channel family")->required();
  sweep->add_option("--param", param, "swept parameter name")->required();
  sweep->add_option("--start", start)->required();
  sweep->add_option("--stop", stop)->required();
  sweep->add_option("--steps", steps)->required();
  sweep->add_option("--kind", kinds, "bound kinds (comma separated)")->delimiter(',');
  sweep->add_option("--fix", fixed, "additional fixed parameters, e.g. N=0.3");
  sweep->add_option("--out", out_path, "output file (stdout when omitted)");
  sweep->add_option("--format", format, "csv | json");
  attach(sweep, common);

  CLI::App* figures = app.add_subcommand("figures", "regenerate the built-in sweep data files");
  figures->add_option("--outdir", outdir, "output directory");
  attach(figures, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bound->parsed()) {
      std::optional<double> alpha;
      if (bound->count("--alpha")) alpha = alpha_value;
      return cmd_bound(input, kind, alpha, common, format);
    }
    if (eta->parsed()) return cmd_eta(input, common, dump_path);
    if (sweep->parsed()) {
      if (!sweep->count("--format")) format = "csv";
      return cmd_sweep(family, param, start, stop, steps, kinds, fixed, common, out_path, format);
    }
    if (figures->parsed()) return cmd_figures(outdir, common);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace capbound

int main(int argc, char** argv) { return capbound::run(argc, argv); }
