#include "hyperball/cli/app.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperball/cli/io.hpp"

namespace hyperball::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  bool timing = false;
};

struct SampleArgs {
  int dim = 2;
  std::vector<double> location;
  double concentration = 0.0;
  std::size_t count = 0;
};

struct BarycenterArgs {
  std::string input;
  std::string weights;
  double tolerance = 1e-10;
  int max_iterations = 10'000;
};

struct KMeansArgs {
  std::string input;
  int k = 0;
  int restarts = 5;
  int max_iterations = 100;
};

struct EmArgs {
  std::string input;
  int k = 0;
  int restarts = 5;
  int max_iterations = 500;
  double tolerance = 1e-8;
  double s_max = 1e4;
  double undecided_threshold = 0.5;
  std::string loglik_csv;
};

struct DensityArgs {
  std::string input;
  std::string model;
  std::vector<double> location;
  double concentration = 0.0;
};

struct ExperimentArgs {
  std::string name;
  std::string spec;
  std::string dump_spec;
  std::size_t sample_count = 0;
  int restarts = 5;
};

BallPoint location_or_origin(const std::vector<double>& v, int dim) {
  // A single 0 stands for the origin of any dimension.
  if (v.empty() || (v.size() == 1 && v[0] == 0.0)) return BallPoint::origin(dim);
  if (static_cast<int>(v.size()) != dim) {
    throw DimensionError("location has " + std::to_string(v.size()) + " coordinates, expected " +
                         std::to_string(dim));
  }
  return BallPoint(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

Json kmeans_json(const KMeansResult& r, std::uint64_t seed, const Json& config) {
  Json centers = Json::array();
  for (const auto& c : r.barycenters) centers.push_back(to_json(c));
  return Json{{"schema_version", kSchemaVersion},
              {"command", "kmeans"},
              {"seed", seed},
              {"config", config},
              {"barycenters", std::move(centers)},
              {"assignments", r.assignments},
              {"objective", r.objective},
              {"objective_trace", r.objective_trace},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"empty_cluster_repairs", r.empty_cluster_repairs}};
}

Json em_json(const EMResult& r, std::uint64_t seed, const Json& config) {
  Json resp = Json::array();
  for (Eigen::Index i = 0; i < r.responsibilities.rows(); ++i) {
    resp.push_back(to_json(Eigen::VectorXd(r.responsibilities.row(i).transpose())));
  }
  std::size_t undecided = 0;
  for (bool u : r.undecided) undecided += u;
  return Json{{"schema_version", kSchemaVersion},
              {"command", "em"},
              {"seed", seed},
              {"config", config},
              {"model", to_json(r.model)},
              {"saturated", r.saturated},
              {"loglik_trace", r.loglik_trace},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"collapse_restarts", r.collapse_restarts},
              {"labels", hard_labels(r.responsibilities)},
              {"undecided", r.undecided},
              {"undecided_fraction", r.undecided.empty() ? 0.0 : static_cast<double>(undecided) / r.undecided.size()},
              {"responsibilities", std::move(resp)}};
}

Json evaluation_json(const EvaluationReport& e) {
  Json comps = Json::array();
  for (const auto& c : e.components) {
    comps.push_back(Json{{"truth_index", c.truth_index},
                         {"fitted_index", c.fitted_index},
                         {"location_distance", c.location_distance},
                         {"mixing_error", c.mixing_error},
                         {"concentration_rel_error", c.concentration_rel_error}});
  }
  return Json{{"components", std::move(comps)},
              {"ari", e.ari},
              {"undecided_fraction", e.undecided_fraction},
              {"scored_points", e.scored_points},
              {"final_value", e.final_value}};
}

PointSet load_points(const std::string& path) { return read_points_csv(path).points; }

int cmd_sample(const Common& c, const SampleArgs& a, std::ostream& out) {
  const MoebiusComponent comp(location_or_origin(a.location, a.dim), a.concentration);
  const PointSet pts = sample(comp, a.count, c.seed);
  std::ostringstream ss;
  write_points_csv(ss, pts);
  emit(c.out, ss.str(), out);
  return kOk;
}

int cmd_barycenter(const Common& c, const BarycenterArgs& a, std::ostream& out) {
  const PointSet pts = load_points(a.input);
  const Eigen::VectorXd w =
      a.weights.empty() ? Eigen::VectorXd::Ones(static_cast<Eigen::Index>(pts.size())) : read_weights_csv(a.weights);
  BarycenterOptions opts;
  opts.tolerance = a.tolerance;
  opts.max_iterations = a.max_iterations;
  const auto report = solve_barycenter(WeightedDataset(pts, w), opts);
  const Json config{{"input", a.input}, {"weights", a.weights}, {"tolerance", a.tolerance},
                    {"max_iterations", a.max_iterations}};
  emit(c.out,
       dump(Json{{"schema_version", kSchemaVersion},
                 {"command", "barycenter"},
                 {"seed", c.seed},
                 {"config", config},
                 {"barycenter", to_json(report.point)},
                 {"iterations", report.iterations},
                 {"residual_norm", report.residual_norm}}),
       out);
  return kOk;
}

int cmd_kmeans(const Common& c, const KMeansArgs& a, std::ostream& out) {
  const PointSet pts = load_points(a.input);
  KMeansOptions opts;
  opts.seed = c.seed;
  opts.restarts = a.restarts;
  opts.max_iterations = a.max_iterations;
  const auto result = kmeans(pts, a.k, opts);
  const Json config{{"input", a.input}, {"k", a.k}, {"restarts", a.restarts}, {"max_iterations", a.max_iterations}};
  emit(c.out, dump(kmeans_json(result, c.seed, config)), out);
  return kOk;
}

EmOptions em_options(const Common& c, const EmArgs& a) {
  EmOptions opts;
  opts.seed = c.seed;
  opts.restarts = a.restarts;
  opts.max_iterations = a.max_iterations;
  opts.tolerance = a.tolerance;
  opts.s_max = a.s_max;
  opts.undecided_threshold = a.undecided_threshold;
  return opts;
}

int cmd_em(const Common& c, const EmArgs& a, std::ostream& out) {
  const PointSet pts = load_points(a.input);
  const EMResult result = em_fit(pts, a.k, em_options(c, a));
  const Json config{{"input", a.input},
                    {"k", a.k},
                    {"restarts", a.restarts},
                    {"max_iterations", a.max_iterations},
                    {"tolerance", a.tolerance},
                    {"s_max", a.s_max},
                    {"undecided_threshold", a.undecided_threshold},
                    {"loglik_csv", a.loglik_csv}};
  emit(c.out, dump(em_json(result, c.seed, config)), out);
  if (!a.loglik_csv.empty()) {
    std::ostringstream ss;
    write_trace_csv(ss, result.loglik_trace);
    write_file(a.loglik_csv, ss.str());
  }
  return kOk;
}

int cmd_density(const Common& c, const DensityArgs& a, std::ostream& out) {
  const PointSet pts = load_points(a.input);
  std::optional<MixtureModel> model;
  if (!a.model.empty()) {
    const Json j = parse_json(read_file(a.model), a.model);
    try {
      model = mixture_from_json(j.contains("model") ? j.at("model") : j);
    } catch (const ParseError& e) {
      throw ParseError(a.model + ": " + e.what());
    }
  } else {
    model = MixtureModel({MoebiusComponent(location_or_origin(a.location, pts.dim()), a.concentration)}, {1.0});
  }
  if (model->dim() != pts.dim()) throw DimensionError("model and points differ in dimension");
  const Eigen::MatrixXd joint = log_joint(pts, *model);
  std::ostringstream ss;
  for (int k = 0; k < pts.dim(); ++k) ss << 'x' << k + 1 << ',';
  ss << "log_density\n";
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    const double mx = joint.row(i).maxCoeff();
    const double value = mx + std::log((joint.row(i).array() - mx).exp().sum());
    const auto col = pts.col(static_cast<std::size_t>(i));
    for (int k = 0; k < pts.dim(); ++k) ss << format_double(col[k]) << ',';
    ss << format_double(value) << '\n';
  }
  emit(c.out, ss.str(), out);
  return kOk;
}

int cmd_experiment(const Common& c, const ExperimentArgs& a, std::ostream& out) {
  ExperimentSpec spec = [&] {
    if (!a.spec.empty()) {
      try {
        return spec_from_json(parse_json(read_file(a.spec), a.spec));
      } catch (const ParseError& e) {
        throw ParseError(a.spec + ": " + e.what());
      }
    }
    return builtin(a.name, c.seed);
  }();
  if (!a.spec.empty()) spec.seed = c.seed;
  if (a.sample_count > 0) spec.sample_count = a.sample_count;

  if (!a.dump_spec.empty()) {
    emit(a.dump_spec, dump(to_json(spec)), out);
    return kOk;
  }
  if (c.out.empty()) throw DomainError("experiment needs --out DIR");
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const LabeledDataset data = generate(spec);
  const int k = spec.ground_truth.size();
  const Json config{{"name", spec.name},         {"spec", a.spec},     {"sample_count", spec.sample_count},
                    {"restarts", a.restarts},    {"k", k},             {"dim", spec.dim}};

  KMeansOptions kopts;
  kopts.seed = c.seed;
  kopts.restarts = a.restarts;
  const KMeansResult km = kmeans(data.points, k, kopts);

  EmOptions eopts;
  eopts.seed = c.seed;
  eopts.restarts = a.restarts;
  const EMResult em = em_fit(data.points, k, eopts);

  std::ostringstream csv;
  write_points_csv(csv, data.points, &data.labels);
  write_file(dir / "dataset.csv", csv.str());
  write_file(dir / "spec.json", dump(to_json(spec)));

  Json kj = kmeans_json(km, c.seed, config);
  kj["command"] = "experiment";
  kj["evaluation"] = evaluation_json(evaluate(km, data, spec.ground_truth));
  write_file(dir / "kmeans.json", dump(kj));

  Json ej = em_json(em, c.seed, config);
  ej["command"] = "experiment";
  ej["evaluation"] = evaluation_json(evaluate(em, data, spec.ground_truth));
  write_file(dir / "em.json", dump(ej));

  std::ostringstream trace;
  write_trace_csv(trace, em.loglik_trace);
  write_file(dir / "loglik.csv", trace.str());
  return kOk;
}

void report(std::ostream& err, std::string_view category, const std::string& message) {
  err << Json{{"error", Json{{"category", category}, {"message", message}}}}.dump() << '\n';
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kConvergence:
      return kConvergence;
    case ErrorCategory::kNumerical:
      return kNumerical;
    case ErrorCategory::kCollapse:
      return kCollapse;
    default:
      return kValidation;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clustering and Mobius mixture models in the Poincare ball"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common common;
  auto add_common = [&](CLI::App* sub, const char* out_help) {
    sub->add_option("--seed", common.seed, "Seed of every random draw")->capture_default_str();
    sub->add_option("--out", common.out, out_help);
    sub->add_flag("--timing", common.timing, "Print wall-clock seconds to stderr");
  };

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "Draw points from Moeb_n(a, s) and write them as CSV");
  sample_cmd->add_option("--n,--dim", sa.dim, "Dimension of the ball")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  sample_cmd->add_option("--a,--location", sa.location, "Location: n comma-separated coordinates, or 0")
      ->delimiter(',');
  sample_cmd->add_option("--s,--concentration", sa.concentration, "Concentration s > n - 1")->required();
  sample_cmd->add_option("--count", sa.count, "Number of points")->required()->check(CLI::PositiveNumber);
  add_common(sample_cmd, "Output CSV file (stdout when omitted)");

  BarycenterArgs ba;
  auto* bary_cmd = app.add_subcommand("barycenter", "Weighted conformal barycenter of a point file");
  bary_cmd->add_option("--input", ba.input, "Point CSV")->required();
  bary_cmd->add_option("--weights", ba.weights, "Weight CSV with header 'w' (unit weights when omitted)");
  bary_cmd->add_option("--tol", ba.tolerance, "Residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  bary_cmd->add_option("--max-iter", ba.max_iterations, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  add_common(bary_cmd, "Output JSON file (stdout when omitted)");

  KMeansArgs ka;
  auto* km_cmd = app.add_subcommand("kmeans", "Hyperbolic k-means");
  km_cmd->add_option("--input", ka.input, "Point CSV")->required();
  km_cmd->add_option("--k", ka.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  km_cmd->add_option("--restarts", ka.restarts, "Seeded restarts; the best objective wins")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  km_cmd->add_option("--max-iter", ka.max_iterations, "Iteration cap per restart")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_common(km_cmd, "Output JSON file (stdout when omitted)");

  EmArgs ea;
  auto* em_cmd = app.add_subcommand("em", "EM for a mixture of Mobius distributions");
  em_cmd->add_option("--input", ea.input, "Point CSV")->required();
  em_cmd->add_option("--k", ea.k, "Number of components")->required()->check(CLI::PositiveNumber);
  em_cmd->add_option("--restarts", ea.restarts, "Seeded restarts; the best log-likelihood wins")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  em_cmd->add_option("--max-iter", ea.max_iterations, "Iteration cap per restart")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  em_cmd->add_option("--tol", ea.tolerance, "Stop when the relative log-likelihood gain falls below this")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  em_cmd->add_option("--s-max", ea.s_max, "Cap on concentrations")->capture_default_str();
  em_cmd->add_option("--undecided-threshold", ea.undecided_threshold,
                     "A point is undecided when its largest responsibility is below this")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  em_cmd->add_option("--loglik-csv", ea.loglik_csv, "Also write the log-likelihood trace as CSV");
  add_common(em_cmd, "Output JSON file (stdout when omitted)");

  DensityArgs da;
  auto* dens_cmd = app.add_subcommand("density", "Log density of a component or fitted mixture at each point");
  dens_cmd->add_option("--input", da.input, "Point CSV")->required();
  auto* model_opt = dens_cmd->add_option("--model", da.model, "Mixture JSON, or an em result file");
  auto* s_opt = dens_cmd->add_option("--s,--concentration", da.concentration, "Concentration of a single component");
  dens_cmd->add_option("--a,--location", da.location, "Location of a single component (default origin)")
      ->delimiter(',');
  model_opt->excludes(s_opt);
  add_common(dens_cmd, "Output CSV file (stdout when omitted)");

  ExperimentArgs xa;
  auto* exp_cmd = app.add_subcommand("experiment", "Regenerate a ground-truth experiment and fit k-means and EM");
  auto* name_opt = exp_cmd->add_option("--name", xa.name, "Built-in experiment: A1, A2, A3, B1 or B2");
  auto* spec_opt = exp_cmd->add_option("--spec", xa.spec, "Experiment spec JSON instead of a built-in");
  name_opt->excludes(spec_opt);
  exp_cmd->add_option("--samples", xa.sample_count, "Override the number of generated points");
  exp_cmd->add_option("--restarts", xa.restarts, "Seeded restarts for k-means and EM")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--dump-spec", xa.dump_spec, "Write the spec JSON to this file ('-' for stdout) and stop");
  add_common(exp_cmd, "Output directory for dataset.csv, spec.json, kmeans.json, em.json, loglik.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests come through here with exit code 0.
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    report(err, "usage", e.what());
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (*sample_cmd) {
      code = cmd_sample(common, sa, out);
    } else if (*bary_cmd) {
      code = cmd_barycenter(common, ba, out);
    } else if (*km_cmd) {
      code = cmd_kmeans(common, ka, out);
    } else if (*em_cmd) {
      code = cmd_em(common, ea, out);
    } else if (*dens_cmd) {
      if (da.model.empty() && s_opt->count() == 0) throw DomainError("density needs --model or --s");
      code = cmd_density(common, da, out);
    } else if (*exp_cmd) {
      if (xa.name.empty() && xa.spec.empty()) throw DomainError("experiment needs --name or --spec");
      code = cmd_experiment(common, xa, out);
    }
  } catch (const IoError& e) {
    report(err, "io", e.what());
    return kIo;
  } catch (const ParseError& e) {
    report(err, "parse", e.what());
    return kParse;
  } catch (const Error& e) {
    report(err, to_string(e.category()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    report(err, "internal", e.what());
    return kInternal;
  }
  if (common.timing) {
    err << "elapsed_seconds=" << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
        << '\n';
  }
  return code;
}

}  // namespace hyperball::cli
