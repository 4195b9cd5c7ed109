// Command-line driver: check | tensors | sweep over built-in fixtures or
// user spec files.  Exit codes: 0 all inequality verdicts hold, 2 a verdict
// fails beyond tolerance, 1 usage or pipeline errors.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "casorati/fixtures.hpp"
#include "casorati/pipeline.hpp"
#include "casorati/report.hpp"

namespace {

using casorati::fixtures::Fixture;
using casorati::io::SubmersionSpec;
using casorati::numkit::Vec;
using casorati::pipeline::AnalysisOptions;
using casorati::pipeline::PointAnalysis;
using casorati::pipeline::TheoremOutcome;
using json = nlohmann::json;

struct CommonArgs {
  std::string fixture;
  std::string spec_file;
  std::string point_csv;
  std::string points_file;
  std::string theorem = "general";
  std::string format = "json";
  double tol = -1.0;
  std::uint64_t seed = 0x5EED;
  int threads = 1;
};

Vec parse_point(const std::string& csv) {
  Vec p;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    p.push_back(std::stod(item));
  }
  return p;
}

struct Job {
  SubmersionSpec spec;
  std::vector<Vec> points;
  std::string default_theorem;
};

Job resolve_inputs(const CommonArgs& args) {
  Job job;
  if (!args.fixture.empty() && !args.spec_file.empty())
    throw std::invalid_argument("--fixture and --spec are mutually exclusive");
  if (args.fixture.empty() && args.spec_file.empty())
    throw std::invalid_argument("one of --fixture or --spec is required");

  if (!args.fixture.empty()) {
    const auto cat = casorati::fixtures::catalog();
    const Fixture& f = casorati::fixtures::find(cat, args.fixture);
    job.spec = f.spec;
    job.points = f.default_points;
    job.default_theorem = f.default_theorem;
  } else {
    std::ifstream in(args.spec_file);
    if (!in) throw std::invalid_argument("cannot open spec file: " + args.spec_file);
    json j = json::parse(in);
    job.spec = casorati::io::spec_from_json(j);
    job.default_theorem = "general";
  }

  if (!args.point_csv.empty()) job.points = {parse_point(args.point_csv)};
  if (!args.points_file.empty()) {
    job.points.clear();
    std::ifstream in(args.points_file);
    if (!in) throw std::invalid_argument("cannot open points file: " + args.points_file);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      job.points.push_back(parse_point(line));
    }
  }
  if (job.points.empty()) throw std::invalid_argument("no evaluation points given");
  return job;
}

struct PointResult {
  PointAnalysis analysis;
  std::optional<TheoremOutcome> outcome;
  std::string error;
};

std::vector<PointResult> run_points(const Job& job, const CommonArgs& args,
                                    const casorati::thm::TheoremKind& kind) {
  std::vector<PointResult> results(job.points.size());
  AnalysisOptions opt;
  opt.seed = args.seed;
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < job.points.size(); i += stride) {
      try {
        results[i].analysis = casorati::pipeline::analyze_point(job.spec, job.points[i], opt);
        if (results[i].analysis.cs)
          results[i].outcome = casorati::pipeline::evaluate_theorem(job.spec, results[i].analysis, kind);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  const int nthreads = std::max(1, args.threads);
  if (nthreads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t), static_cast<std::size_t>(nthreads));
    for (auto& th : pool) th.join();
  }
  return results;
}

int exit_code_for(const std::vector<PointResult>& results, double tol_override) {
  bool any_error = false, any_violation = false;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      any_error = true;
      continue;
    }
    if (r.outcome) {
      const auto& v = r.outcome->verdict;
      const double tol = tol_override > 0 ? tol_override : v.tol_report;
      if (v.lhs > v.rhs_delta + tol || v.lhs > v.rhs_hat + tol) any_violation = true;
    }
  }
  if (any_violation) return 2;
  if (any_error) return 1;
  return 0;
}

std::string flags_field(const casorati::thm::EqualityFlags& f) {
  std::string s;
  s += f.quasi_umbilical ? '1' : '0';
  s += f.off_diagonal_zero ? '1' : '0';
  s += f.A_zero ? '1' : '0';
  return s;
}

void emit_csv_header(std::ostream& os, const SubmersionSpec& spec) {
  for (const auto& c : spec.coords) os << casorati::report::csv_quote(c) << ",";
  os << "lhs,rhs_delta,rhs_hat,gap_delta,gap_hat,equality_flags,max_residual\r\n";
}

void emit_csv_row(std::ostream& os, const PointResult& r) {
  using casorati::report::format_double;
  for (double x : r.analysis.point) os << format_double(x) << ",";
  if (r.outcome) {
    const auto& v = r.outcome->verdict;
    os << format_double(v.lhs) << "," << format_double(v.rhs_delta) << ","
       << format_double(v.rhs_hat) << "," << format_double(v.gap_delta) << ","
       << format_double(v.gap_hat) << "," << flags_field(v.flags);
  } else {
    os << ",,,,,";
  }
  os << "," << format_double(casorati::report::max_residual(r.analysis)) << "\r\n";
}

int cmd_check(const CommonArgs& args, bool tensors_mode) {
  Job job = resolve_inputs(args);
  std::string kind_text = args.theorem;
  if (kind_text == "auto") kind_text = job.default_theorem;
  const auto kind = casorati::thm::TheoremKind::parse(kind_text);
  const auto results = run_points(job, args, kind);

  if (args.format == "json") {
    json out = json::array();
    for (const auto& r : results) {
      if (!r.error.empty()) {
        out.push_back({{"schema", 1}, {"error", r.error}});
        continue;
      }
      out.push_back(casorati::report::report_json(job.spec, r.analysis, r.outcome, kind_text,
                                                  tensors_mode));
    }
    std::cout << out.dump(2) << "\n";
  } else if (args.format == "csv") {
    emit_csv_header(std::cout, job.spec);
    for (const auto& r : results)
      if (r.error.empty()) emit_csv_row(std::cout, r);
  } else {
    throw std::invalid_argument("unknown format: " + args.format);
  }

  for (const auto& r : results)
    if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  return exit_code_for(results, args.tol);
}

struct GridAxis {
  std::string coord;
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

GridAxis parse_axis(const std::string& text) {
  GridAxis a;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("grid axis must be coord=lo:hi:count");
  a.coord = text.substr(0, eq);
  std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = rest.find(':', c1 == std::string::npos ? std::string::npos : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid axis must be coord=lo:hi:count");
  a.lo = std::stod(rest.substr(0, c1));
  a.hi = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
  a.count = std::stoi(rest.substr(c2 + 1));
  if (a.count < 1) throw std::invalid_argument("grid axis count must be >= 1");
  return a;
}

int cmd_sweep(const CommonArgs& args, const std::vector<std::string>& grid_specs) {
  Job job = resolve_inputs(args);
  std::string kind_text = args.theorem;
  if (kind_text == "auto") kind_text = job.default_theorem;
  const auto kind = casorati::thm::TheoremKind::parse(kind_text);

  std::vector<GridAxis> axes;
  for (const auto& text : grid_specs) axes.push_back(parse_axis(text));
  std::vector<int> axis_index;
  for (const auto& a : axes) {
    auto it = std::find(job.spec.coords.begin(), job.spec.coords.end(), a.coord);
    if (it == job.spec.coords.end())
      throw std::invalid_argument("grid coordinate not in chart: " + a.coord);
    axis_index.push_back(static_cast<int>(it - job.spec.coords.begin()));
  }

  const Vec base = job.points.front();
  std::vector<Vec> grid_points;
  std::vector<int> counter(axes.size(), 0);
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.count);
  std::size_t skipped = 0;
  for (std::size_t idx = 0; idx < total && !axes.empty(); ++idx) {
    Vec p = base;
    std::size_t rem = idx;
    for (std::size_t ax = axes.size(); ax-- > 0;) {
      const int k = static_cast<int>(rem % static_cast<std::size_t>(axes[ax].count));
      rem /= static_cast<std::size_t>(axes[ax].count);
      const auto& a = axes[ax];
      const double v = a.count == 1 ? a.lo : a.lo + (a.hi - a.lo) * k / (a.count - 1);
      p[static_cast<std::size_t>(axis_index[ax])] = v;
    }
    if (!job.spec.in_domain(p)) {
      ++skipped;
      continue;
    }
    grid_points.push_back(p);
  }
  job.points = grid_points;

  emit_csv_header(std::cout, job.spec);
  if (!job.points.empty()) {
    const auto results = run_points(job, args, kind);
    for (const auto& r : results)
      if (r.error.empty()) emit_csv_row(std::cout, r);
    for (const auto& r : results)
      if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
    if (skipped) std::cerr << "skipped " << skipped << " grid points outside the domain\n";
    return exit_code_for(results, args.tol);
  }
  if (skipped) std::cerr << "skipped " << skipped << " grid points outside the domain\n";
  return 0;
}

void add_common(CLI::App* app, CommonArgs& args, bool with_points = true) {
  app->add_option("--fixture", args.fixture, "built-in fixture name");
  app->add_option("--spec", args.spec_file, "submersion spec JSON file");
  if (with_points) {
    app->add_option("--point", args.point_csv, "evaluation point as comma-separated values");
    app->add_option("--points", args.points_file, "file with one point per line");
  }
  app->add_option("--theorem", args.theorem,
                  "general|rsf|csf|gssf|corollary:CLASS[:k=v,...] (default: fixture's kind)")
      ->default_val("auto");
  app->add_option("--format", args.format, "json|csv")->default_val("json");
  app->add_option("--tol", args.tol, "report tolerance override for verdicts");
  app->add_option("--seed", args.seed, "optimizer sampling seed")->default_val("24301");
  app->add_option("--threads", args.threads, "point-level parallelism")->default_val("1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casorati inequality checks for Riemannian submersions"};
  app.require_subcommand(1);

  CommonArgs check_args, tensors_args, sweep_args;
  std::vector<std::string> grid_specs;

  CLI::App* check = app.add_subcommand("check", "evaluate the inequality at points");
  add_common(check, check_args);
  CLI::App* tensors = app.add_subcommand("tensors", "dump frames and O'Neill tensor blocks");
  add_common(tensors, tensors_args);
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate over a coordinate grid, CSV output");
  add_common(sweep, sweep_args, false);
  sweep->add_option("--grid", grid_specs, "axis as coord=lo:hi:count (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (check->parsed()) return cmd_check(check_args, false);
    if (tensors->parsed()) {
      tensors_args.format = "json";
      return cmd_check(tensors_args, true);
    }
    if (sweep->parsed()) {
      sweep_args.format = "csv";
      return cmd_sweep(sweep_args, grid_specs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
