#include "stefan/driver.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "stefan/errors.hpp"
#include "stefan/experiments.hpp"
#include "stefan/fixed_point.hpp"
#include "stefan/mollify.hpp"

namespace stefan::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// shortest round-trip decimal, for human-facing labels
std::string fmt_short(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out.good()) raise(ErrorCode::Io, "failed writing " + path.string());
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<double> grid_times(const TimeGrid& g) {
  std::vector<double> t(g.n_nodes());
  for (int k = 0; k < g.n_nodes(); ++k) t[k] = g.t(k);
  return t;
}

ordered_json solve_report_json(const fixedpoint::SolveReport& r) {
  ordered_json j;
  j["residual"] = r.residual;
  j["window_halvings"] = r.window_halvings;
  j["iterations_per_window"] = r.iterations_per_window;
  j["window_residuals"] = r.evaluator_stats.window_residuals;
  j["window_sizes"] = r.evaluator_stats.window_sizes;
  j["n_evaluations"] = r.evaluator_stats.n_evaluations;
  j["max_ci_halfwidth"] = r.evaluator_stats.max_ci_halfwidth;
  j["lipschitz_bound"] = r.boundary.lipschitz_bound;
  j["terminal_value"] = r.boundary.values.back();
  return j;
}

ordered_json fk_report_json(const experiments::FkGapReport& r) {
  ordered_json j;
  j["gap"] = r.gap;
  j["max_ci_halfwidth"] = r.max_ci;
  j["scheme_error_estimate"] = r.scheme_error_estimate;
  j["pass"] = r.pass;
  return j;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, cfg.config_hash);
  char stamp[32];
  std::time_t now = std::time(nullptr);
  std::tm tm_utc;
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);

  ordered_json j;
  j["tool"] = "stefan";
  j["version"] = kToolVersion;
  j["mode"] = mode_name(cfg.mode);
  j["config_hash"] = hash;
  j["seed"] = cfg.picard.ensemble.seed;
  j["timestamp"] = stamp;
  write_json(dir / "manifest.json", j);
}

SpaceGrid fk_default_xgrid(const RunConfig& cfg, double eps) {
  if (cfg.xgrid) return *cfg.xgrid;
  const double x_max = default_x_max(cfg.density.support_upper() + eps, cfg.tgrid.t_max);
  return SpaceGrid(x_max, 1024);
}

int run_impl(const std::string& config_path, const RunOverrides& overrides) {
  RunConfig cfg = parse_run_config(config_path);
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  if (overrides.seed) cfg.picard.ensemble.seed = *overrides.seed;
  if (overrides.n_threads) cfg.picard.ensemble.n_threads = *overrides.n_threads;

  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorCode::Io, "cannot create output directory " + dir.string());

  ordered_json report;
  report["mode"] = mode_name(cfg.mode);
  report["alpha"] = cfg.alpha;
  if (cfg.picard.evaluator == fixedpoint::Evaluator::mc || cfg.mode == Mode::fk_validate) {
    ordered_json unreliable = ordered_json::array();
    for (double e : cfg.epsilons)
      if (!mc::mc_reliable(e)) unreliable.push_back(e);
    if (!unreliable.empty()) report["unreliable_epsilons"] = unreliable;
  }

  switch (cfg.mode) {
    case Mode::solve_regularized: {
      const double eps = cfg.epsilons.front();
      const auto solved =
          fixedpoint::solve_regularized(cfg.density, ModelParams{cfg.alpha, eps}, cfg.tgrid, cfg.picard);
      emit_csv((dir / "boundary.csv").string(), {"t", "lambda"},
               {grid_times(cfg.tgrid), solved.boundary.values});
      report["epsilon"] = eps;
      report["solve"] = solve_report_json(solved);
      break;
    }
    case Mode::solve_limit: {
      mc::EnsembleConfig ens = cfg.picard.ensemble;
      if (cfg.limit_particles > 0) ens.n_particles = cfg.limit_particles;
      const auto solved = fixedpoint::solve_limit(cfg.density, ModelParams{cfg.alpha, 0.0},
                                                  cfg.tgrid, ens, cfg.limit_tol);
      emit_csv((dir / "boundary.csv").string(), {"t", "lambda"},
               {grid_times(cfg.tgrid), solved.boundary.values});
      report["tol"] = cfg.limit_tol;
      report["sweeps"] = solved.iterations_per_window.front();
      report["solve"] = solve_report_json(solved);
      break;
    }
    case Mode::sweep: {
      experiments::SweepOptions opt;
      opt.limit_tol = cfg.limit_tol;
      opt.limit_particles = cfg.limit_particles;
      opt.with_fk_gaps = cfg.fk_gaps;
      const auto sweep = experiments::epsilon_sweep(cfg.density, cfg.alpha, cfg.epsilons,
                                                    cfg.tgrid, cfg.picard, cfg.picard.ensemble, opt);

      std::vector<std::string> header{"t"};
      std::vector<std::vector<double>> cols{grid_times(cfg.tgrid)};
      for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
        header.push_back("lambda_eps_" + fmt_short(sweep.epsilons[i]));
        cols.push_back(sweep.boundaries[i].values);
      }
      header.push_back("lambda_limit");
      cols.push_back(sweep.limit.values);
      emit_csv((dir / "boundaries.csv").string(), header, cols);
      emit_csv((dir / "distances.csv").string(), {"epsilon", "sup_distance"},
               {sweep.epsilons, sweep.sup_distances});
      if (!sweep.fk_gaps.empty())
        emit_csv((dir / "fk_gaps.csv").string(), {"epsilon", "fk_gap"},
                 {sweep.epsilons, sweep.fk_gaps});

      report["epsilons"] = sweep.epsilons;
      report["sup_distances"] = sweep.sup_distances;
      report["tol_mono"] = sweep.tol_mono;
      report["n_monotonicity_violations"] = sweep.monotonicity_violations.size();
      ordered_json viols = ordered_json::array();
      for (const auto& v : sweep.monotonicity_violations)
        viols.push_back({{"eps_coarse", v.eps_coarse},
                         {"eps_fine", v.eps_fine},
                         {"t", v.t},
                         {"magnitude", v.magnitude}});
      report["monotonicity_violations"] = viols;
      if (!sweep.fk_gaps.empty()) {
        report["fk_gaps"] = sweep.fk_gaps;
        ordered_json fk = ordered_json::array();
        for (const auto& r : sweep.fk_reports) fk.push_back(fk_report_json(r));
        report["fk_reports"] = fk;
      }
      ordered_json per_eps = ordered_json::array();
      for (const auto& r : sweep.solver_reports) per_eps.push_back(solve_report_json(r));
      report["solves"] = per_eps;
      report["limit"] = solve_report_json(sweep.limit_report);
      break;
    }
    case Mode::fk_validate: {
      const double eps = cfg.epsilons.front();
      const ModelParams params{cfg.alpha, eps};
      BoundaryPath lam = zero_boundary(cfg.tgrid);
      if (cfg.fk_at_solved)
        lam = fixedpoint::solve_regularized(cfg.density, params, cfg.tgrid, cfg.picard).boundary;
      const auto fk = experiments::fk_cross_validate(cfg.density, params, lam,
                                                     fk_default_xgrid(cfg, eps),
                                                     cfg.picard.ensemble);
      emit_csv((dir / "fk_profiles.csv").string(), {"t", "f_pde", "f_mc", "ci_halfwidth"},
               {grid_times(cfg.tgrid), fk.f_pde.values, fk.f_mc.values, fk.ci_profile});
      report["epsilon"] = eps;
      report["fk"] = fk_report_json(fk);
      break;
    }
  }

  write_json(dir / "report.json", report);
  write_manifest(dir, cfg);
  return 0;
}

}  // namespace

void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    raise(ErrorCode::PreconditionFailed, "emit_csv: header/column count mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) raise(ErrorCode::PreconditionFailed, "emit_csv: ragged columns");

  std::string out;
  out.reserve(rows * columns.size() * 22 + 64);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += "\r\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += fmt17(columns[c][r]);
    }
    out += "\r\n";
  }
  write_text(path, out);
}

int run(const std::string& config_path, const RunOverrides& overrides) {
  try {
    return run_impl(config_path, overrides);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace stefan::cli
