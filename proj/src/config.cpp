#include "stefan/config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "stefan/errors.hpp"

namespace stefan::cli {
namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& detail) { raise(ErrorCode::ConfigParse, detail); }

void expect_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) bad(std::string("unknown key \"") + item.key() + "\" in " + where);
  }
}

double get_number(const json& j, const char* where) {
  if (!j.is_number()) bad(std::string(where) + " must be a number");
  return j.get<double>();
}

std::int64_t get_integer(const json& j, const char* where) {
  if (!j.is_number_integer()) bad(std::string(where) + " must be an integer");
  return j.get<std::int64_t>();
}

bool get_bool(const json& j, const char* where) {
  if (!j.is_boolean()) bad(std::string(where) + " must be a boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const char* where) {
  if (!j.is_string()) bad(std::string(where) + " must be a string");
  return j.get<std::string>();
}

std::vector<double> get_number_array(const json& j, const char* where) {
  if (!j.is_array()) bad(std::string(where) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(get_number(v, where));
  return out;
}

DensitySpec parse_density(const json& j) {
  expect_keys(j, "model.density", {"kind", "a", "b", "breakpoints", "heights", "x", "values"});
  const std::string kind = get_string(j.at("kind"), "density.kind");
  if (kind == "uniform") {
    expect_keys(j, "uniform density", {"kind", "a", "b"});
    if (!j.contains("a") || !j.contains("b")) bad("uniform density needs a and b");
    return DensitySpec::uniform(get_number(j.at("a"), "density.a"),
                                get_number(j.at("b"), "density.b"));
  }
  if (kind == "piecewise_constant") {
    expect_keys(j, "piecewise density", {"kind", "breakpoints", "heights"});
    if (!j.contains("breakpoints") || !j.contains("heights"))
      bad("piecewise_constant density needs breakpoints and heights");
    return DensitySpec::piecewise_constant(
        get_number_array(j.at("breakpoints"), "density.breakpoints"),
        get_number_array(j.at("heights"), "density.heights"));
  }
  if (kind == "tabulated") {
    expect_keys(j, "tabulated density", {"kind", "x", "values"});
    if (!j.contains("x") || !j.contains("values")) bad("tabulated density needs x and values");
    return DensitySpec::tabulated(get_number_array(j.at("x"), "density.x"),
                                  get_number_array(j.at("values"), "density.values"));
  }
  bad("density.kind must be uniform, piecewise_constant, or tabulated");
}

TimeGrid parse_tgrid(const json& j) {
  expect_keys(j, "time_grid", {"t_max", "n_steps"});
  if (!j.contains("t_max") || !j.contains("n_steps")) bad("time_grid needs t_max and n_steps");
  return TimeGrid(get_number(j.at("t_max"), "time_grid.t_max"),
                  static_cast<int>(get_integer(j.at("n_steps"), "time_grid.n_steps")));
}

SpaceGrid parse_xgrid(const json& j) {
  expect_keys(j, "space_grid", {"x_max", "n_cells"});
  if (!j.contains("x_max") || !j.contains("n_cells")) bad("space_grid needs x_max and n_cells");
  return SpaceGrid(get_number(j.at("x_max"), "space_grid.x_max"),
                   static_cast<int>(get_integer(j.at("n_cells"), "space_grid.n_cells")));
}

void parse_picard(const json& j, fixedpoint::PicardConfig& p) {
  expect_keys(j, "picard", {"evaluator", "tol", "max_iter", "window_steps", "min_window_steps"});
  if (j.contains("evaluator")) {
    const std::string ev = get_string(j.at("evaluator"), "picard.evaluator");
    if (ev == "pde")
      p.evaluator = fixedpoint::Evaluator::pde;
    else if (ev == "mc")
      p.evaluator = fixedpoint::Evaluator::mc;
    else
      bad("picard.evaluator must be pde or mc");
  }
  if (j.contains("tol")) p.tol = get_number(j.at("tol"), "picard.tol");
  if (j.contains("max_iter"))
    p.max_iter = static_cast<int>(get_integer(j.at("max_iter"), "picard.max_iter"));
  if (j.contains("window_steps"))
    p.window_steps = static_cast<int>(get_integer(j.at("window_steps"), "picard.window_steps"));
  if (j.contains("min_window_steps"))
    p.min_window_steps =
        static_cast<int>(get_integer(j.at("min_window_steps"), "picard.min_window_steps"));
}

void parse_ensemble(const json& j, mc::EnsembleConfig& e) {
  expect_keys(j, "ensemble",
              {"n_particles", "seed", "bridge_refinement", "antithetic", "n_threads"});
  if (j.contains("n_particles")) e.n_particles = get_integer(j.at("n_particles"), "ensemble.n_particles");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) bad("ensemble.seed must be an integer");
    e.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("bridge_refinement")) {
    const std::string b = get_string(j.at("bridge_refinement"), "ensemble.bridge_refinement");
    if (b == "auto")
      e.bridge_refinement = mc::EnsembleConfig::Bridge::automatic;
    else if (b == "on")
      e.bridge_refinement = mc::EnsembleConfig::Bridge::on;
    else if (b == "off")
      e.bridge_refinement = mc::EnsembleConfig::Bridge::off;
    else
      bad("ensemble.bridge_refinement must be auto, on, or off");
  }
  if (j.contains("antithetic")) e.antithetic = get_bool(j.at("antithetic"), "ensemble.antithetic");
  if (j.contains("n_threads"))
    e.n_threads = static_cast<int>(get_integer(j.at("n_threads"), "ensemble.n_threads"));
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::solve_regularized: return "solve_regularized";
    case Mode::solve_limit: return "solve_limit";
    case Mode::sweep: return "sweep";
    case Mode::fk_validate: return "fk_validate";
  }
  return "?";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig parse_run_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.config_hash = fnv1a64(text);
  try {
    expect_keys(j, "config",
                {"mode", "model", "epsilon", "epsilons", "time_grid", "space_grid", "picard",
                 "ensemble", "limit", "fk_gaps", "fk_at_solved", "seed", "output_dir"});

    if (!j.contains("mode")) bad("config needs a mode");
    const std::string mode = get_string(j.at("mode"), "mode");
    if (mode == "solve_regularized")
      cfg.mode = Mode::solve_regularized;
    else if (mode == "solve_limit")
      cfg.mode = Mode::solve_limit;
    else if (mode == "sweep")
      cfg.mode = Mode::sweep;
    else if (mode == "fk_validate")
      cfg.mode = Mode::fk_validate;
    else
      bad("mode must be solve_regularized, solve_limit, sweep, or fk_validate");

    if (!j.contains("model")) bad("config needs a model");
    const json& jm = j.at("model");
    expect_keys(jm, "model", {"alpha", "density"});
    if (!jm.contains("alpha") || !jm.contains("density")) bad("model needs alpha and density");
    cfg.alpha = get_number(jm.at("alpha"), "model.alpha");
    cfg.density = parse_density(jm.at("density"));

    if (j.contains("epsilon") && j.contains("epsilons"))
      bad("give either epsilon or epsilons, not both");
    if (j.contains("epsilon")) cfg.epsilons = {get_number(j.at("epsilon"), "epsilon")};
    if (j.contains("epsilons")) cfg.epsilons = get_number_array(j.at("epsilons"), "epsilons");
    const bool needs_eps = cfg.mode != Mode::solve_limit;
    if (needs_eps && cfg.epsilons.empty()) bad("this mode needs epsilon (or epsilons)");
    if ((cfg.mode == Mode::solve_regularized || cfg.mode == Mode::fk_validate) &&
        cfg.epsilons.size() != 1)
      bad("this mode takes exactly one epsilon");

    if (!j.contains("time_grid")) bad("config needs a time_grid");
    cfg.tgrid = parse_tgrid(j.at("time_grid"));
    if (j.contains("space_grid")) cfg.xgrid = parse_xgrid(j.at("space_grid"));

    if (j.contains("picard")) parse_picard(j.at("picard"), cfg.picard);
    if (j.contains("ensemble")) parse_ensemble(j.at("ensemble"), cfg.picard.ensemble);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_integer()) bad("seed must be an integer");
      cfg.picard.ensemble.seed = j.at("seed").get<std::uint64_t>();
    }

    if (j.contains("limit")) {
      const json& jl = j.at("limit");
      expect_keys(jl, "limit", {"tol", "n_particles"});
      if (jl.contains("tol")) cfg.limit_tol = get_number(jl.at("tol"), "limit.tol");
      if (jl.contains("n_particles"))
        cfg.limit_particles = get_integer(jl.at("n_particles"), "limit.n_particles");
    }
    if (j.contains("fk_gaps")) cfg.fk_gaps = get_bool(j.at("fk_gaps"), "fk_gaps");
    if (j.contains("fk_at_solved")) cfg.fk_at_solved = get_bool(j.at("fk_at_solved"), "fk_at_solved");
    if (j.contains("output_dir")) cfg.output_dir = get_string(j.at("output_dir"), "output_dir");
  } catch (const json::exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }

  cfg.picard.xgrid = cfg.xgrid;
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) raise(ErrorCode::Io, "cannot read config file " + path);
  return parse_run_config_text(ss.str());
}

}  // namespace stefan::cli
