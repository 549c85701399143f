#include "drmdp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "drmdp/error.hpp"
#include "drmdp/fixed_point.hpp"

namespace drmdp::experiments {

namespace fs = std::filesystem;

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::ApproxError: return "approx-error";
    case Kind::Convergence: return "convergence";
    case Kind::Clt: return "clt";
    case Kind::QstarTable: return "qstar";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& name) {
  for (Kind k : {Kind::ApproxError, Kind::Convergence, Kind::Clt, Kind::QstarTable}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown experiment kind '" + name + "'");
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  require(count >= 1, ErrorKind::InvalidArgument, "grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

double quantile(std::vector<double> data, double q) {
  require(!data.empty(), ErrorKind::InvalidArgument, "quantile of empty data");
  std::sort(data.begin(), data.end());
  const double pos = q * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (pos - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
          "slope fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig ExperimentConfig::defaults(Kind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case Kind::ApproxError:
      cfg.gammas = {0.7, 0.9};
      cfg.deltas = uniform_grid(0.01, 0.5, 50);
      cfg.epsilon = 0.0;
      break;
    case Kind::Convergence:
      cfg.seed_count = 20;
      break;
    case Kind::Clt:
      cfg.seed_count = 1000;
      break;
    case Kind::QstarTable:
      break;
  }
  return cfg;
}

namespace {

const std::set<std::string> kKnownKeys{
    "experiment", "mdp",        "gammas",           "deltas",      "delta_grid",
    "epsilon",    "schedule",   "steps",            "seed_count",  "root_seed",
    "seeds",      "checkpoint_count", "coordinates", "level",      "tie_tol",
    "vi_tol",     "vi_max_iter", "burn_in_fraction", "threads"};

Coordinate coordinate_from_json(const Json& j) {
  Coordinate c;
  c.action = j.at("action").get<Index>();
  if (j.contains("level")) {
    c.level = j.at("level").get<int>();
  } else {
    c.state = j.at("state").get<Index>();
  }
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(Kind kind, const Json& j) {
  require(j.is_object(), ErrorKind::InvalidArgument, "config must be a JSON object");
  for (const auto& item : j.items()) {
    require(kKnownKeys.count(item.key()) == 1, ErrorKind::InvalidArgument,
            "unknown config key '" + item.key() + "'");
  }
  if (j.contains("experiment")) {
    require(kind_from_string(j.at("experiment").get<std::string>()) == kind,
            ErrorKind::InvalidArgument, "config is for a different experiment");
  }
  ExperimentConfig cfg = defaults(kind);
  try {
    if (j.contains("mdp")) {
      const Json& m = j.at("mdp");
      if (m.contains("path")) cfg.mdp_path = m.at("path").get<std::string>();
      if (m.contains("inventory")) cfg.inventory = params_from_json(m.at("inventory"));
    }
    if (j.contains("gammas")) cfg.gammas = j.at("gammas").get<std::vector<double>>();
    if (j.contains("deltas")) cfg.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("delta_grid")) {
      const Json& g = j.at("delta_grid");
      cfg.deltas = uniform_grid(g.at("min").get<double>(), g.at("max").get<double>(),
                                g.at("count").get<int>());
    }
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    if (j.contains("schedule")) {
      const Json& s = j.at("schedule");
      const double a = s.value("a", cfg.schedule.a);
      const double tau = s.value("tau", cfg.schedule.tau);
      cfg.schedule = mvsa::StepSchedule::with_default_b(a, tau);
      if (s.contains("b") && !s.at("b").is_null()) cfg.schedule.b = s.at("b").get<double>();
    }
    cfg.steps = j.value("steps", cfg.steps);
    cfg.seed_count = j.value("seed_count", cfg.seed_count);
    cfg.root_seed = j.value("root_seed", cfg.root_seed);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.checkpoint_count = j.value("checkpoint_count", cfg.checkpoint_count);
    if (j.contains("coordinates")) {
      cfg.coordinates.clear();
      for (const Json& c : j.at("coordinates")) cfg.coordinates.push_back(coordinate_from_json(c));
    }
    cfg.level = j.value("level", cfg.level);
    cfg.tie_tol = j.value("tie_tol", cfg.tie_tol);
    cfg.vi_tol = j.value("vi_tol", cfg.vi_tol);
    cfg.vi_max_iter = j.value("vi_max_iter", cfg.vi_max_iter);
    cfg.burn_in_fraction = j.value("burn_in_fraction", cfg.burn_in_fraction);
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

Json ExperimentConfig::to_json() const {
  Json mdp = mdp_path ? Json{{"path", mdp_path->string()}}
                      : Json{{"inventory", params_to_json(inventory)}};
  Json coords = Json::array();
  for (const Coordinate& c : coordinates) {
    coords.push_back(c.level ? Json{{"level", *c.level}, {"action", c.action}}
                             : Json{{"state", c.state}, {"action", c.action}});
  }
  return Json{{"experiment", experiments::to_string(kind)},
              {"mdp", mdp},
              {"gammas", gammas},
              {"deltas", deltas},
              {"epsilon", epsilon},
              {"schedule", {{"a", schedule.a}, {"b", schedule.b}, {"tau", schedule.tau}}},
              {"steps", steps},
              {"seed_count", seed_count},
              {"root_seed", root_seed},
              {"seeds", seeds},
              {"checkpoint_count", checkpoint_count},
              {"coordinates", coords},
              {"level", level},
              {"tie_tol", tie_tol},
              {"vi_tol", vi_tol},
              {"vi_max_iter", vi_max_iter},
              {"burn_in_fraction", burn_in_fraction}};
}

void ExperimentConfig::validate() const {
  require(!gammas.empty() && !deltas.empty(), ErrorKind::InvalidArgument,
          "gamma and delta grids must be nonempty");
  for (double g : gammas) {
    require(g > 0.0 && g < 1.0, ErrorKind::InvalidArgument, "gamma must lie in (0, 1)");
  }
  for (double d : deltas) require(d >= 0.0, ErrorKind::InvalidArgument, "delta must be >= 0");
  require(epsilon >= 0.0, ErrorKind::InvalidArgument, "epsilon must be >= 0");
  require(steps >= 1, ErrorKind::InvalidArgument, "steps must be >= 1");
  require(seed_count >= 1 || !seeds.empty(), ErrorKind::InvalidArgument,
          "need at least one seed");
  require(checkpoint_count >= 2, ErrorKind::InvalidArgument, "checkpoint_count must be >= 2");
  require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must lie in (0, 1)");
  require(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0, ErrorKind::InvalidArgument,
          "burn_in_fraction must lie in [0, 1)");
  require(vi_tol > 0.0 && vi_max_iter >= 1, ErrorKind::InvalidArgument,
          "value iteration needs tol > 0 and max_iter >= 1");
  if (kind == Kind::Convergence || kind == Kind::Clt) schedule.validate();
  if (kind == Kind::Clt) {
    require(coordinates.size() == 2, ErrorKind::InvalidArgument,
            "the CLT experiment needs exactly two coordinates");
  }
  if (mdp_path) {
    for (const Coordinate& c : coordinates) {
      require(!c.level, ErrorKind::InvalidArgument,
              "inventory-level coordinates need the builtin inventory model");
    }
  }
  const std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  require(distinct.size() == seeds.size(), ErrorKind::InvalidArgument, "seeds must be distinct");
}

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out(static_cast<std::size_t>(seed_count));
  std::iota(out.begin(), out.end(), root_seed);
  return out;
}

Mdp ExperimentConfig::load_mdp(double gamma) const {
  if (mdp_path) return drmdp::load_mdp(*mdp_path).with_gamma(gamma);
  inventory::InventoryParams params = inventory;
  params.gamma = gamma;
  return inventory::build_inventory_mdp(params);
}

Index ExperimentConfig::resolve(const Coordinate& c, const Mdp& mdp) const {
  const Index state = c.level ? inventory.state_index(*c.level) : c.state;
  require(state >= 0 && state < mdp.n_states() && c.action >= 0 && c.action < mdp.n_actions(),
          ErrorKind::InvalidArgument, "coordinate " + label(c) + " is outside the model");
  return mdp.index(state, c.action);
}

std::string ExperimentConfig::label(const Coordinate& c) const {
  const long state = c.level ? *c.level : static_cast<long>(c.state);
  return "(" + std::to_string(state) + "," + std::to_string(c.action) + ")";
}

std::vector<std::string> config_warnings(const ExperimentConfig& cfg) {
  std::vector<std::string> notes;
  const bool mvsa_kind = cfg.kind == Kind::Convergence || cfg.kind == Kind::Clt;
  for (double gamma : cfg.gammas) {
    // MVSA and Q* experiments use the first grid point only.
    const std::vector<double> deltas =
        cfg.kind == Kind::ApproxError ? cfg.deltas : std::vector<double>{cfg.deltas.front()};
    std::vector<double> uncertified;
    for (double delta : deltas) {
      const double lip = AmbiguityConfig<double>{delta, cfg.epsilon}.lipschitz(gamma);
      if (lip >= 1.0) uncertified.push_back(delta);
    }
    if (!uncertified.empty() && !mvsa_kind) {
      notes.push_back("gamma=" + format_number(gamma) + ": L >= 1 at " +
                      std::to_string(uncertified.size()) + " of " +
                      std::to_string(deltas.size()) + " delta values (smallest " +
                      format_number(uncertified.front()) +
                      "); those fixed points are computed without a contraction certificate");
    }
    if (mvsa_kind) {
      const double lip = AmbiguityConfig<double>{cfg.deltas.front(), cfg.epsilon}.lipschitz(gamma);
      for (const std::string& w : cfg.schedule.theory_warnings(lip)) notes.push_back(w);
      break;
    }
    if (cfg.kind == Kind::QstarTable) break;
  }
  return notes;
}

// ---------------------------------------------------------------------------
// Computations

std::vector<ApproxErrorRow> approx_error(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ApproxErrorRow> rows;
  for (double gamma : cfg.gammas) {
    const Mdp mdp = cfg.load_mdp(gamma);
    for (double delta : cfg.deltas) {
      const AmbiguityConfig<double> amb{delta, cfg.epsilon};
      const auto exact = solve_exact(mdp, delta, cfg.vi_tol, cfg.vi_max_iter);
      const auto approx = solve_approx(mdp, amb, cfg.vi_tol, cfg.vi_max_iter);
      rows.push_back({gamma, delta, inf_norm_diff(approx.solution, exact.solution),
                      amb.lipschitz(gamma), approx.certified,
                      exact.converged && approx.converged,
                      gamma * delta * span(approx.solution) / (1.0 - gamma)});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ApproxErrorRow& a, const ApproxErrorRow& b) {
    return std::pair(a.gamma, a.delta) < std::pair(b.gamma, b.delta);
  });
  return rows;
}

namespace {

QFunction<double> stabilized_fixed_point(const ExperimentConfig& cfg, const Mdp& mdp) {
  const auto report =
      solve_approx(mdp, AmbiguityConfig<double>{cfg.deltas.front(), cfg.epsilon}, cfg.vi_tol,
                   cfg.vi_max_iter);
  require(report.converged, ErrorKind::Unstable,
          "value iteration for the stabilized operator did not converge (residual " +
              format_number(report.residual) + ")");
  return report.solution;
}

}  // namespace

ConvergenceResult convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const Mdp mdp = cfg.load_mdp(cfg.gammas.front());
  const AmbiguityConfig<double> amb{cfg.deltas.front(), cfg.epsilon};
  const QFunction<double> u_ref = stabilized_fixed_point(cfg, mdp);

  ConvergenceResult out;
  out.grid = mvsa::log_grid(cfg.steps, cfg.checkpoint_count);
  out.runs = mvsa::batch_runs(mdp, amb, cfg.schedule, cfg.steps, cfg.run_seeds(), u_ref,
                              out.grid, cfg.threads);
  out.burn_in = static_cast<long>(std::ceil(cfg.burn_in_fraction * static_cast<double>(cfg.steps)));

  std::vector<double> fit_n, fit_err;
  for (std::size_t k = 0; k < out.grid.size(); ++k) {
    std::vector<double> errors;
    errors.reserve(out.runs.size());
    for (const auto& run : out.runs) errors.push_back(run.checkpoints[k].error);
    const double mean =
        std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
    out.mean_error.push_back(mean);
    out.q01.push_back(quantile(errors, 0.01));
    out.q99.push_back(quantile(errors, 0.99));
    if (out.grid[k] >= out.burn_in) {
      fit_n.push_back(static_cast<double>(out.grid[k]));
      fit_err.push_back(mean);
    }
  }
  out.slope = loglog_slope(fit_n, fit_err);
  return out;
}

CltResult clt_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Mdp mdp = cfg.load_mdp(cfg.gammas.front());
  const AmbiguityConfig<double> amb{cfg.deltas.front(), cfg.epsilon};
  const QFunction<double> u_star = stabilized_fixed_point(cfg, mdp);

  CltResult out;
  out.artifacts = clt::clt_artifacts(mdp, u_star, amb, cfg.schedule, cfg.tie_tol);
  for (const Coordinate& c : cfg.coordinates) {
    out.coordinates.push_back(cfg.resolve(c, mdp));
    out.labels.push_back(cfg.label(c));
  }
  out.runs = mvsa::batch_runs(mdp, amb, cfg.schedule, cfg.steps, cfg.run_seeds(), u_star, {},
                              cfg.threads);
  out.scaled = clt::scaled_slow_errors(out.runs, u_star, cfg.schedule.a, out.coordinates);
  out.scaled_fast =
      clt::scaled_fast_errors(out.runs, out.artifacts.moments.m_star, cfg.schedule, out.coordinates);

  const Index z1 = out.coordinates[0];
  const Index z2 = out.coordinates[1];
  Matrix<double> sigma2(2, 2);
  sigma2 << out.artifacts.Sigma_U(z1, z1), out.artifacts.Sigma_U(z1, z2),
      out.artifacts.Sigma_U(z2, z1), out.artifacts.Sigma_U(z2, z2);
  out.threshold = clt::chi2_2dof_quantile(cfg.level);
  out.coverage = clt::ellipse_coverage(out.scaled, sigma2, cfg.level);
  out.sample_mean = out.scaled.colwise().mean().transpose();
  if (out.runs.size() >= 2) {
    out.sample_variance = clt::column_variance(out.scaled);
    out.fast_sample_variance = clt::column_variance(out.scaled_fast);
  }
  out.theory_variance = sigma2.diagonal();
  out.fast_theory_variance.resize(2);
  out.fast_theory_variance << out.artifacts.Sigma_fast(z1, z1), out.artifacts.Sigma_fast(z2, z2);
  return out;
}

QstarResult qstar_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const Mdp mdp = cfg.load_mdp(cfg.gammas.front());
  auto report = solve_approx(mdp, AmbiguityConfig<double>{cfg.deltas.front(), cfg.epsilon},
                             cfg.vi_tol, cfg.vi_max_iter);
  require(report.converged, ErrorKind::Unstable, "value iteration did not converge");
  QstarResult out{mdp, report.solution, greedy(mdp, report.solution, cfg.tie_tol),
                  v_max(mdp, report.solution), report, {}};
  for (Index s = 0; s < mdp.n_states(); ++s) {
    out.state_labels.push_back(cfg.mdp_path ? static_cast<int>(s) : cfg.inventory.level(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_header(const ExperimentConfig& cfg, const std::string& scaling,
                       const std::vector<std::string>& extra = {}) {
  std::ostringstream out;
  out << "# generator: " << version_string() << "\n";
  out << "# experiment: " << to_string(cfg.kind) << "\n";
  out << "# config: " << cfg.to_json().dump() << "\n";
  out << "# scaling: " << scaling << "\n";
  for (const std::string& w : config_warnings(cfg)) out << "# warning: " << w << "\n";
  for (const std::string& line : extra) out << "# " << line << "\n";
  return out.str();
}

Json metadata(const ExperimentConfig& cfg, const std::string& scaling) {
  return Json{{"generator", version_string()},
              {"experiment", to_string(cfg.kind)},
              {"config", cfg.to_json()},
              {"scaling", scaling},
              {"warnings", config_warnings(cfg)}};
}

fs::path prepare(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  require(!ec && fs::is_directory(out), ErrorKind::Io,
          "cannot create output directory " + out.string());
  return out;
}

const char* kSlowScaling = "sqrt(n/a) * (U_n(z) - U*_eps(z)), n = number of MVSA updates";

}  // namespace

std::vector<fs::path> run_approx_error(const ExperimentConfig& cfg, const fs::path& out) {
  const auto rows = approx_error(cfg);
  prepare(out);
  std::ostringstream csv;
  csv << csv_header(cfg, "error = ||U* - Q*||_inf; bound = gamma*delta*span(U*)/(1-gamma)");
  csv << "gamma,delta,error,L,certified,converged,bound\n";
  for (const auto& r : rows) {
    csv << format_number(r.gamma) << ',' << format_number(r.delta) << ','
        << format_number(r.error) << ',' << format_number(r.lipschitz) << ','
        << (r.certified ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ','
        << format_number(r.bound) << '\n';
  }
  const fs::path path = out / "approx_error.csv";
  write_text(path, csv.str());
  return {path};
}

std::vector<fs::path> run_convergence(const ExperimentConfig& cfg, const fs::path& out) {
  const ConvergenceResult res = convergence(cfg);
  prepare(out);
  const std::string scaling = "error = ||U_n - U*_eps||_inf after n MVSA updates";
  const std::vector<std::string> extra{"slope: " + format_number(res.slope),
                                       "burn_in: " + std::to_string(res.burn_in)};

  std::ostringstream runs;
  runs << csv_header(cfg, scaling, extra) << "seed,n,error\n";
  std::vector<const mvsa::RunRecord*> ordered;
  for (const auto& r : res.runs) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->seed < b->seed; });
  for (const auto* r : ordered) {
    for (const auto& c : r->checkpoints) {
      runs << r->seed << ',' << c.n << ',' << format_number(c.error) << '\n';
    }
  }

  std::ostringstream agg;
  agg << csv_header(cfg, scaling, extra) << "n,mean_error,q01,q99\n";
  for (std::size_t k = 0; k < res.grid.size(); ++k) {
    agg << res.grid[k] << ',' << format_number(res.mean_error[k]) << ','
        << format_number(res.q01[k]) << ',' << format_number(res.q99[k]) << '\n';
  }

  Json summary = metadata(cfg, scaling);
  summary["slope"] = res.slope;
  summary["burn_in"] = res.burn_in;
  summary["runs"] = res.runs.size();
  summary["steps"] = cfg.steps;

  const fs::path p_runs = out / "convergence_runs.csv";
  const fs::path p_agg = out / "convergence.csv";
  const fs::path p_sum = out / "convergence_summary.json";
  write_text(p_runs, runs.str());
  write_text(p_agg, agg.str());
  write_text(p_sum, summary.dump(2) + "\n");
  return {p_runs, p_agg, p_sum};
}

std::vector<fs::path> run_clt(const ExperimentConfig& cfg, const fs::path& out) {
  const CltResult res = clt_experiment(cfg);
  prepare(out);

  std::ostringstream scatter;
  scatter << csv_header(cfg, kSlowScaling) << "seed,z_label,scaled_error\n";
  std::vector<Index> order(res.runs.size());
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return res.runs[a].seed < res.runs[b].seed; });
  for (Index i : order) {
    for (std::size_t j = 0; j < res.labels.size(); ++j) {
      scatter << res.runs[static_cast<std::size_t>(i)].seed << ",\"" << res.labels[j] << "\","
              << format_number(res.scaled(i, static_cast<Index>(j))) << '\n';
    }
  }

  Json artifacts = metadata(cfg, kSlowScaling);
  artifacts["artifacts"] = artifacts_to_json(res.artifacts);
  artifacts["coordinates"] = Json::array();
  for (std::size_t j = 0; j < res.labels.size(); ++j) {
    artifacts["coordinates"].push_back(Json{{"label", res.labels[j]}, {"z", res.coordinates[j]}});
  }

  Json summary = metadata(cfg, kSlowScaling);
  summary["level"] = cfg.level;
  summary["threshold"] = res.threshold;
  summary["coverage"] = res.coverage;
  summary["runs"] = res.runs.size();
  summary["labels"] = res.labels;
  summary["sigma2"] = Json::array();
  for (Index r = 0; r < 2; ++r) {
    Json row = Json::array();
    for (Index c = 0; c < 2; ++c) {
      row.push_back(res.artifacts.Sigma_U(res.coordinates[static_cast<std::size_t>(r)],
                                          res.coordinates[static_cast<std::size_t>(c)]));
    }
    summary["sigma2"].push_back(row);
  }
  summary["sample_mean"] = vector_to_json(res.sample_mean);
  summary["sample_variance"] = vector_to_json(res.sample_variance);
  summary["theory_variance"] = vector_to_json(res.theory_variance);
  if (res.sample_variance.size() == 2) {
    // 3 standard errors of the sample mean, for judging how centered the scatter is.
    summary["centering_bound"] = vector_to_json(
        (3.0 * res.sample_variance.array().sqrt() / std::sqrt(static_cast<double>(res.runs.size())))
            .matrix());
  }
  summary["fast_scaling"] = "n^(tau/2) * (m_n(z) - m*(z)) / sqrt(b)";
  summary["fast_sample_variance"] = vector_to_json(res.fast_sample_variance);
  summary["fast_theory_variance"] = vector_to_json(res.fast_theory_variance);

  const fs::path p_scatter = out / "clt_scatter.csv";
  const fs::path p_art = out / "clt_artifacts.json";
  const fs::path p_sum = out / "clt_summary.json";
  write_text(p_scatter, scatter.str());
  write_text(p_art, artifacts.dump() + "\n");
  write_text(p_sum, summary.dump(2) + "\n");
  return {p_scatter, p_art, p_sum};
}

std::vector<fs::path> run_qstar_table(const ExperimentConfig& cfg, const fs::path& out) {
  const QstarResult res = qstar_table(cfg);
  prepare(out);
  const std::string scaling = "U*_eps(s,a) from value iteration; v*(s) = max_a U*_eps(s,a)";
  const Index n_actions = res.mdp.n_actions();

  std::ostringstream table;
  table << csv_header(cfg, scaling) << "state,level,action,value\n";
  for (Index s = 0; s < res.mdp.n_states(); ++s) {
    for (Index a = 0; a < n_actions; ++a) {
      table << s << ',' << res.state_labels[static_cast<std::size_t>(s)] << ',' << a << ','
            << format_number(res.u_star(res.mdp.index(s, a))) << '\n';
    }
  }
  std::ostringstream policy;
  policy << csv_header(cfg, scaling) << "state,level,greedy_action,v_star,gap\n";
  for (Index s = 0; s < res.mdp.n_states(); ++s) {
    policy << s << ',' << res.state_labels[static_cast<std::size_t>(s)] << ','
           << res.policy.action[static_cast<std::size_t>(s)] << ','
           << format_number(res.v_star(s)) << ',' << format_number(res.policy.gap(s)) << '\n';
  }
  const fs::path p_table = out / "qstar.csv";
  const fs::path p_policy = out / "qstar_policy.csv";
  write_text(p_table, table.str());
  write_text(p_policy, policy.str());
  return {p_table, p_policy};
}

std::vector<fs::path> run(const ExperimentConfig& cfg, const fs::path& out) {
  switch (cfg.kind) {
    case Kind::ApproxError: return run_approx_error(cfg, out);
    case Kind::Convergence: return run_convergence(cfg, out);
    case Kind::Clt: return run_clt(cfg, out);
    case Kind::QstarTable: return run_qstar_table(cfg, out);
  }
  return {};
}

}  // namespace drmdp::experiments
