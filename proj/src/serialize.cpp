#include "drmdp/serialize.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "drmdp/error.hpp"

#ifndef DRMDP_VERSION_STRING
#define DRMDP_VERSION_STRING "drmdp (unversioned)"
#endif

namespace drmdp {

std::string version_string() { return DRMDP_VERSION_STRING; }

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  require(ec == std::errc(), ErrorKind::Io, "number formatting failed");
  return std::string(buf.data(), end);
}

Json vector_to_json(const Vector<double>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector<double> vector_from_json(const Json& j) {
  require(j.is_array(), ErrorKind::InvalidArgument, "expected a JSON array");
  Vector<double> v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

Json matrix_to_json(const Matrix<double>& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Matrix<double> matrix_from_json(const Json& j) {
  require(j.is_array(), ErrorKind::InvalidArgument, "expected a nested JSON array");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows == 0 ? Index(0) : static_cast<Index>(j[0].size());
  Matrix<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<Index>(row.size()) == cols, ErrorKind::ShapeMismatch,
            "ragged matrix row " + std::to_string(r));
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json mdp_to_json(const Mdp& mdp) {
  return Json{{"n_states", mdp.n_states()},
              {"n_actions", mdp.n_actions()},
              {"gamma", mdp.gamma()},
              {"reward", vector_to_json(mdp.reward())},
              {"kernel", matrix_to_json(mdp.kernel())}};
}

Mdp mdp_from_json(const Json& j) {
  try {
    return Mdp(j.at("n_states").get<Index>(), j.at("n_actions").get<Index>(),
               matrix_from_json(j.at("kernel")), vector_from_json(j.at("reward")),
               j.at("gamma").get<double>());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed MDP document: ") + e.what());
  }
}

Mdp load_mdp(const std::filesystem::path& path) { return mdp_from_json(read_json(path)); }

void save_mdp(const Mdp& mdp, const std::filesystem::path& path) {
  write_text(path, mdp_to_json(mdp).dump(2) + "\n");
}

Json params_to_json(const inventory::InventoryParams& p) {
  return Json{{"capacity", p.capacity},
              {"max_backlog", p.max_backlog},
              {"max_order", p.max_order},
              {"price", p.price},
              {"order_cost", p.order_cost},
              {"holding_cost", p.holding_cost},
              {"backlog_penalty", p.backlog_penalty},
              {"demand_pmf", p.demand_pmf},
              {"gamma", p.gamma}};
}

inventory::InventoryParams params_from_json(const Json& j) {
  inventory::InventoryParams p;
  try {
    p.capacity = j.value("capacity", p.capacity);
    p.max_backlog = j.value("max_backlog", p.max_backlog);
    p.max_order = j.value("max_order", p.max_order);
    p.price = j.value("price", p.price);
    p.order_cost = j.value("order_cost", p.order_cost);
    p.holding_cost = j.value("holding_cost", p.holding_cost);
    p.backlog_penalty = j.value("backlog_penalty", p.backlog_penalty);
    p.demand_pmf = j.value("demand_pmf", p.demand_pmf);
    p.gamma = j.value("gamma", p.gamma);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed inventory params: ") + e.what());
  }
  p.validate();
  return p;
}

Json report_to_json(const FixedPointReport<double>& report) {
  return Json{{"solution", vector_to_json(report.solution)},
              {"iterations", report.iterations},
              {"residual", report.residual},
              {"contraction_modulus", report.contraction_modulus},
              {"converged", report.converged},
              {"certified", report.certified}};
}

Json run_record_to_json(const mvsa::RunRecord& record) {
  Json checkpoints = Json::array();
  for (const auto& c : record.checkpoints) checkpoints.push_back(Json{{"n", c.n}, {"error", c.error}});
  return Json{{"seed", record.seed},
              {"elapsed_steps", record.elapsed_steps},
              {"checkpoints", checkpoints},
              {"final_state",
               {{"U", vector_to_json(record.final_state.u)},
                {"m", vector_to_json(record.final_state.m)},
                {"g", vector_to_json(record.final_state.g)},
                {"n", record.final_state.n}}}};
}

Json artifacts_to_json(const clt::CltArtifacts& a) {
  Json greedy_actions = Json::array();
  for (Index act : a.greedy_map.action) greedy_actions.push_back(act);
  return Json{{"H", matrix_to_json(a.H)},
              {"Gamma_U", matrix_to_json(a.Gamma_U)},
              {"Sigma_U", matrix_to_json(a.Sigma_U)},
              {"Sigma_fast", matrix_to_json(a.Sigma_fast)},
              {"moments",
               {{"V", vector_to_json(a.moments.V)},
                {"C", vector_to_json(a.moments.C)},
                {"W", vector_to_json(a.moments.W)},
                {"m_star", vector_to_json(a.moments.m_star)},
                {"g_star", vector_to_json(a.moments.g_star)},
                {"sigma_star", vector_to_json(a.moments.sigma_star)}}},
              {"greedy_action", greedy_actions},
              {"greedy_gap", vector_to_json(a.greedy_map.gap)},
              {"a_step", a.a_step},
              {"spectral_abscissa_H", a.spectral_abscissa_H},
              {"lyapunov_residual", a.lyapunov_residual},
              {"sigma_u_min_eigenvalue", a.sigma_u_min_eigenvalue}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write to " + path.string() + " failed");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
  }
}

}  // namespace drmdp
