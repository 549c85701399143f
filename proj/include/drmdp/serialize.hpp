#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "drmdp/clt.hpp"
#include "drmdp/fixed_point.hpp"
#include "drmdp/inventory.hpp"
#include "drmdp/mdp.hpp"
#include "drmdp/mvsa.hpp"

namespace drmdp {

using Json = nlohmann::json;

/// Version string written into every result file.
std::string version_string();

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

Json vector_to_json(const Vector<double>& v);
Vector<double> vector_from_json(const Json& j);
/// Nested row-major array.
Json matrix_to_json(const Matrix<double>& m);
Matrix<double> matrix_from_json(const Json& j);

/// {n_states, n_actions, gamma, reward[d], kernel[d][n_states]}, rows in z = s*n_actions + a order.
Json mdp_to_json(const Mdp& mdp);
Mdp mdp_from_json(const Json& j);
Mdp load_mdp(const std::filesystem::path& path);
void save_mdp(const Mdp& mdp, const std::filesystem::path& path);

Json params_to_json(const inventory::InventoryParams& params);
inventory::InventoryParams params_from_json(const Json& j);

Json report_to_json(const FixedPointReport<double>& report);
Json run_record_to_json(const mvsa::RunRecord& record);
Json artifacts_to_json(const clt::CltArtifacts& artifacts);

void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

}  // namespace drmdp
