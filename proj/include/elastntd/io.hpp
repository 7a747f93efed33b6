#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "elastntd/localization.hpp"
#include "elastntd/monotonicity.hpp"
#include "elastntd/ntd.hpp"
#include "elastntd/stability.hpp"

namespace elastntd {

std::uint64_t fnv1a64(std::string_view s);
std::string hex16(std::uint64_t v);

/// Shortest round-trip decimal representation; used everywhere a number lands
/// in a CSV body so re-runs are byte-identical.
std::string format_double(double v);

std::string side_name(Side s);
Side side_from_name(const std::string& name);

// mesh format: {"nodes": [[x,y],...], "elements": [[i,j,k],...],
//               "boundary": [[i,j,"neumann"|"dirichlet"],...],
//               "subdomain": [l,...], "nx": _, "ny": _, "dirichlet_side": _}
nlohmann::json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const nlohmann::json& j);

std::string mesh_hash(const Mesh& mesh);
std::string material_hash(const MaterialField& mat);

/// "node,ux,uy" rows.
std::string displacement_csv(const Displacement& u);

/// Square matrix as bare CSV rows.
std::string matrix_csv(const Eigen::MatrixXd& m);

/// Provenance sidecar for an exported operator matrix.
nlohmann::json ntd_sidecar(const NtDMatrix& ntd, const Mesh& mesh, const MaterialField& mat,
                           const BoundaryLoadBasis& basis);

nlohmann::json probing_set_to_json(const ProbingLoadSet& set, const Mesh& mesh);
ProbingLoadSet probing_set_from_json(const nlohmann::json& j, const Mesh& mesh);

struct SandwichCsvRow {
    int pair_id = 0;
    int load_id = 0;
    SandwichReport report;
};

/// "pair,load,middle,upper,lower,slack_upper,slack_lower,pass" rows.
std::string sandwich_csv(const std::vector<SandwichCsvRow>& rows);

/// "pair,coeff_dist,ntd_dist,ratio" rows.
std::string lipschitz_csv(const LipschitzReport& report);
nlohmann::json lipschitz_summary(const LipschitzReport& report);

/// "level,n_loads,d1_energy,d2_energy,ratio,d2_unscaled,residual,perfect" rows.
std::string locpot_csv(const std::vector<LocalizationLevel>& levels);

void write_file(const std::string& path, const std::string& body);
std::string read_file(const std::string& path);

}  // namespace elastntd
