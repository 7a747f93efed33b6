#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "elastntd/mesh.hpp"
#include "elastntd/stability.hpp"

namespace elastntd {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One experiment: mesh/partition geometry, material boxes, sweep and
/// iteration controls, probe regions and output location. Round-trips through
/// JSON losslessly.
struct ExperimentConfig {
    // mesh
    int nx = 4, ny = 4;
    Side dirichlet_side = Side::Bottom;
    // partition
    int px = 2, py = 2;
    // density box and background coefficients
    double a = 1.0, b = 2.0;
    double lambda_bg = 1.0, mu_bg = 1.0, rho_bg = 1.0;
    // simultaneous-sweep boxes
    TripleBounds triple;
    std::string direction = "increasing";  // or "decreasing"
    // sweep controls
    int n_pairs = 50;
    std::uint64_t seed = 7349ULL;
    std::string sweep_mode = "density";  // or "simultaneous"
    int n_loads = 10;                    // loads per pair in the comparison suites
    // probing-load iteration cap
    int cgne_max_iter = 500;
    // probe regions as grid-cell indices; empty selects opposite corner blocks
    std::vector<int> d1_cells, d2_cells;
    int locpot_levels = 3;
    double rayleigh_eps = 1e-4;
    // forward command: "zero", "corner" or "basis:<index>"
    std::string forward_load = "corner";
    std::string output_dir = "runs";

    void validate() const;  // throws ConfigError

    std::vector<int> d1_elements(const Mesh& mesh) const;
    std::vector<int> d2_elements(const Mesh& mesh) const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Hash of the canonical JSON dump; names the run directory.
std::string config_hash(const ExperimentConfig& cfg);

/// Default probe blocks: square corner blocks of side max(1, min(nx,ny)/4),
/// upper-right for d1 and lower-left for d2.
std::vector<int> default_corner_cells(int nx, int ny, bool upper_right);

}  // namespace elastntd
