#include "elastntd/config.hpp"

#include <fstream>

#include "elastntd/io.hpp"

namespace elastntd {

void ExperimentConfig::validate() const {
    if (nx < 2 || ny < 2) throw ConfigError("config: nx and ny must be >= 2");
    if (px < 1 || py < 1 || nx % px != 0 || ny % py != 0)
        throw ConfigError("config: px, py must divide nx, ny");
    if (!(0.0 < a && a < b)) throw ConfigError("config: density box needs 0 < a < b");
    if (!(mu_bg > 0.0) || !(lambda_bg > 0.0) || !(rho_bg > 0.0) ||
        !(lambda_bg + 2.0 * mu_bg > 0.0))
        throw ConfigError("config: background coefficients must satisfy the coercivity bounds");
    try {
        triple.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (direction != "increasing" && direction != "decreasing")
        throw ConfigError("config: direction must be increasing|decreasing");
    if (sweep_mode != "density" && sweep_mode != "simultaneous")
        throw ConfigError("config: sweep_mode must be density|simultaneous");
    if (n_pairs < 1) throw ConfigError("config: n_pairs must be >= 1");
    if (n_loads < 1) throw ConfigError("config: n_loads must be >= 1");
    if (cgne_max_iter < 1) throw ConfigError("config: cgne_max_iter must be >= 1");
    if (locpot_levels < 2) throw ConfigError("config: locpot_levels must be >= 2");
    if (!(rayleigh_eps > 0.0)) throw ConfigError("config: rayleigh_eps must be > 0");
    const int n_cells = nx * ny;
    for (int c : d1_cells)
        if (c < 0 || c >= n_cells) throw ConfigError("config: d1 cell index out of range");
    for (int c : d2_cells)
        if (c < 0 || c >= n_cells) throw ConfigError("config: d2 cell index out of range");
}

std::vector<int> default_corner_cells(int nx, int ny, bool upper_right) {
    int side = std::max(1, std::min(nx, ny) / 4);
    std::vector<int> cells;
    for (int iy = 0; iy < side; ++iy)
        for (int ix = 0; ix < side; ++ix) {
            int cx = upper_right ? nx - 1 - ix : ix;
            int cy = upper_right ? ny - 1 - iy : iy;
            cells.push_back(cy * nx + cx);
        }
    std::sort(cells.begin(), cells.end());
    return cells;
}

std::vector<int> ExperimentConfig::d1_elements(const Mesh& mesh) const {
    return elements_of_cells(mesh, d1_cells.empty() ? default_corner_cells(nx, ny, true) : d1_cells);
}

std::vector<int> ExperimentConfig::d2_elements(const Mesh& mesh) const {
    return elements_of_cells(mesh, d2_cells.empty() ? default_corner_cells(nx, ny, false) : d2_cells);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["mesh"] = {{"nx", cfg.nx}, {"ny", cfg.ny}, {"dirichlet_side", side_name(cfg.dirichlet_side)}};
    j["partition"] = {{"px", cfg.px}, {"py", cfg.py}};
    j["material"] = {{"a", cfg.a},
                     {"b", cfg.b},
                     {"lambda", cfg.lambda_bg},
                     {"mu", cfg.mu_bg},
                     {"rho", cfg.rho_bg},
                     {"triple",
                      {{"lambda", {cfg.triple.lambda_min, cfg.triple.lambda_max}},
                       {"mu", {cfg.triple.mu_min, cfg.triple.mu_max}},
                       {"rho", {cfg.triple.rho_min, cfg.triple.rho_max}}}},
                     {"direction", cfg.direction}};
    j["sweep"] = {{"n_pairs", cfg.n_pairs},
                  {"seed", cfg.seed},
                  {"mode", cfg.sweep_mode},
                  {"n_loads", cfg.n_loads}};
    j["cgne"] = {{"max_iter", cfg.cgne_max_iter}};
    j["probe"] = {{"d1_cells", cfg.d1_cells},
                  {"d2_cells", cfg.d2_cells},
                  {"levels", cfg.locpot_levels},
                  {"rayleigh_eps", cfg.rayleigh_eps}};
    j["forward_load"] = cfg.forward_load;
    j["output_dir"] = cfg.output_dir;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        const auto& m = j.at("mesh");
        cfg.nx = m.at("nx").get<int>();
        cfg.ny = m.at("ny").get<int>();
        cfg.dirichlet_side = side_from_name(m.value("dirichlet_side", "bottom"));
        const auto& p = j.at("partition");
        cfg.px = p.at("px").get<int>();
        cfg.py = p.at("py").get<int>();
        const auto& mat = j.at("material");
        cfg.a = mat.at("a").get<double>();
        cfg.b = mat.at("b").get<double>();
        cfg.lambda_bg = mat.value("lambda", 1.0);
        cfg.mu_bg = mat.value("mu", 1.0);
        cfg.rho_bg = mat.value("rho", 1.0);
        if (mat.contains("triple")) {
            const auto& t = mat.at("triple");
            cfg.triple.lambda_min = t.at("lambda").at(0).get<double>();
            cfg.triple.lambda_max = t.at("lambda").at(1).get<double>();
            cfg.triple.mu_min = t.at("mu").at(0).get<double>();
            cfg.triple.mu_max = t.at("mu").at(1).get<double>();
            cfg.triple.rho_min = t.at("rho").at(0).get<double>();
            cfg.triple.rho_max = t.at("rho").at(1).get<double>();
        }
        cfg.direction = mat.value("direction", "increasing");
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            cfg.n_pairs = s.value("n_pairs", cfg.n_pairs);
            cfg.seed = s.value("seed", cfg.seed);
            cfg.sweep_mode = s.value("mode", cfg.sweep_mode);
            cfg.n_loads = s.value("n_loads", cfg.n_loads);
        }
        if (j.contains("cgne")) cfg.cgne_max_iter = j.at("cgne").value("max_iter", cfg.cgne_max_iter);
        if (j.contains("probe")) {
            const auto& pr = j.at("probe");
            cfg.d1_cells = pr.value("d1_cells", cfg.d1_cells);
            cfg.d2_cells = pr.value("d2_cells", cfg.d2_cells);
            cfg.locpot_levels = pr.value("levels", cfg.locpot_levels);
            cfg.rayleigh_eps = pr.value("rayleigh_eps", cfg.rayleigh_eps);
        }
        cfg.forward_load = j.value("forward_load", cfg.forward_load);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
    return hex16(fnv1a64(config_to_json(cfg).dump()));
}

}  // namespace elastntd
