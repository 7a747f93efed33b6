#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include "elastntd/config.hpp"
#include "elastntd/io.hpp"
#include "elastntd/monotonicity.hpp"
#include "elastntd/rng.hpp"
#include "elastntd/stability.hpp"

namespace fs = std::filesystem;
using namespace elastntd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct Workspace {
    ExperimentConfig cfg;
    Mesh mesh;
    Partition part;
    BoundaryLoadBasis basis;
    MaterialField background;
    fs::path run_dir;

    explicit Workspace(const ExperimentConfig& config)
        : cfg(config),
          mesh(build_rect_mesh(config.nx, config.ny, config.dirichlet_side)),
          part(grid_partition(mesh, config.px, config.py)),
          basis(mesh),
          background(MaterialField::uniform(mesh, config.lambda_bg, config.mu_bg, config.rho_bg)) {
        mesh.element_subdomain = part.element_label;
        run_dir = fs::path(cfg.output_dir) / config_hash(cfg);
        fs::create_directories(run_dir);
    }

    void write(const std::string& name, const std::string& body) const {
        write_file((run_dir / name).string(), body);
    }

    void write_summary(nlohmann::json j) const {
        j["config_hash"] = config_hash(cfg);
        j["seed"] = cfg.seed;
        j["generated_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count();
        write_file((run_dir / "summary.json").string(), j.dump(2) + "\n");
    }
};

Load named_load(const Workspace& ws) {
    const std::string& name = ws.cfg.forward_load;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ws.basis.size());
    if (name == "zero") return Load{c};
    if (name == "corner") {
        // both components at the Neumann node nearest the top-right corner
        int best_node = -1;
        double best_score = -1e300;
        for (const auto& e : ws.basis.entries()) {
            double score = ws.mesh.nodes[e.node].sum();
            if (score > best_score + 1e-14) {
                best_score = score;
                best_node = e.node;
            }
        }
        for (int comp = 0; comp < 2; ++comp) c[ws.basis.index_of_dof(2 * best_node + comp)] = 1.0;
        return Load{c};
    }
    if (name.rfind("basis:", 0) == 0) {
        int idx = std::stoi(name.substr(6));
        if (idx < 0 || idx >= ws.basis.size())
            throw ConfigError("forward_load basis index out of range");
        c[idx] = 1.0;
        return Load{c};
    }
    throw ConfigError("forward_load must be zero|corner|basis:<index>");
}

int cmd_forward(const Workspace& ws) {
    StiffnessSystem sys(ws.mesh, ws.background);
    Load g = named_load(ws);
    Displacement u = solve_forward(sys, ws.basis, g);
    ws.write("displacement.csv", displacement_csv(u));
    ws.write("mesh.json", mesh_to_json(ws.mesh).dump(2) + "\n");
    nlohmann::json j;
    j["command"] = "forward";
    j["load"] = ws.cfg.forward_load;
    j["max_displacement"] = u.values.cwiseAbs().maxCoeff();
    ws.write_summary(j);
    return kExitOk;
}

int cmd_mono(const Workspace& ws) {
    const auto& cfg = ws.cfg;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(ws.part.count);
    std::vector<SandwichCsvRow> rho_rows, full_rows;
    bool all_pass = true;

    for (int pair = 0; pair < cfg.n_pairs; ++pair) {
        Eigen::VectorXd r1 = sample_density(ws.part.count, cfg.a, cfg.b, cfg.seed, pair, 0);
        Eigen::VectorXd r2 = sample_density(ws.part.count, cfg.a, cfg.b, cfg.seed, pair,
                                            static_cast<std::uint64_t>(ws.part.count));
        MaterialField m1 = MaterialField::per_subdomain(ws.mesh, ws.part, cfg.lambda_bg * ones,
                                                        cfg.mu_bg * ones, r1);
        MaterialField m2 = MaterialField::per_subdomain(ws.mesh, ws.part, cfg.lambda_bg * ones,
                                                        cfg.mu_bg * ones, r2);

        auto triple = [&](std::uint64_t salt) {
            auto draw = [&](double lo, double hi, std::uint64_t slot) {
                Eigen::VectorXd v(ws.part.count);
                for (int j = 0; j < ws.part.count; ++j)
                    v[j] = uniform(cfg.seed ^ salt, pair, slot * ws.part.count + j, lo, hi);
                return v;
            };
            return MaterialField::per_subdomain(
                ws.mesh, ws.part, draw(cfg.triple.lambda_min, cfg.triple.lambda_max, 0),
                draw(cfg.triple.mu_min, cfg.triple.mu_max, 1),
                draw(cfg.triple.rho_min, cfg.triple.rho_max, 2));
        };
        MaterialField t1 = triple(0x5157ULL), t2 = triple(0xA15AULL);

        for (int l = 0; l < cfg.n_loads; ++l) {
            Eigen::VectorXd gc(ws.basis.size());
            for (int i = 0; i < ws.basis.size(); ++i)
                gc[i] = uniform(cfg.seed, 1000 + pair,
                                static_cast<std::uint64_t>(l) * ws.basis.size() + i, -1.0, 1.0);
            Load g{gc};
            SandwichCsvRow row;
            row.pair_id = pair;
            row.load_id = l;
            row.report = sandwich_rho(ws.mesh, m1, m2, ws.basis, g);
            all_pass = all_pass && row.report.pass();
            rho_rows.push_back(row);

            SandwichCsvRow frow;
            frow.pair_id = pair;
            frow.load_id = l;
            frow.report = sandwich_full(ws.mesh, t1, t2, ws.basis, g);
            all_pass = all_pass && frow.report.pass();
            full_rows.push_back(frow);
        }
    }
    ws.write("mono_rho.csv", sandwich_csv(rho_rows));
    ws.write("mono_full.csv", sandwich_csv(full_rows));
    nlohmann::json j;
    j["command"] = "mono";
    j["rows"] = rho_rows.size() + full_rows.size();
    j["pass"] = all_pass;
    ws.write_summary(j);
    if (!all_pass) {
        std::cerr << "mono: at least one comparison row failed\n";
        return kExitAssertion;
    }
    return kExitOk;
}

ProbingLoadSet construct_or_resume(const Workspace& ws) {
    const fs::path path = ws.run_dir / "probing_loads.json";
    ProbingLoadSet set;
    set.a = ws.cfg.a;
    set.b = ws.cfg.b;
    set.n_subdomains = ws.part.count;
    set.k_levels = contrast_levels(ws.cfg.a, ws.cfg.b);
    if (fs::exists(path)) {
        ProbingLoadSet existing =
            probing_set_from_json(nlohmann::json::parse(read_file(path.string())), ws.mesh);
        if (existing.a == set.a && existing.b == set.b) set.loads = std::move(existing.loads);
    }
    for (int j = 1; j <= set.n_subdomains; ++j) {
        for (int k = 1; k <= set.k_levels; ++k) {
            if (set.find(j, k)) continue;  // resume: keep finished entries
            set.loads.push_back(construct_probing_load(ws.mesh, ws.part, j, k, ws.cfg.a, ws.cfg.b,
                                                       ws.background, ws.basis,
                                                       ws.cfg.cgne_max_iter));
        }
    }
    std::sort(set.loads.begin(), set.loads.end(), [](const ProbingLoad& x, const ProbingLoad& y) {
        return x.j != y.j ? x.j < y.j : x.k < y.k;
    });
    write_file(path.string(), probing_set_to_json(set, ws.mesh).dump(2) + "\n");
    return set;
}

int cmd_construct(const Workspace& ws) {
    ProbingLoadSet set = construct_or_resume(ws);
    double alpha = alpha_constant(set, ws.basis);
    int max_iters = 0;
    for (const auto& pl : set.loads) max_iters = std::max(max_iters, pl.cgne_iterations);
    nlohmann::json j;
    j["command"] = "construct";
    j["alpha"] = alpha;
    j["n_loads"] = set.loads.size();
    j["max_cgne_iterations"] = max_iters;
    ws.write_summary(j);
    std::cout << "alpha = " << format_double(alpha) << "\n";
    return kExitOk;
}

int cmd_sweep(const Workspace& ws) {
    const auto& cfg = ws.cfg;
    LipschitzReport report;
    if (cfg.sweep_mode == "density") {
        ProbingLoadSet set = construct_or_resume(ws);
        double alpha = alpha_constant(set, ws.basis);
        report = lipschitz_sweep_density(ws.mesh, ws.part, cfg.lambda_bg, cfg.mu_bg, cfg.a, cfg.b,
                                         cfg.n_pairs, cfg.seed, alpha, ws.basis);
        ws.write("sweep_density.csv", lipschitz_csv(report));
    } else {
        Definiteness dir =
            cfg.direction == "increasing" ? Definiteness::Increasing : Definiteness::Decreasing;
        report = lipschitz_sweep_simultaneous(ws.mesh, ws.part, cfg.triple, dir, cfg.n_pairs,
                                              cfg.seed, ws.basis);
        ws.write("sweep_simultaneous.csv", lipschitz_csv(report));
        // mixed-sign negative control, for documentation only
        LipschitzReport control =
            mixed_control_sweep(ws.mesh, ws.part, cfg.triple, cfg.n_pairs, cfg.seed, ws.basis);
        ws.write("sweep_mixed_control.csv", lipschitz_csv(control));
    }
    nlohmann::json j = lipschitz_summary(report);
    j["command"] = "sweep";
    ws.write_summary(j);
    std::cout << "min ratio = " << format_double(report.min_ratio) << "\n";
    if (!report.pass) {
        std::cerr << "sweep: ratio bound violated\n";
        return kExitAssertion;
    }
    return kExitOk;
}

int cmd_locpot(const Workspace& ws) {
    auto d1 = ws.cfg.d1_elements(ws.mesh);
    auto d2 = ws.cfg.d2_elements(ws.mesh);
    auto levels = localized_sequence(ws.mesh, ws.background, d1, d2, ws.cfg.locpot_levels);
    ws.write("locpot_levels.csv", locpot_csv(levels));

    StiffnessSystem sys(ws.mesh, ws.background);
    std::string ray = "epsilon,div_ratio\n";
    double final_ratio = 0.0;
    for (double eps : {100.0 * ws.cfg.rayleigh_eps, ws.cfg.rayleigh_eps}) {
        Load g = div_localized_load(ws.mesh, ws.background, ws.basis, d1, d2, eps);
        Displacement u = solve_forward(sys, ws.basis, g);
        final_ratio = energy_densities(ws.mesh, u, d1).div_energy /
                      energy_densities(ws.mesh, u, d2).div_energy;
        ray += format_double(eps) + "," + format_double(final_ratio) + "\n";
    }
    ws.write("locpot_rayleigh.csv", ray);

    bool nondecreasing = true;
    for (size_t i = 1; i < levels.size(); ++i) {
        if (levels[i].perfect || levels[i - 1].perfect) continue;
        double r0 = levels[i - 1].d1_energy / levels[i - 1].d2_energy;
        double r1 = levels[i].d1_energy / levels[i].d2_energy;
        nondecreasing = nondecreasing && r1 >= r0 * (1.0 - 1e-9);
    }
    nlohmann::json j;
    j["command"] = "locpot";
    j["levels"] = levels.size();
    j["final_div_ratio"] = final_ratio;
    j["ratio_nondecreasing"] = nondecreasing;
    ws.write_summary(j);
    if (!nondecreasing) {
        std::cerr << "locpot: level ratios decreased\n";
        return kExitAssertion;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward elasticity with a restoration force: boundary-operator "
                 "monotonicity, probing loads and stability sweeps"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    std::optional<std::string> mode_override;

    for (const char* name : {"forward", "mono", "construct", "sweep", "locpot"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--out", out_override, "override the output directory");
        if (std::string(name) == "sweep") sub->add_option("--mode", mode_override, "density|simultaneous");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (out_override) cfg.output_dir = *out_override;
        if (mode_override) cfg.sweep_mode = *mode_override;
        cfg.validate();
        Workspace ws(cfg);

        if (app.got_subcommand("forward")) return cmd_forward(ws);
        if (app.got_subcommand("mono")) return cmd_mono(ws);
        if (app.got_subcommand("construct")) return cmd_construct(ws);
        if (app.got_subcommand("sweep")) return cmd_sweep(ws);
        if (app.got_subcommand("locpot")) return cmd_locpot(ws);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ProbeRegionError& e) {
        const char* name = e.code() == ProbeRegionErrorCode::Overlap ? "overlap"
                           : e.code() == ProbeRegionErrorCode::DisconnectedComplement
                               ? "disconnected-complement"
                               : "no-neumann-access";
        std::cerr << "probe region error (" << name << "): " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssertion;
    }
}
