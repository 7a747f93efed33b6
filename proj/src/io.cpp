#include "elastntd/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elastntd {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string side_name(Side s) {
    switch (s) {
        case Side::Bottom: return "bottom";
        case Side::Right: return "right";
        case Side::Top: return "top";
        case Side::Left: return "left";
    }
    throw std::invalid_argument("side_name: unknown side");
}

Side side_from_name(const std::string& name) {
    if (name == "bottom") return Side::Bottom;
    if (name == "right") return Side::Right;
    if (name == "top") return Side::Top;
    if (name == "left") return Side::Left;
    throw std::invalid_argument("side_from_name: expected bottom|right|top|left, got " + name);
}

nlohmann::json mesh_to_json(const Mesh& mesh) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& p : mesh.nodes) j["nodes"].push_back({p.x(), p.y()});
    j["elements"] = nlohmann::json::array();
    for (const auto& t : mesh.elements) j["elements"].push_back({t[0], t[1], t[2]});
    j["boundary"] = nlohmann::json::array();
    for (const auto& be : mesh.boundary_edges)
        j["boundary"].push_back(
            {be.a, be.b, be.tag == BoundaryTag::Neumann ? "neumann" : "dirichlet", be.element});
    j["subdomain"] = mesh.element_subdomain;
    j["nx"] = mesh.nx;
    j["ny"] = mesh.ny;
    j["dirichlet_side"] = side_name(mesh.dirichlet_side);
    return j;
}

Mesh mesh_from_json(const nlohmann::json& j) {
    Mesh mesh;
    for (const auto& row : j.at("nodes"))
        mesh.nodes.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    for (const auto& row : j.at("elements"))
        mesh.elements.push_back({row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>()});
    for (const auto& row : j.at("boundary")) {
        BoundaryEdge be;
        be.a = row.at(0).get<int>();
        be.b = row.at(1).get<int>();
        be.tag = row.at(2).get<std::string>() == "neumann" ? BoundaryTag::Neumann
                                                           : BoundaryTag::Dirichlet;
        be.element = row.at(3).get<int>();
        mesh.boundary_edges.push_back(be);
    }
    mesh.element_subdomain = j.at("subdomain").get<std::vector<int>>();
    mesh.nx = j.at("nx").get<int>();
    mesh.ny = j.at("ny").get<int>();
    mesh.dirichlet_side = side_from_name(j.at("dirichlet_side").get<std::string>());
    mesh.check_invariants();
    return mesh;
}

std::string mesh_hash(const Mesh& mesh) { return hex16(fnv1a64(mesh_to_json(mesh).dump())); }

std::string material_hash(const MaterialField& mat) {
    std::string blob;
    auto append = [&blob](const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            blob += format_double(v[i]);
            blob += ',';
        }
        blob += ';';
    };
    append(mat.lambda);
    append(mat.mu);
    append(mat.rho);
    return hex16(fnv1a64(blob));
}

std::string displacement_csv(const Displacement& u) {
    std::string out = "node,ux,uy\n";
    for (Eigen::Index n = 0; 2 * n < u.values.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += format_double(u.values[2 * n]);
        out += ',';
        out += format_double(u.values[2 * n + 1]);
        out += '\n';
    }
    return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

nlohmann::json ntd_sidecar(const NtDMatrix& ntd, const Mesh& mesh, const MaterialField& mat,
                           const BoundaryLoadBasis& basis) {
    nlohmann::json j;
    j["mesh_hash"] = mesh_hash(mesh);
    j["material_hash"] = material_hash(mat);
    j["asymmetry"] = ntd.asymmetry;
    j["basis"] = nlohmann::json::array();
    for (const auto& e : basis.entries()) j["basis"].push_back({e.node, e.comp});
    return j;
}

nlohmann::json probing_set_to_json(const ProbingLoadSet& set, const Mesh& mesh) {
    nlohmann::json j;
    j["a"] = set.a;
    j["b"] = set.b;
    j["n_subdomains"] = set.n_subdomains;
    j["k_levels"] = set.k_levels;
    j["mesh_hash"] = mesh_hash(mesh);
    j["loads"] = nlohmann::json::array();
    for (const auto& pl : set.loads) {
        nlohmann::json e;
        e["j"] = pl.j;
        e["k"] = pl.k;
        e["certificate"] = pl.certificate;
        e["iterations"] = pl.cgne_iterations;
        e["normalized"] = pl.normalized;
        e["norm2"] = pl.norm2;
        e["coeff"] = std::vector<double>(pl.g.coeff.data(), pl.g.coeff.data() + pl.g.coeff.size());
        j["loads"].push_back(std::move(e));
    }
    return j;
}

ProbingLoadSet probing_set_from_json(const nlohmann::json& j, const Mesh& mesh) {
    if (j.at("mesh_hash").get<std::string>() != mesh_hash(mesh))
        throw std::invalid_argument("probing_set_from_json: mesh hash mismatch");
    ProbingLoadSet set;
    set.a = j.at("a").get<double>();
    set.b = j.at("b").get<double>();
    set.n_subdomains = j.at("n_subdomains").get<int>();
    set.k_levels = j.at("k_levels").get<int>();
    for (const auto& e : j.at("loads")) {
        ProbingLoad pl;
        pl.j = e.at("j").get<int>();
        pl.k = e.at("k").get<int>();
        pl.certificate = e.at("certificate").get<double>();
        pl.cgne_iterations = e.at("iterations").get<int>();
        pl.normalized = e.at("normalized").get<bool>();
        pl.norm2 = e.at("norm2").get<double>();
        auto c = e.at("coeff").get<std::vector<double>>();
        pl.g.coeff = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
        set.loads.push_back(std::move(pl));
    }
    return set;
}

std::string sandwich_csv(const std::vector<SandwichCsvRow>& rows) {
    std::string out = "pair,load,middle,upper,lower,slack_upper,slack_lower,pass\n";
    for (const auto& r : rows) {
        out += std::to_string(r.pair_id);
        out += ',';
        out += std::to_string(r.load_id);
        out += ',';
        out += format_double(r.report.middle);
        out += ',';
        out += format_double(r.report.upper_bound);
        out += ',';
        out += format_double(r.report.lower_bound);
        out += ',';
        out += format_double(r.report.slack_upper);
        out += ',';
        out += format_double(r.report.slack_lower);
        out += ',';
        out += r.report.pass() ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string lipschitz_csv(const LipschitzReport& report) {
    std::string out = "pair,coeff_dist,ntd_dist,ratio\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.pair_id);
        out += ',';
        out += format_double(r.coeff_dist);
        out += ',';
        out += format_double(r.ntd_dist);
        out += ',';
        out += format_double(r.ratio);
        out += '\n';
    }
    return out;
}

nlohmann::json lipschitz_summary(const LipschitzReport& report) {
    nlohmann::json j;
    j["mode"] = report.mode;
    j["seed"] = report.seed;
    j["n_pairs"] = report.rows.size();
    j["min_ratio"] = report.min_ratio;
    j["alpha"] = report.alpha;
    j["empirical_constant_estimate"] = report.min_ratio > 0.0 ? 1.0 / report.min_ratio : 0.0;
    j["pass"] = report.pass;
    return j;
}

std::string locpot_csv(const std::vector<LocalizationLevel>& levels) {
    std::string out = "level,n_loads,d1_energy,d2_energy,ratio,d2_unscaled,residual,perfect\n";
    for (size_t i = 0; i < levels.size(); ++i) {
        const auto& lv = levels[i];
        double ratio = lv.d2_energy > 0.0 ? lv.d1_energy / lv.d2_energy
                                          : std::numeric_limits<double>::infinity();
        out += std::to_string(i);
        out += ',';
        out += std::to_string(lv.n_loads);
        out += ',';
        out += format_double(lv.d1_energy);
        out += ',';
        out += format_double(lv.d2_energy);
        out += ',';
        out += format_double(ratio);
        out += ',';
        out += format_double(lv.d2_energy_unscaled);
        out += ',';
        out += format_double(lv.runge_residual);
        out += ',';
        out += lv.perfect ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_file: cannot open " + path);
    f << body;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace elastntd
