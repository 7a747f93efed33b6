#include "elastntd/stability.hpp"

#include <cmath>
#include <stdexcept>

#include "elastntd/rng.hpp"

namespace elastntd {

void AdmissibleSample::validate() const {
    if (kind == Kind::Density) {
        if (!(0.0 < a && a <= b)) throw std::invalid_argument("AdmissibleSample: bad density box");
        if (rho.size() < 1) throw std::invalid_argument("AdmissibleSample: empty density");
        for (Eigen::Index j = 0; j < rho.size(); ++j)
            if (!(a <= rho[j] && rho[j] <= b))
                throw std::invalid_argument("AdmissibleSample: density outside its box");
        return;
    }
    triple.validate();
    if (lambda.size() != mu.size() || mu.size() != rho.size() || rho.size() < 1)
        throw std::invalid_argument("AdmissibleSample: inconsistent triple sizes");
    for (Eigen::Index j = 0; j < rho.size(); ++j) {
        bool in_box = triple.lambda_min <= lambda[j] && lambda[j] <= triple.lambda_max &&
                      triple.mu_min <= mu[j] && mu[j] <= triple.mu_max &&
                      triple.rho_min <= rho[j] && rho[j] <= triple.rho_max;
        if (!in_box) throw std::invalid_argument("AdmissibleSample: triple outside its boxes");
        if (!(mu[j] > 0.0 && lambda[j] + 2.0 * mu[j] > 0.0))
            throw std::invalid_argument("AdmissibleSample: coercivity incompatible");
    }
}

MaterialField AdmissibleSample::materialize(const Mesh& mesh, const Partition& part, double lam,
                                            double mu_bg) const {
    validate();
    if (kind == Kind::Density) {
        Eigen::VectorXd lam_s = Eigen::VectorXd::Constant(rho.size(), lam);
        Eigen::VectorXd mu_s = Eigen::VectorXd::Constant(rho.size(), mu_bg);
        MaterialBounds mb;
        mb.rho_min = a;
        mb.rho_max = b;
        return MaterialField::per_subdomain(mesh, part, lam_s, mu_s, rho, mb);
    }
    MaterialBounds mb;
    mb.delta0 = triple.mu_min;
    mb.M0 = 2.0 * std::max({triple.lambda_max, triple.mu_max, triple.rho_max});
    return MaterialField::per_subdomain(mesh, part, lambda, mu, rho, mb);
}

AdmissibleSample sample_admissible_density(int n_subdomains, double a, double b,
                                           std::uint64_t seed, std::uint64_t stream,
                                           std::uint64_t index0) {
    AdmissibleSample s;
    s.kind = AdmissibleSample::Kind::Density;
    s.a = a;
    s.b = b;
    s.rho = sample_density(n_subdomains, a, b, seed, stream, index0);
    s.validate();
    return s;
}

double alpha_constant(const ProbingLoadSet& set, const BoundaryLoadBasis& basis) {
    if (set.n_subdomains < 1 || set.k_levels < 1)
        throw std::invalid_argument("alpha_constant: empty probing-load set");
    double max_norm2 = 0.0;
    for (int j = 1; j <= set.n_subdomains; ++j) {
        for (int k = 1; k <= set.k_levels; ++k) {
            const ProbingLoad* pl = set.find(j, k);
            if (!pl)
                throw std::invalid_argument("alpha_constant: missing probing load (" +
                                            std::to_string(j) + "," + std::to_string(k) + ")");
            if (!pl->normalized || std::abs(pl->certificate - 1.0) > 1e-6)
                throw std::invalid_argument("alpha_constant: probing load not normalized");
            max_norm2 = std::max(max_norm2, basis.inner(pl->g, pl->g));
        }
    }
    if (!(max_norm2 > 0.0)) throw std::invalid_argument("alpha_constant: degenerate load norms");
    return 1.0 / max_norm2;
}

Eigen::VectorXd expand_subdomain_values(const Mesh& mesh, const Partition& part,
                                        const Eigen::VectorXd& per_subdomain) {
    if (per_subdomain.size() != part.count)
        throw std::invalid_argument("expand_subdomain_values: value count must equal N");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        int label = part.element_label.at(e);
        if (label != kOutsideSupport) out[e] = per_subdomain[label - 1];
    }
    return out;
}

Eigen::VectorXd sample_density(int n_subdomains, double a, double b, std::uint64_t seed,
                               std::uint64_t stream, std::uint64_t index0) {
    if (!(0.0 < a && a <= b)) throw std::invalid_argument("sample_density: need 0 < a <= b");
    Eigen::VectorXd rho(n_subdomains);
    for (int j = 0; j < n_subdomains; ++j)
        rho[j] = uniform(seed, stream, index0 + static_cast<std::uint64_t>(j), a, b);
    return rho;
}

Eigen::VectorXd sample_unit_sphere_K(const Partition& part, std::uint64_t seed,
                                     std::uint64_t index) {
    Eigen::VectorXd zeta(part.count);
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt > 64)
            throw std::runtime_error("sample_unit_sphere_K: degenerate draws, redraws exhausted");
        for (int j = 0; j < part.count; ++j)
            zeta[j] = uniform(seed, index, attempt * static_cast<std::uint64_t>(part.count) + j,
                              -1.0, 1.0);
        double m = zeta.cwiseAbs().maxCoeff();
        if (m > 0.0) return zeta / m;
    }
}

namespace {

LipschitzReport finish_report(LipschitzReport report) {
    report.min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& row : report.rows) report.min_ratio = std::min(report.min_ratio, row.ratio);
    if (report.rows.empty()) report.min_ratio = 0.0;
    if (report.alpha > 0.0)
        report.pass = report.min_ratio >= report.alpha * (1.0 - 1e-6);
    else
        report.pass = report.min_ratio > 0.0;
    return report;
}

}  // namespace

LipschitzReport lipschitz_sweep_density(const Mesh& mesh, const Partition& part, double lam,
                                        double mu, double a, double b, int n_pairs,
                                        std::uint64_t seed, double alpha,
                                        const BoundaryLoadBasis& basis) {
    if (n_pairs < 1) throw std::invalid_argument("lipschitz_sweep_density: n_pairs must be >= 1");
    if (!(0.0 < a && a < b)) throw std::invalid_argument("lipschitz_sweep_density: need 0 < a < b");

    LipschitzReport report;
    report.seed = seed;
    report.alpha = alpha;
    report.mode = "density";

    const auto n = static_cast<std::uint64_t>(part.count);
    for (int pair = 0; pair < n_pairs; ++pair) {
        AdmissibleSample s1, s2;
        double dist = 0.0;
        for (std::uint64_t attempt = 0; dist == 0.0; ++attempt) {
            if (attempt > 64)
                throw std::runtime_error("lipschitz_sweep_density: degenerate box, redraws exhausted");
            std::uint64_t base = attempt * 2 * n;
            s1 = sample_admissible_density(part.count, a, b, seed, pair, base);
            s2 = sample_admissible_density(part.count, a, b, seed, pair, base + n);
            dist = (s1.rho - s2.rho).cwiseAbs().maxCoeff();
        }

        NtDMatrix l1 = assemble_ntd(mesh, s1.materialize(mesh, part, lam, mu), basis);
        NtDMatrix l2 = assemble_ntd(mesh, s2.materialize(mesh, part, lam, mu), basis);
        double ntd_dist = ntd_operator_norm(l1.matrix - l2.matrix, basis);

        report.rows.push_back({pair, dist, ntd_dist, ntd_dist / dist});
    }
    return finish_report(std::move(report));
}

void TripleBounds::validate() const {
    if (!(0.0 < lambda_min && lambda_min <= lambda_max) || !(0.0 < mu_min && mu_min <= mu_max) ||
        !(0.0 < rho_min && rho_min <= rho_max))
        throw std::invalid_argument("TripleBounds: boxes must satisfy 0 < min <= max");
}

double triple_delta_norm(const Eigen::VectorXd& dl, const Eigen::VectorXd& dm,
                         const Eigen::VectorXd& dr) {
    return std::max({dl.cwiseAbs().maxCoeff(), dm.cwiseAbs().maxCoeff(), dr.cwiseAbs().maxCoeff()});
}

LipschitzReport lipschitz_sweep_simultaneous(const Mesh& mesh, const Partition& part,
                                             const TripleBounds& bounds, Definiteness direction,
                                             int n_pairs, std::uint64_t seed,
                                             const BoundaryLoadBasis& basis) {
    if (n_pairs < 1)
        throw std::invalid_argument("lipschitz_sweep_simultaneous: n_pairs must be >= 1");
    bounds.validate();

    LipschitzReport report;
    report.seed = seed;
    report.alpha = 0.0;
    report.mode = "simultaneous";

    const auto n = static_cast<std::uint64_t>(part.count);
    for (int pair = 0; pair < n_pairs; ++pair) {
        Eigen::VectorXd lo[3], hi[3];
        const double box[3][2] = {{bounds.lambda_min, bounds.lambda_max},
                                  {bounds.mu_min, bounds.mu_max},
                                  {bounds.rho_min, bounds.rho_max}};
        bool degenerate = true;
        for (std::uint64_t attempt = 0; degenerate; ++attempt) {
            if (attempt > 64)
                throw std::runtime_error(
                    "lipschitz_sweep_simultaneous: degenerate box, redraws exhausted");
            std::uint64_t base = attempt * 6 * n;
            for (int c = 0; c < 3; ++c) {
                lo[c].resize(part.count);
                hi[c].resize(part.count);
                for (int j = 0; j < part.count; ++j) {
                    double u = uniform(seed, static_cast<std::uint64_t>(pair),
                                       base + (2 * c) * n + j, box[c][0], box[c][1]);
                    double v = uniform(seed, static_cast<std::uint64_t>(pair),
                                       base + (2 * c + 1) * n + j, box[c][0], box[c][1]);
                    lo[c][j] = std::min(u, v);
                    hi[c][j] = std::max(u, v);
                }
            }
            degenerate = triple_delta_norm(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]) == 0.0;
        }

        bool increasing = direction == Definiteness::Increasing;
        AdmissibleSample t1, t2;
        t1.kind = t2.kind = AdmissibleSample::Kind::Triple;
        t1.triple = t2.triple = bounds;
        t1.lambda = increasing ? lo[0] : hi[0];
        t1.mu = increasing ? lo[1] : hi[1];
        t1.rho = increasing ? lo[2] : hi[2];
        t2.lambda = increasing ? hi[0] : lo[0];
        t2.mu = increasing ? hi[1] : lo[1];
        t2.rho = increasing ? hi[2] : lo[2];

        double dist = triple_delta_norm(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
        NtDMatrix l1 = assemble_ntd(mesh, t1.materialize(mesh, part, 0.0, 0.0), basis);
        NtDMatrix l2 = assemble_ntd(mesh, t2.materialize(mesh, part, 0.0, 0.0), basis);
        double ntd_dist = ntd_operator_norm(l1.matrix - l2.matrix, basis);

        report.rows.push_back({pair, dist, ntd_dist, ntd_dist / dist});
    }
    return finish_report(std::move(report));
}

LipschitzReport mixed_control_sweep(const Mesh& mesh, const Partition& part,
                                    const TripleBounds& bounds, int n_pairs, std::uint64_t seed,
                                    const BoundaryLoadBasis& basis) {
    if (n_pairs < 1) throw std::invalid_argument("mixed_control_sweep: n_pairs must be >= 1");
    bounds.validate();

    LipschitzReport report;
    report.seed = seed;
    report.alpha = 0.0;
    report.mode = "mixed-control";

    MaterialBounds mb;
    mb.delta0 = bounds.mu_min;
    mb.M0 = 2.0 * std::max({bounds.lambda_max, bounds.mu_max, bounds.rho_max});

    const auto n = static_cast<std::uint64_t>(part.count);
    const double box[3][2] = {{bounds.lambda_min, bounds.lambda_max},
                              {bounds.mu_min, bounds.mu_max},
                              {bounds.rho_min, bounds.rho_max}};
    for (int pair = 0; pair < n_pairs; ++pair) {
        Eigen::VectorXd v1[3], v2[3];
        double dist = 0.0;
        for (std::uint64_t attempt = 0; dist == 0.0; ++attempt) {
            if (attempt > 64)
                throw std::runtime_error("mixed_control_sweep: degenerate box, redraws exhausted");
            std::uint64_t base = attempt * 6 * n;
            for (int c = 0; c < 3; ++c) {
                v1[c].resize(part.count);
                v2[c].resize(part.count);
                for (int j = 0; j < part.count; ++j) {
                    v1[c][j] = uniform(seed, static_cast<std::uint64_t>(pair),
                                       base + (2 * c) * n + j, box[c][0], box[c][1]);
                    v2[c][j] = uniform(seed, static_cast<std::uint64_t>(pair),
                                       base + (2 * c + 1) * n + j, box[c][0], box[c][1]);
                }
            }
            dist = triple_delta_norm(v1[0] - v2[0], v1[1] - v2[1], v1[2] - v2[2]);
        }
        MaterialField m1 = MaterialField::per_subdomain(mesh, part, v1[0], v1[1], v1[2], mb);
        MaterialField m2 = MaterialField::per_subdomain(mesh, part, v2[0], v2[1], v2[2], mb);
        NtDMatrix l1 = assemble_ntd(mesh, m1, basis);
        NtDMatrix l2 = assemble_ntd(mesh, m2, basis);
        double ntd_dist = ntd_operator_norm(l1.matrix - l2.matrix, basis);
        report.rows.push_back({pair, dist, ntd_dist, ntd_dist / dist});
    }
    report.min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& row : report.rows) report.min_ratio = std::min(report.min_ratio, row.ratio);
    report.pass = true;  // documentation only
    return report;
}

}  // namespace elastntd
