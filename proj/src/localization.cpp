#include "elastntd/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "elastntd/rng.hpp"

namespace elastntd {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

RegionField restrict_to_region(const Mesh& mesh, const Displacement& u,
                               const std::vector<int>& region) {
    RegionField f;
    f.elements = sorted_unique(region);
    f.scalar = false;
    f.values.resize(6 * f.elements.size());
    for (size_t i = 0; i < f.elements.size(); ++i) {
        const auto& t = mesh.elements.at(f.elements[i]);
        for (int l = 0; l < 3; ++l)
            for (int c = 0; c < 2; ++c) f.values[6 * i + 2 * l + c] = u.values[2 * t[l] + c];
    }
    return f;
}

RegionField restrict_div_to_region(const Mesh& mesh, const Displacement& u,
                                   const std::vector<int>& region) {
    RegionField f;
    f.elements = sorted_unique(region);
    f.scalar = true;
    f.values.resize(f.elements.size());
    for (size_t i = 0; i < f.elements.size(); ++i) {
        int e = f.elements[i];
        ElementGeometry g = element_geometry(mesh, e);
        const auto& t = mesh.elements[e];
        double div = 0.0;
        for (int l = 0; l < 3; ++l)
            for (int c = 0; c < 2; ++c) div += u.values[2 * t[l] + c] * g.grad[l][c];
        f.values[i] = div;
    }
    return f;
}

VirtualMeasurementOp::VirtualMeasurementOp(VmKind kind, const Mesh& mesh, const MaterialField& mat,
                                           std::vector<int> region, const BoundaryLoadBasis& basis)
    : kind_(kind),
      mesh_(mesh),
      region_(sorted_unique(std::move(region))),
      basis_(basis),
      sys_(mesh, mat) {
    if (region_.empty()) throw std::invalid_argument("VirtualMeasurementOp: empty region");
    for (int e : region_) (void)mesh_.elements.at(e);
}

Load VirtualMeasurementOp::apply(const RegionField& f) const {
    f.check();
    if (f.elements != region_)
        throw std::invalid_argument("VirtualMeasurementOp::apply: field region mismatch");
    if (f.scalar != (kind_ == VmKind::TDiv))
        throw std::invalid_argument("VirtualMeasurementOp::apply: field kind mismatch");

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * mesh_.n_nodes());
    for (size_t i = 0; i < region_.size(); ++i) {
        int e = region_[i];
        ElementGeometry g = element_geometry(mesh_, e);
        const auto& t = mesh_.elements[e];
        if (kind_ == VmKind::TDiv) {
            // source paired with the divergence of the test function
            Eigen::Matrix<double, 6, 1> d = element_div_vector(g);
            double F = f.values[i];
            for (int l = 0; l < 6; ++l) rhs[2 * t[l / 2] + l % 2] += F * g.area * d[l];
        } else {
            Eigen::Matrix<double, 6, 1> floc = f.values.segment<6>(6 * i);
            Eigen::Matrix<double, 6, 1> w = element_mass(g, 1.0) * floc;
            for (int l = 0; l < 6; ++l) rhs[2 * t[l / 2] + l % 2] += w[l];
        }
    }
    Displacement v = sys_.solve(rhs);
    return Load{boundary_trace(basis_, v.values)};
}

RegionField VirtualMeasurementOp::adjoint(const Load& g) const {
    return adjoint_with_solution(g, nullptr);
}

RegionField VirtualMeasurementOp::adjoint_with_solution(const Load& g, Displacement* u_out) const {
    Displacement u = solve_forward(sys_, basis_, g);
    RegionField f = kind_ == VmKind::TDiv ? restrict_div_to_region(mesh_, u, region_)
                                          : restrict_to_region(mesh_, u, region_);
    if (u_out) *u_out = std::move(u);
    return f;
}

double VirtualMeasurementOp::region_inner(const RegionField& f, const RegionField& h) const {
    f.check();
    h.check();
    if (f.elements != region_ || h.elements != region_ || f.scalar != h.scalar)
        throw std::invalid_argument("VirtualMeasurementOp::region_inner: field mismatch");
    double s = 0.0;
    for (size_t i = 0; i < region_.size(); ++i) {
        ElementGeometry g = element_geometry(mesh_, region_[i]);
        if (f.scalar) {
            s += g.area * f.values[i] * h.values[i];
        } else {
            Eigen::Matrix<double, 6, 1> a = f.values.segment<6>(6 * i);
            Eigen::Matrix<double, 6, 1> b = h.values.segment<6>(6 * i);
            s += a.dot(element_mass(g, 1.0) * b);
        }
    }
    return s;
}

double VirtualMeasurementOp::region_norm(const RegionField& f) const {
    return std::sqrt(std::max(0.0, region_inner(f, f)));
}

RegionField VirtualMeasurementOp::zero_field() const {
    RegionField f;
    f.elements = region_;
    f.scalar = (kind_ == VmKind::TDiv);
    f.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(region_.size()) * f.stride());
    return f;
}

RegionField VirtualMeasurementOp::random_field(std::uint64_t seed, std::uint64_t index) const {
    RegionField f = zero_field();
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
        f.values[i] = uniform(seed, index, static_cast<std::uint64_t>(i), -1.0, 1.0);
    return f;
}

RungeResult runge_approximate(const Mesh& mesh, const MaterialField& mat, const RegionField& target,
                              const BoundaryLoadBasis& basis, const std::vector<int>& columns) {
    target.check();
    if (target.scalar) throw std::invalid_argument("runge_approximate: target must be a vector field");
    VirtualMeasurementOp op(VmKind::RungeA, mesh, mat, target.elements, basis);

    std::vector<int> cols = columns;
    if (cols.empty()) {
        cols.resize(basis.size());
        for (int q = 0; q < basis.size(); ++q) cols[q] = q;
    } else {
        cols = sorted_unique(cols);
        if (cols.front() < 0 || cols.back() >= basis.size())
            throw std::invalid_argument("runge_approximate: column index out of range");
    }

    const int n = static_cast<int>(cols.size());
    const Eigen::Index dim = target.values.size();
    Eigen::MatrixXd restriction(dim, n);
    for (int q = 0; q < n; ++q) {
        Load g{Eigen::VectorXd::Unit(basis.size(), cols[q])};
        restriction.col(q) = op.adjoint(g).values;
    }

    // block-diagonal region mass matrix
    Eigen::MatrixXd weighted(dim, n);
    for (size_t i = 0; i < op.region().size(); ++i) {
        ElementGeometry g = element_geometry(mesh, op.region()[i]);
        weighted.middleRows<6>(6 * i) = element_mass(g, 1.0) * restriction.middleRows<6>(6 * i);
    }

    Eigen::MatrixXd normal = restriction.transpose() * weighted;
    Eigen::VectorXd rhs = weighted.transpose() * target.values;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (normal + normal.transpose()));
    double lam_max = es.eigenvalues().maxCoeff();
    if (!(lam_max > 0.0))
        throw std::runtime_error("runge_approximate: normal equations are singular");
    double cutoff = 1e-12 * lam_max;
    Eigen::VectorXd g_sub = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd proj = es.eigenvectors().transpose() * rhs;
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()[i] > cutoff)
            g_sub += (proj[i] / es.eigenvalues()[i]) * es.eigenvectors().col(i);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(basis.size());
    for (int q = 0; q < n; ++q) g[cols[q]] = g_sub[q];

    RegionField fit = op.zero_field();
    fit.values = restriction * g_sub;
    RegionField diff = fit;
    diff.values -= target.values;
    return RungeResult{Load{g}, op.region_norm(diff)};
}

std::vector<int> boundary_subset(const Mesh& mesh, const BoundaryLoadBasis& basis, int stride) {
    if (stride < 1) throw std::invalid_argument("boundary_subset: stride must be >= 1");
    // perimeter coordinate of a unit-square boundary node
    auto perimeter_t = [](const Eigen::Vector2d& p) {
        if (p.y() == 0.0) return p.x();
        if (p.x() == 1.0) return 1.0 + p.y();
        if (p.y() == 1.0) return 2.0 + (1.0 - p.x());
        return 3.0 + (1.0 - p.y());
    };
    std::vector<int> nodes;
    for (const auto& e : basis.entries())
        if (e.comp == 0) nodes.push_back(e.node);
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
        return perimeter_t(mesh.nodes[a]) < perimeter_t(mesh.nodes[b]);
    });

    std::vector<int> cols;
    for (size_t i = 0; i < nodes.size(); i += stride) {
        for (int c = 0; c < 2; ++c) cols.push_back(basis.index_of_dof(2 * nodes[i] + c));
    }
    std::sort(cols.begin(), cols.end());
    return cols;
}

std::vector<RegionEdge> region_boundary_edges(const Mesh& mesh, const std::vector<int>& region) {
    std::vector<int> reg = sorted_unique(region);
    std::vector<char> in(mesh.n_elements(), 0);
    for (int e : reg) in.at(e) = 1;
    auto nbr = element_neighbors(mesh);

    std::vector<RegionEdge> edges;
    for (int e : reg) {
        const auto& t = mesh.elements[e];
        for (int k = 0; k < 3; ++k) {
            int other = nbr[e][k];
            if (other >= 0 && in[other]) continue;
            RegionEdge re;
            re.n0 = t[k];
            re.n1 = t[(k + 1) % 3];
            Eigen::Vector2d d = mesh.nodes[re.n1] - mesh.nodes[re.n0];
            re.length = d.norm();
            re.outward_normal = Eigen::Vector2d(d.y(), -d.x()) / re.length;
            edges.push_back(re);
        }
    }
    return edges;
}

RegionField local_solution_phi(const Mesh& mesh, const MaterialField& mat,
                               const std::vector<int>& d1, const std::vector<int>& d2,
                               const std::vector<Eigen::Vector2d>& edge_load) {
    std::vector<int> r1 = sorted_unique(d1), r2 = sorted_unique(d2);
    if (r1.empty()) throw std::invalid_argument("local_solution_phi: d1 must be non-empty");
    for (int e : r1)
        if (std::binary_search(r2.begin(), r2.end(), e))
            throw std::invalid_argument("local_solution_phi: d1 and d2 share an element");

    auto edges = region_boundary_edges(mesh, r1);
    std::vector<Eigen::Vector2d> loads;
    if (edge_load.empty()) {
        loads.reserve(edges.size());
        for (const auto& re : edges) loads.push_back(re.outward_normal);
    } else {
        if (edge_load.size() != edges.size())
            throw std::invalid_argument("local_solution_phi: one traction per boundary edge expected");
        loads = edge_load;
    }
    double total = 0.0;
    for (const auto& v : loads) total += v.norm();
    if (total == 0.0) throw std::invalid_argument("local_solution_phi: edge load must not vanish");

    // local node numbering over d1
    std::vector<int> nodes;
    for (int e : r1)
        for (int v : mesh.elements[e]) nodes.push_back(v);
    nodes = sorted_unique(nodes);
    std::vector<int> local_of(mesh.n_nodes(), -1);
    for (size_t i = 0; i < nodes.size(); ++i) local_of[nodes[i]] = static_cast<int>(i);

    const int nloc = static_cast<int>(nodes.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * nloc, 2 * nloc);
    for (int e : r1) {
        ElementGeometry g = element_geometry(mesh, e);
        Eigen::Matrix<double, 6, 6> Ke =
            element_stiffness(g, mat.lambda[e], mat.mu[e]) + element_mass(g, mat.rho[e]);
        const auto& t = mesh.elements[e];
        for (int l = 0; l < 6; ++l)
            for (int m = 0; m < 6; ++m)
                K(2 * local_of[t[l / 2]] + l % 2, 2 * local_of[t[m / 2]] + m % 2) += Ke(l, m);
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * nloc);
    for (size_t i = 0; i < edges.size(); ++i) {
        const auto& re = edges[i];
        for (int c = 0; c < 2; ++c) {
            rhs[2 * local_of[re.n0] + c] += 0.5 * re.length * loads[i][c];
            rhs[2 * local_of[re.n1] + c] += 0.5 * re.length * loads[i][c];
        }
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("local_solution_phi: local factorization failed");
    Eigen::VectorXd x = ldlt.solve(rhs);

    std::vector<int> all = r1;
    all.insert(all.end(), r2.begin(), r2.end());
    all = sorted_unique(all);

    RegionField phi;
    phi.elements = all;
    phi.scalar = false;
    phi.values = Eigen::VectorXd::Zero(6 * static_cast<Eigen::Index>(all.size()));
    for (size_t i = 0; i < all.size(); ++i) {
        int e = all[i];
        if (!std::binary_search(r1.begin(), r1.end(), e)) continue;
        const auto& t = mesh.elements[e];
        for (int l = 0; l < 3; ++l)
            for (int c = 0; c < 2; ++c) phi.values[6 * i + 2 * l + c] = x[2 * local_of[t[l]] + c];
    }
    return phi;
}

MaterialField refine_material(const Mesh& base, const MaterialField& mat) {
    mat.validate(base);
    MaterialField fine;
    fine.bounds = mat.bounds;
    fine.lambda.resize(4 * base.n_elements());
    fine.mu.resize(4 * base.n_elements());
    fine.rho.resize(4 * base.n_elements());
    for (int e = 0; e < base.n_elements(); ++e) {
        for (int c : refined_children(base, e)) {
            fine.lambda[c] = mat.lambda[e];
            fine.mu[c] = mat.mu[e];
            fine.rho[c] = mat.rho[e];
        }
    }
    return fine;
}

std::vector<LocalizationLevel> localized_sequence(const Mesh& mesh, const MaterialField& mat,
                                                  const std::vector<int>& d1,
                                                  const std::vector<int>& d2, int n_levels) {
    if (n_levels < 2) throw std::invalid_argument("localized_sequence: need at least two levels");
    validate_probe_regions(mesh, d1, d2);

    std::vector<int> r1 = sorted_unique(d1), r2 = sorted_unique(d2);
    BoundaryLoadBasis basis(mesh);
    RegionField phi = local_solution_phi(mesh, mat, r1, r2);
    StiffnessSystem sys(mesh, mat);

    std::vector<LocalizationLevel> out;
    out.reserve(n_levels);
    for (int level = 0; level < n_levels; ++level) {
        int stride = 1 << (n_levels - 1 - level);
        std::vector<int> cols = boundary_subset(mesh, basis, stride);
        RungeResult fit = runge_approximate(mesh, mat, phi, basis, cols);

        Displacement u = solve_forward(sys, basis, fit.g);
        LocalizationLevel lv;
        lv.level = level;
        lv.n_loads = static_cast<int>(cols.size());
        lv.runge_residual = fit.residual;
        lv.d1_energy_unscaled = energy_densities(mesh, u, r1).l2_energy;
        lv.d2_energy_unscaled = energy_densities(mesh, u, r2).l2_energy;

        if (lv.d2_energy_unscaled <= 0.0) {
            lv.perfect = true;
            lv.g = fit.g;
            lv.d1_energy = lv.d1_energy_unscaled;
            lv.d2_energy = lv.d2_energy_unscaled;
        } else {
            double c = std::pow(lv.d2_energy_unscaled, -0.25);
            lv.g = Load{c * fit.g.coeff};
            Displacement us = solve_forward(sys, basis, lv.g);
            lv.d1_energy = energy_densities(mesh, us, r1).l2_energy;
            lv.d2_energy = energy_densities(mesh, us, r2).l2_energy;
        }
        out.push_back(std::move(lv));
    }
    return out;
}

Load localized_load_rayleigh(const Mesh& mesh, const MaterialField& mat,
                             const BoundaryLoadBasis& basis, const std::vector<int>& d1,
                             const std::vector<int>& d2, double epsilon, LocalizationKind kind) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("localized_load_rayleigh: epsilon must be > 0");
    validate_probe_regions(mesh, d1, d2);

    StiffnessSystem sys(mesh, mat);
    const int n = basis.size();
    Eigen::MatrixXd solutions(2 * mesh.n_nodes(), n);
    for (int q = 0; q < n; ++q)
        solutions.col(q) = solve_forward(sys, basis, Load{Eigen::VectorXd::Unit(n, q)}).values;

    auto energy_matrix = [&](const std::vector<int>& region) {
        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
        for (int e : region) {
            ElementGeometry g = element_geometry(mesh, e);
            const auto& t = mesh.elements[e];
            Eigen::MatrixXd local(6, n);
            for (int l = 0; l < 6; ++l) local.row(l) = solutions.row(2 * t[l / 2] + l % 2);
            if (kind == LocalizationKind::Divergence) {
                Eigen::RowVectorXd w = element_div_vector(g).transpose() * local;
                Q.noalias() += g.area * w.transpose() * w;
            } else {
                Q.noalias() += local.transpose() * (element_mass(g, 1.0) * local);
            }
        }
        return Q;
    };

    Eigen::MatrixXd q1 = energy_matrix(sorted_unique(d1));
    Eigen::MatrixXd q2 = energy_matrix(sorted_unique(d2));
    GeneralizedEigs eig = gram_weighted_eigs(q1, q2 + epsilon * basis.gram());

    Eigen::VectorXd g = eig.vectors.col(eig.values.size() - 1);
    double bn = std::sqrt(g.dot(basis.gram() * g));
    if (!(bn > 0.0)) throw std::runtime_error("localized_load_rayleigh: degenerate maximizer");
    return Load{g / bn};
}

Load div_localized_load(const Mesh& mesh, const MaterialField& mat, const BoundaryLoadBasis& basis,
                        const std::vector<int>& d1, const std::vector<int>& d2, double epsilon) {
    return localized_load_rayleigh(mesh, mat, basis, d1, d2, epsilon, LocalizationKind::Divergence);
}

// --- probing loads -------------------------------------------------------

int contrast_levels(double a, double b) {
    if (!(0.0 < a && a < b)) throw std::invalid_argument("contrast_levels: need 0 < a < b");
    return static_cast<int>(std::floor(5.0 * (b / a - 1.0))) + 1;
}

TestDensity build_test_density(const Mesh& mesh, const Partition& part, int j, int k, double a,
                               double b) {
    int K = contrast_levels(a, b);
    if (j < 1 || j > part.count) throw std::invalid_argument("build_test_density: j out of range");
    if (k < 1 || k > K) throw std::invalid_argument("build_test_density: k out of range");

    TestDensity td;
    td.j = j;
    td.k = k;
    td.a = a;
    td.b = b;
    td.zeta.resize(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        int label = part.element_label.at(e);
        if (label == kOutsideSupport)
            throw std::invalid_argument("build_test_density: partition must cover the mesh");
        td.zeta[e] = label == j ? (k + 6) * a / 5.0 : 3.0 * a / 5.0;
    }
    return td;
}

double certificate_I(const Mesh& mesh, const Partition& part, int j, const Displacement& u,
                     double a, double b) {
    if (j < 1 || j > part.count) throw std::invalid_argument("certificate_I: j out of range");
    double on_j = 0.0, off_j = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        int label = part.element_label.at(e);
        if (label == kOutsideSupport) continue;
        (label == j ? on_j : off_j) += element_l2(mesh, u, e);
    }
    return 0.5 * on_j - (5.0 * b / (2.0 * a) - 1.5) * off_j;
}

int pick_probe_cell(const Mesh& mesh, const Partition& part, int j) {
    if (!part.touches_boundary(j))
        throw std::invalid_argument("pick_probe_cell: subdomain does not touch the support boundary");

    // support boundary: mesh boundary edges plus edges shared with
    // outside-support elements
    auto nbr = element_neighbors(mesh);
    std::vector<char> support_adjacent(mesh.n_elements(), 0);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        if (part.element_label[e] == kOutsideSupport) continue;
        for (int n : nbr[e])
            if (n < 0 || part.element_label[n] == kOutsideSupport) support_adjacent[e] = 1;
    }

    std::vector<Eigen::Vector2d> neumann_midpoints;
    for (const auto& be : mesh.boundary_edges)
        if (be.tag == BoundaryTag::Neumann)
            neumann_midpoints.push_back(0.5 * (mesh.nodes[be.a] + mesh.nodes[be.b]));

    int best_cell = -1;
    double best_dist = 0.0;
    for (int e : part.elements_of(j)) {
        if (!support_adjacent[e]) continue;
        int cell = mesh.cell_of_element(e);
        Eigen::Vector2d c = 0.5 * (mesh.element_centroid(2 * cell) + mesh.element_centroid(2 * cell + 1));
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& m : neumann_midpoints) dist = std::min(dist, (c - m).norm());
        if (best_cell < 0 || dist < best_dist - 1e-14 ||
            (std::abs(dist - best_dist) <= 1e-14 && cell < best_cell)) {
            best_cell = cell;
            best_dist = dist;
        }
    }
    if (best_cell < 0)
        throw std::invalid_argument("pick_probe_cell: no boundary-adjacent cell in subdomain");
    return best_cell;
}

CgneTrace cgne_certify(const VirtualMeasurementOp& H, const RegionField& phi,
                       const Partition& part, int j, double a, double b, int max_iter) {
    if (max_iter < 1) throw std::invalid_argument("cgne_certify: max_iter must be >= 1");
    const Mesh& mesh = H.mesh();
    const BoundaryLoadBasis& basis = H.basis();

    CgneTrace trace;
    trace.g = Load{Eigen::VectorXd::Zero(basis.size())};
    trace.u_full = Eigen::VectorXd::Zero(2 * mesh.n_nodes());

    RegionField r = phi;
    Load s = H.apply(r);
    double gamma = basis.inner(s, s);
    Eigen::VectorXd p = s.coeff;

    for (int iter = 1; iter <= max_iter; ++iter) {
        if (!(gamma > 0.0)) break;  // r orthogonal to the range, no progress possible
        Displacement up;
        RegionField q = H.adjoint_with_solution(Load{p}, &up);
        double denom = H.region_inner(q, q);
        if (!(denom > 0.0)) break;
        double alpha = gamma / denom;
        trace.g.coeff += alpha * p;
        trace.u_full += alpha * up.values;
        r.values -= alpha * q.values;
        trace.iterations = iter;
        trace.residuals.push_back(H.region_norm(r));

        trace.certificate = certificate_I(mesh, part, j, Displacement{trace.u_full}, a, b);
        if (trace.certificate > 0.0) {
            trace.certified = true;
            return trace;
        }

        Load s_next = H.apply(r);
        double gamma_next = basis.inner(s_next, s_next);
        p = s_next.coeff + (gamma_next / gamma) * p;
        gamma = gamma_next;
    }
    return trace;
}

ProbingLoad construct_probing_load(const Mesh& mesh, const Partition& part, int j, int k, double a,
                                   double b, const MaterialField& background,
                                   const BoundaryLoadBasis& basis, int max_iter) {
    TestDensity td = build_test_density(mesh, part, j, k, a, b);
    MaterialField zmat = background.with_rho(td.zeta);

    int cell = pick_probe_cell(mesh, part, j);
    std::vector<int> probe = {2 * cell, 2 * cell + 1};
    std::vector<int> rest;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        int label = part.element_label[e];
        if (label != kOutsideSupport && label != j) rest.push_back(e);
    }

    RegionField phi = local_solution_phi(mesh, zmat, probe, rest);
    VirtualMeasurementOp H(VmKind::HLocal, mesh, zmat, phi.elements, basis);

    CgneTrace trace = cgne_certify(H, phi, part, j, a, b, max_iter);
    if (!trace.certified)
        throw ProbingFailure(j, k, trace.iterations,
                             "construct_probing_load: certificate not positive within max_iter");

    ProbingLoad out;
    out.j = j;
    out.k = k;
    out.cgne_iterations = trace.iterations;
    out.g = Load{trace.g.coeff / std::sqrt(trace.certificate)};
    out.normalized = true;

    // recompute the certificate for the rescaled load
    Displacement u = solve_forward(H.system(), basis, out.g);
    out.certificate = certificate_I(mesh, part, j, u, a, b);
    out.norm2 = basis.inner(out.g, out.g);
    return out;
}

const ProbingLoad* ProbingLoadSet::find(int j, int k) const {
    for (const auto& pl : loads)
        if (pl.j == j && pl.k == k) return &pl;
    return nullptr;
}

ProbingLoadSet construct_probing_load_set(const Mesh& mesh, const Partition& part, double a,
                                          double b, const MaterialField& background,
                                          const BoundaryLoadBasis& basis, int max_iter) {
    ProbingLoadSet set;
    set.a = a;
    set.b = b;
    set.n_subdomains = part.count;
    set.k_levels = contrast_levels(a, b);
    for (int j = 1; j <= part.count; ++j)
        for (int k = 1; k <= set.k_levels; ++k)
            set.loads.push_back(construct_probing_load(mesh, part, j, k, a, b, background, basis,
                                                       max_iter));
    return set;
}

}  // namespace elastntd
