#include "elastntd/fem.hpp"

#include <set>
#include <stdexcept>

namespace elastntd {

MaterialField MaterialField::uniform(const Mesh& mesh, double lam, double mu, double rho,
                                     MaterialBounds bounds) {
    MaterialField m;
    m.lambda = Eigen::VectorXd::Constant(mesh.n_elements(), lam);
    m.mu = Eigen::VectorXd::Constant(mesh.n_elements(), mu);
    m.rho = Eigen::VectorXd::Constant(mesh.n_elements(), rho);
    m.bounds = bounds;
    m.validate(mesh);
    return m;
}

MaterialField MaterialField::per_subdomain(const Mesh& mesh, const Partition& part,
                                           const Eigen::VectorXd& lam, const Eigen::VectorXd& mu,
                                           const Eigen::VectorXd& rho, MaterialBounds bounds) {
    if (lam.size() != part.count || mu.size() != part.count || rho.size() != part.count)
        throw std::invalid_argument("MaterialField::per_subdomain: value count must equal N");
    MaterialField m;
    m.lambda.resize(mesh.n_elements());
    m.mu.resize(mesh.n_elements());
    m.rho.resize(mesh.n_elements());
    m.bounds = bounds;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        int j = part.element_label.at(e);
        if (j < 1)
            throw std::invalid_argument("MaterialField::per_subdomain: element outside partition");
        m.lambda[e] = lam[j - 1];
        m.mu[e] = mu[j - 1];
        m.rho[e] = rho[j - 1];
    }
    m.validate(mesh);
    return m;
}

MaterialField MaterialField::with_rho(const Eigen::VectorXd& new_rho) const {
    MaterialField m = *this;
    if (new_rho.size() != rho.size())
        throw std::invalid_argument("MaterialField::with_rho: size mismatch");
    m.rho = new_rho;
    return m;
}

void MaterialField::validate(const Mesh& mesh) const {
    const int n = mesh.n_elements();
    if (lambda.size() != n || mu.size() != n || rho.size() != n)
        throw std::invalid_argument("MaterialField: per-element arrays do not match the mesh");
    for (int e = 0; e < n; ++e) {
        if (!(mu[e] >= bounds.delta0) || !(lambda[e] + 2.0 * mu[e] >= bounds.delta0))
            throw std::invalid_argument("MaterialField: coercivity bound violated on element " +
                                        std::to_string(e));
        if (!(lambda[e] > 0.0) || !(rho[e] > 0.0))
            throw std::invalid_argument("MaterialField: lambda and rho must be positive");
        if (lambda[e] > bounds.M0 || rho[e] > bounds.M0)
            throw std::invalid_argument("MaterialField: magnitude cap M0 exceeded");
        if (bounds.rho_min > 0.0 && (rho[e] < bounds.rho_min || rho[e] > bounds.rho_max))
            throw std::invalid_argument("MaterialField: rho outside its admissible box");
    }
}

ElementGeometry element_geometry(const Mesh& mesh, int e) {
    const auto& t = mesh.elements[e];
    const Eigen::Vector2d& p0 = mesh.nodes[t[0]];
    const Eigen::Vector2d& p1 = mesh.nodes[t[1]];
    const Eigen::Vector2d& p2 = mesh.nodes[t[2]];
    double two_a = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    ElementGeometry g;
    g.area = 0.5 * two_a;
    // grad of barycentric shape function i: rotated opposite edge / (2 area)
    g.grad[0] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / two_a;
    g.grad[1] = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / two_a;
    g.grad[2] = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / two_a;
    return g;
}

Eigen::Matrix<double, 6, 1> element_div_vector(const ElementGeometry& g) {
    Eigen::Matrix<double, 6, 1> d;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 2; ++c) d[2 * i + c] = g.grad[i][c];
    return d;
}

Eigen::Matrix<double, 6, 6> element_stiffness(const ElementGeometry& g, double lambda, double mu) {
    // Strains of P1 shape functions are constant, so both integrals are exact.
    Eigen::Matrix<double, 6, 1> d = element_div_vector(g);
    std::array<Eigen::Matrix2d, 6> strain;
    for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d ec = Eigen::Vector2d::Unit(c);
            strain[2 * i + c] = 0.5 * (ec * g.grad[i].transpose() + g.grad[i] * ec.transpose());
        }
    }
    Eigen::Matrix<double, 6, 6> K = lambda * g.area * (d * d.transpose());
    for (int l = 0; l < 6; ++l)
        for (int m = 0; m < 6; ++m)
            K(l, m) += 2.0 * mu * g.area * strain[l].cwiseProduct(strain[m]).sum();
    return K;
}

Eigen::Matrix<double, 6, 6> element_mass(const ElementGeometry& g, double rho) {
    // Exact for products of linears: A/12 on mixed pairs, A/6 on the diagonal.
    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = rho * g.area / 12.0 * (i == j ? 2.0 : 1.0);
            M(2 * i, 2 * j) += v;
            M(2 * i + 1, 2 * j + 1) += v;
        }
    return M;
}

StiffnessSystem::StiffnessSystem(const Mesh& mesh, const MaterialField& mat) {
    mat.validate(mesh);
    n_nodes_ = mesh.n_nodes();
    const int n_dofs = 2 * n_nodes_;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(36 * mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        ElementGeometry g = element_geometry(mesh, e);
        Eigen::Matrix<double, 6, 6> Ke =
            element_stiffness(g, mat.lambda[e], mat.mu[e]) + element_mass(g, mat.rho[e]);
        const auto& t = mesh.elements[e];
        for (int l = 0; l < 6; ++l)
            for (int m = 0; m < 6; ++m)
                trips.emplace_back(2 * t[l / 2] + l % 2, 2 * t[m / 2] + m % 2, Ke(l, m));
    }
    A_full_.resize(n_dofs, n_dofs);
    A_full_.setFromTriplets(trips.begin(), trips.end());

    std::set<int> dirichlet_nodes;
    for (const auto& be : mesh.boundary_edges) {
        if (be.tag == BoundaryTag::Dirichlet) {
            dirichlet_nodes.insert(be.a);
            dirichlet_nodes.insert(be.b);
        }
    }
    red_of_full_.assign(n_dofs, -1);
    for (int n = 0; n < n_nodes_; ++n) {
        if (dirichlet_nodes.count(n)) continue;
        for (int c = 0; c < 2; ++c) {
            red_of_full_[2 * n + c] = static_cast<int>(full_of_red_.size());
            full_of_red_.push_back(2 * n + c);
        }
    }

    std::vector<Eigen::Triplet<double>> red_trips;
    for (int k = 0; k < A_full_.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A_full_, k); it; ++it) {
            int r = red_of_full_[it.row()], c = red_of_full_[it.col()];
            if (r >= 0 && c >= 0) red_trips.emplace_back(r, c, it.value());
        }
    }
    A_red_.resize(n_free(), n_free());
    A_red_.setFromTriplets(red_trips.begin(), red_trips.end());

    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    ldlt_->compute(A_red_);
    if (ldlt_->info() != Eigen::Success)
        throw std::runtime_error("StiffnessSystem: factorization failed");
}

Displacement StiffnessSystem::solve(const Eigen::VectorXd& rhs_full) const {
    if (rhs_full.size() != 2 * n_nodes_)
        throw std::invalid_argument("StiffnessSystem::solve: rhs size mismatch");
    Eigen::VectorXd f(n_free());
    for (int r = 0; r < n_free(); ++r) f[r] = rhs_full[full_of_red_[r]];

    Eigen::VectorXd x = ldlt_->solve(f);
    double fn = f.norm();
    if (fn > 0.0) {
        Eigen::VectorXd r = f - A_red_ * x;
        if (r.norm() > 1e-10 * fn) {
            x += ldlt_->solve(r);  // one refinement step
            r = f - A_red_ * x;
            if (r.norm() > 1e-10 * fn)
                throw std::runtime_error("StiffnessSystem::solve: residual too large");
        }
    }

    Displacement u;
    u.values = Eigen::VectorXd::Zero(2 * n_nodes_);
    for (int r = 0; r < n_free(); ++r) u.values[full_of_red_[r]] = x[r];
    return u;
}

StiffnessSystem assemble(const Mesh& mesh, const MaterialField& mat) {
    return StiffnessSystem(mesh, mat);
}

Displacement solve_forward(const StiffnessSystem& sys, const BoundaryLoadBasis& basis,
                           const Load& g) {
    return sys.solve(rhs_from_load(sys.n_nodes(), basis, g));
}

Energies energy_densities(const Mesh& mesh, const Displacement& u, const std::vector<int>& region) {
    Energies en;
    for (int e : region) {
        if (e < 0 || e >= mesh.n_elements())
            throw std::out_of_range("energy_densities: invalid element in region");
        ElementGeometry g = element_geometry(mesh, e);
        const auto& t = mesh.elements[e];
        Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector2d ui(u.values[2 * t[i]], u.values[2 * t[i] + 1]);
            grad_u += ui * g.grad[i].transpose();
        }
        double div = grad_u.trace();
        Eigen::Matrix2d sym = 0.5 * (grad_u + grad_u.transpose());
        en.div_energy += g.area * div * div;
        en.strain_energy += g.area * sym.squaredNorm();
        en.l2_energy += element_l2(mesh, u, e);
    }
    return en;
}

double element_l2(const Mesh& mesh, const Displacement& u, int e) {
    ElementGeometry g = element_geometry(mesh, e);
    const auto& t = mesh.elements[e];
    std::array<Eigen::Vector2d, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = Eigen::Vector2d(u.values[2 * t[i]], u.values[2 * t[i] + 1]);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += (0.5 * (v[i] + v[(i + 1) % 3])).squaredNorm();
    return g.area / 3.0 * s;
}

double weighted_l2(const Mesh& mesh, const Displacement& u, const Eigen::VectorXd& zeta) {
    if (zeta.size() != mesh.n_elements())
        throw std::invalid_argument("weighted_l2: weight must be per element");
    double s = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e)
        if (zeta[e] != 0.0) s += zeta[e] * element_l2(mesh, u, e);
    return s;
}

}  // namespace elastntd
