#include "elastntd/monotonicity.hpp"

#include <stdexcept>

namespace elastntd {

namespace {

double boundary_energy(const BoundaryLoadBasis& basis, const Load& g, const Displacement& u) {
    // <g, Lambda g> = integral of g . u over the Neumann boundary
    return boundary_pairing(basis, g, boundary_trace(basis, u.values));
}

SandwichReport make_report(double upper, double middle, double lower) {
    SandwichReport r;
    r.upper_bound = upper;
    r.middle = middle;
    r.lower_bound = lower;
    r.slack_upper = upper - middle;
    r.slack_lower = middle - lower;
    r.scale = std::max({std::abs(upper), std::abs(middle), std::abs(lower)});
    return r;
}

}  // namespace

SandwichReport sandwich_rho(const Mesh& mesh, const MaterialField& mat1, const MaterialField& mat2,
                            const BoundaryLoadBasis& basis, const Load& g) {
    if ((mat1.lambda - mat2.lambda).cwiseAbs().maxCoeff() != 0.0 ||
        (mat1.mu - mat2.mu).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("sandwich_rho: materials must share lambda and mu");

    StiffnessSystem sys1(mesh, mat1), sys2(mesh, mat2);
    Displacement u1 = solve_forward(sys1, basis, g);
    Displacement u2 = solve_forward(sys2, basis, g);

    double middle = boundary_energy(basis, g, u2) - boundary_energy(basis, g, u1);
    Eigen::VectorXd drho = mat1.rho - mat2.rho;
    double upper = weighted_l2(mesh, u2, drho);
    double lower = weighted_l2(mesh, u1, drho);
    return make_report(upper, middle, lower);
}

namespace {

// integral of dl |div u|^2 + 2 dm |sym grad u|^2 + dr |u|^2, element weights
double weighted_energy(const Mesh& mesh, const Displacement& u, const Eigen::VectorXd& dl,
                       const Eigen::VectorXd& dm, const Eigen::VectorXd& dr) {
    double s = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        if (dl[e] == 0.0 && dm[e] == 0.0 && dr[e] == 0.0) continue;
        Energies en = energy_densities(mesh, u, {e});
        s += dl[e] * en.div_energy + 2.0 * dm[e] * en.strain_energy + dr[e] * en.l2_energy;
    }
    return s;
}

}  // namespace

SandwichReport sandwich_full(const Mesh& mesh, const MaterialField& mat1, const MaterialField& mat2,
                             const BoundaryLoadBasis& basis, const Load& g) {
    StiffnessSystem sys1(mesh, mat1), sys2(mesh, mat2);
    Displacement u1 = solve_forward(sys1, basis, g);
    Displacement u2 = solve_forward(sys2, basis, g);

    double middle = boundary_energy(basis, g, u2) - boundary_energy(basis, g, u1);
    Eigen::VectorXd dl = mat1.lambda - mat2.lambda;
    Eigen::VectorXd dm = mat1.mu - mat2.mu;
    Eigen::VectorXd dr = mat1.rho - mat2.rho;
    double upper = weighted_energy(mesh, u2, dl, dm, dr);
    double lower = weighted_energy(mesh, u1, dl, dm, dr);
    return make_report(upper, middle, lower);
}

double j_functional(const Mesh& mesh, const BoundaryLoadBasis& basis, const Load& g,
                    const Eigen::VectorXd& zeta, const MaterialField& tau) {
    StiffnessSystem sys(mesh, tau);
    Displacement u = solve_forward(sys, basis, g);
    return weighted_l2(mesh, u, zeta);
}

double psi_functional(const Mesh& mesh, const BoundaryLoadBasis& basis, const Load& g,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& gamma, const MaterialField& mat) {
    if (alpha.size() != mesh.n_elements() || beta.size() != mesh.n_elements() ||
        gamma.size() != mesh.n_elements())
        throw std::invalid_argument("psi_functional: weights must be per element");
    StiffnessSystem sys(mesh, mat);
    Displacement u = solve_forward(sys, basis, g);
    return weighted_energy(mesh, u, alpha, beta, gamma);
}

double phi_functional(const Mesh& mesh, const BoundaryLoadBasis& basis, const Load& g,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& gamma, const MaterialField& mat_a,
                      const MaterialField& mat_b) {
    double a = psi_functional(mesh, basis, g, alpha, beta, gamma, mat_a);
    double b = psi_functional(mesh, basis, g, -alpha, -beta, -gamma, mat_b);
    return std::max(a, b);
}

}  // namespace elastntd
