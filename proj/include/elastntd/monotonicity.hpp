#pragma once

#include <Eigen/Dense>

#include "elastntd/fem.hpp"

namespace elastntd {

/// One evaluation of a two-sided comparison inequality: upper and lower energy
/// bounds around the quadratic-form difference <g,L2 g> - <g,L1 g>.
struct SandwichReport {
    double upper_bound = 0.0;
    double middle = 0.0;
    double lower_bound = 0.0;
    double slack_upper = 0.0;  // upper_bound - middle
    double slack_lower = 0.0;  // middle - lower_bound
    double scale = 0.0;        // max |.| of the three quantities

    bool pass(double rel_tol = 1e-9) const {
        double tol = rel_tol * std::max(scale, 1e-300);
        return slack_upper >= -tol && slack_lower >= -tol;
    }
};

/// Density-only comparison: materials must share lambda and mu. The bounds
/// are the (rho1 - rho2)-weighted L2 energies of the two solutions.
SandwichReport sandwich_rho(const Mesh& mesh, const MaterialField& mat1, const MaterialField& mat2,
                            const BoundaryLoadBasis& basis, const Load& g);

/// Three-coefficient comparison: bounds combine divergence, strain and L2
/// energies weighted by the coefficient differences.
SandwichReport sandwich_full(const Mesh& mesh, const MaterialField& mat1, const MaterialField& mat2,
                             const BoundaryLoadBasis& basis, const Load& g);

/// J(g, zeta, tau) = integral of zeta |u|^2 for the solution u under material
/// tau driven by g; zeta is a sign-free per-element weight.
double j_functional(const Mesh& mesh, const BoundaryLoadBasis& basis, const Load& g,
                    const Eigen::VectorXd& zeta, const MaterialField& tau);

/// Psi(g, (alpha,beta,gamma), mat): integral of alpha |div u|^2
/// + 2 beta |sym grad u|^2_F + gamma |u|^2, element-wise weights.
double psi_functional(const Mesh& mesh, const BoundaryLoadBasis& basis, const Load& g,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& gamma, const MaterialField& mat);

/// Phi = max(Psi(g, w, mat_a), Psi(g, -w, mat_b)).
double phi_functional(const Mesh& mesh, const BoundaryLoadBasis& basis, const Load& g,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& gamma, const MaterialField& mat_a,
                      const MaterialField& mat_b);

}  // namespace elastntd
