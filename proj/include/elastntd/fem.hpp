#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "elastntd/boundary.hpp"
#include "elastntd/mesh.hpp"

namespace elastntd {

/// Admissibility bounds for a material: the coercivity floor delta0, the
/// magnitude cap M0 and the density box [rho_min, rho_max] (rho_min = 0
/// requires plain positivity only).
struct MaterialBounds {
    double delta0 = 1e-9;
    double M0 = 1e12;
    double rho_min = 0.0;
    double rho_max = 1e12;
};

/// Per-element isotropic material (lambda, mu) plus the restoration-force
/// density rho. Fields are piecewise constant; validation checks the bound
/// conditions only, not smoothness of the shear modulus across elements.
struct MaterialField {
    Eigen::VectorXd lambda;
    Eigen::VectorXd mu;
    Eigen::VectorXd rho;
    MaterialBounds bounds;

    static MaterialField uniform(const Mesh& mesh, double lam, double mu, double rho,
                                 MaterialBounds bounds = {});
    static MaterialField per_subdomain(const Mesh& mesh, const Partition& part,
                                       const Eigen::VectorXd& lam, const Eigen::VectorXd& mu,
                                       const Eigen::VectorXd& rho, MaterialBounds bounds = {});

    /// Copy with rho replaced element-wise.
    MaterialField with_rho(const Eigen::VectorXd& new_rho) const;

    /// Throws std::invalid_argument when sizes mismatch or the admissibility
    /// conditions fail: mu >= delta0, lambda + 2 mu >= delta0, lambda > 0,
    /// rho > 0, lambda <= M0, rho <= M0 and rho inside [rho_min, rho_max].
    void validate(const Mesh& mesh) const;
};

/// Nodal displacement field, two components per node; Dirichlet nodes are
/// identically zero.
struct Displacement {
    Eigen::VectorXd values;  // size 2 * n_nodes, dof = 2*node + comp
};

struct ElementGeometry {
    double area;
    std::array<Eigen::Vector2d, 3> grad;  // P1 shape-function gradients
};

ElementGeometry element_geometry(const Mesh& mesh, int e);

/// 6x6 element stiffness (div-div + strain terms, no mass) and mass blocks.
Eigen::Matrix<double, 6, 6> element_stiffness(const ElementGeometry& g, double lambda, double mu);
Eigen::Matrix<double, 6, 6> element_mass(const ElementGeometry& g, double rho);

/// Divergence row: d . u_local gives the (constant) divergence on the element.
Eigen::Matrix<double, 6, 1> element_div_vector(const ElementGeometry& g);

/// Factorized Galerkin system of the elastic weak form on the non-Dirichlet
/// dofs. Solves are const and safe to issue concurrently.
class StiffnessSystem {
  public:
    StiffnessSystem(const Mesh& mesh, const MaterialField& mat);

    int n_nodes() const { return n_nodes_; }
    int n_free() const { return static_cast<int>(full_of_red_.size()); }
    bool dof_is_constrained(int dof) const { return red_of_full_[dof] < 0; }

    const Eigen::SparseMatrix<double>& full_matrix() const { return A_full_; }
    const Eigen::SparseMatrix<double>& reduced_matrix() const { return A_red_; }

    /// Solve for a full-dof right-hand side; constrained dofs of the result
    /// are zero. Throws std::runtime_error if the relative residual exceeds
    /// 1e-10 (signals a broken factorization).
    Displacement solve(const Eigen::VectorXd& rhs_full) const;

  private:
    int n_nodes_ = 0;
    std::vector<int> red_of_full_;
    std::vector<int> full_of_red_;
    Eigen::SparseMatrix<double> A_full_, A_red_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

/// Assemble the P1 Galerkin system; validates the material first.
StiffnessSystem assemble(const Mesh& mesh, const MaterialField& mat);

/// Solve the forward problem for a traction load given in the boundary basis.
Displacement solve_forward(const StiffnessSystem& sys, const BoundaryLoadBasis& basis,
                           const Load& g);

struct Energies {
    double div_energy = 0.0;     // integral of |div u|^2
    double strain_energy = 0.0;  // integral of |sym grad u|^2_F
    double l2_energy = 0.0;      // integral of |u|^2
};

/// Energy integrals of a displacement field over an element set. Strain and
/// divergence are element-constant, so those two integrals are exact; the L2
/// term uses the edge-midpoint rule, exact for quadratics.
Energies energy_densities(const Mesh& mesh, const Displacement& u, const std::vector<int>& region);

/// Integral of |u|^2 over one element.
double element_l2(const Mesh& mesh, const Displacement& u, int e);

/// Integral of zeta |u|^2 with a per-element weight zeta (sign-free).
double weighted_l2(const Mesh& mesh, const Displacement& u, const Eigen::VectorXd& zeta);

}  // namespace elastntd
