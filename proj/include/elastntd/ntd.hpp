#pragma once

#include <Eigen/Dense>

#include "elastntd/fem.hpp"

namespace elastntd {

/// Galerkin matrix of the Neumann-to-Dirichlet operator over a boundary-load
/// basis: entry (p,q) is the boundary L2 pairing of basis function p with the
/// trace of the solution driven by basis function q. Symmetric and positive
/// semidefinite with respect to the basis Gram matrix.
struct NtDMatrix {
    Eigen::MatrixXd matrix;
    double asymmetry = 0.0;  // relative asymmetry found before symmetrizing
};

/// One forward solve per basis function; the result is symmetrized after
/// checking the raw asymmetry stays below 1e-10 relative.
NtDMatrix assemble_ntd(const StiffnessSystem& sys, const BoundaryLoadBasis& basis);
NtDMatrix assemble_ntd(const Mesh& mesh, const MaterialField& mat, const BoundaryLoadBasis& basis);

/// Quadratic form <g, Lambda g> (the boundary energy of the driven solution).
double quadratic_form(const NtDMatrix& ntd, const Load& g);

struct GeneralizedEigs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, B-orthonormal
};

/// Eigenpairs of the pencil (A, B) with A symmetric, B symmetric positive
/// definite, via Cholesky reduction of B.
GeneralizedEigs gram_weighted_eigs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Operator norm on L2 of the Neumann boundary of the self-adjoint operator
/// whose Galerkin matrix is `delta`: the largest |eigenvalue| of
/// delta x = theta B x.
double ntd_operator_norm(const Eigen::MatrixXd& delta, const BoundaryLoadBasis& basis);

/// Smallest eigenvalue of the pencil (delta, B); nonnegative up to round-off
/// when the underlying operator is positive semidefinite.
double min_gram_weighted_eigenvalue(const Eigen::MatrixXd& delta, const BoundaryLoadBasis& basis);

}  // namespace elastntd
