#include "elastntd/ntd.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace elastntd {

NtDMatrix assemble_ntd(const StiffnessSystem& sys, const BoundaryLoadBasis& basis) {
    const int n = basis.size();
    Eigen::MatrixXd traces(n, n);
    for (int q = 0; q < n; ++q) {
        Load g{Eigen::VectorXd::Unit(n, q)};
        Displacement u = solve_forward(sys, basis, g);
        traces.col(q) = boundary_trace(basis, u.values);
    }
    Eigen::MatrixXd lam = basis.gram() * traces;

    NtDMatrix ntd;
    double scale = lam.cwiseAbs().maxCoeff();
    ntd.asymmetry = scale > 0.0 ? (lam - lam.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
    if (ntd.asymmetry > 1e-10)
        throw std::runtime_error("assemble_ntd: matrix asymmetry exceeds tolerance");
    ntd.matrix = 0.5 * (lam + lam.transpose());
    return ntd;
}

NtDMatrix assemble_ntd(const Mesh& mesh, const MaterialField& mat, const BoundaryLoadBasis& basis) {
    StiffnessSystem sys(mesh, mat);
    return assemble_ntd(sys, basis);
}

double quadratic_form(const NtDMatrix& ntd, const Load& g) {
    return g.coeff.dot(ntd.matrix * g.coeff);
}

GeneralizedEigs gram_weighted_eigs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument("gram_weighted_eigs: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gram_weighted_eigs: weight matrix is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    // C = L^{-1} A L^{-T}, same spectrum as the pencil (A, B)
    Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(a);
    C = L.triangularView<Eigen::Lower>().solve(C.transpose()).transpose();
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success) throw std::runtime_error("gram_weighted_eigs: eigensolver failed");
    GeneralizedEigs out;
    out.values = es.eigenvalues();
    out.vectors = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    return out;
}

double ntd_operator_norm(const Eigen::MatrixXd& delta, const BoundaryLoadBasis& basis) {
    if (delta.rows() != basis.size() || delta.cols() != basis.size())
        throw std::invalid_argument("ntd_operator_norm: dimension mismatch");
    GeneralizedEigs eig = gram_weighted_eigs(0.5 * (delta + delta.transpose()), basis.gram());
    return eig.values.cwiseAbs().maxCoeff();
}

double min_gram_weighted_eigenvalue(const Eigen::MatrixXd& delta, const BoundaryLoadBasis& basis) {
    GeneralizedEigs eig = gram_weighted_eigs(0.5 * (delta + delta.transpose()), basis.gram());
    return eig.values.minCoeff();
}

}  // namespace elastntd
