#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "elastntd/fem.hpp"
#include "elastntd/ntd.hpp"

namespace elastntd {

/// Interior field supported on an element set, stored element-by-element
/// (discontinuous across elements): 6 nodal values per element for vector
/// fields, one value per element for scalar densities.
struct RegionField {
    std::vector<int> elements;  // sorted
    Eigen::VectorXd values;
    bool scalar = false;

    int stride() const { return scalar ? 1 : 6; }
    void check() const {
        if (values.size() != static_cast<Eigen::Index>(elements.size()) * stride())
            throw std::invalid_argument("RegionField: value count does not match region");
    }
};

/// Restriction of a displacement to a region (vector field).
RegionField restrict_to_region(const Mesh& mesh, const Displacement& u,
                               const std::vector<int>& region);
/// Restriction of the (element-constant) divergence to a region (scalar field).
RegionField restrict_div_to_region(const Mesh& mesh, const Displacement& u,
                                   const std::vector<int>& region);

enum class VmKind {
    RungeA,  // volume source f on D, trace of the driven solution
    TDiv,    // scalar density paired with the divergence of the test function
    ZL2,     // vector density paired with the test function
    HLocal,  // RungeA under a test-density material
};

/// Maps interior densities on a region to boundary traces; its adjoint
/// restricts the load-driven solution (or its divergence) back to the region.
/// The forward/adjoint pair shares one factorization and satisfies the duality
/// identity exactly at the discrete level.
class VirtualMeasurementOp {
  public:
    VirtualMeasurementOp(VmKind kind, const Mesh& mesh, const MaterialField& mat,
                         std::vector<int> region, const BoundaryLoadBasis& basis);

    VmKind kind() const { return kind_; }
    const std::vector<int>& region() const { return region_; }
    const BoundaryLoadBasis& basis() const { return basis_; }
    const StiffnessSystem& system() const { return sys_; }
    const Mesh& mesh() const { return mesh_; }

    /// Interior density -> trace of the driven solution, as load coefficients.
    Load apply(const RegionField& f) const;

    /// Boundary load -> restriction of the driven solution; optionally exposes
    /// the full solution.
    RegionField adjoint(const Load& g) const;
    RegionField adjoint_with_solution(const Load& g, Displacement* u_out) const;

    /// L2 inner product / norm on the region for fields of this op's kind.
    double region_inner(const RegionField& f, const RegionField& h) const;
    double region_norm(const RegionField& f) const;

    RegionField zero_field() const;
    RegionField random_field(std::uint64_t seed, std::uint64_t index) const;

  private:
    VmKind kind_;
    Mesh mesh_;
    std::vector<int> region_;
    BoundaryLoadBasis basis_;
    StiffnessSystem sys_;
};

struct RungeResult {
    Load g;
    double residual;  // attained L2(D) misfit
};

/// Least-squares fit of the load-driven solution to a target field on the
/// region: solves the normal equations of the restriction map (one forward
/// solve per basis function), pseudo-inverting rank-deficient normal matrices
/// so the minimum-norm minimizer is returned. A non-empty `columns` list
/// restricts the fit to that subset of basis functions (coefficients off the
/// subset stay zero). Throws when no admitted load influences the region.
RungeResult runge_approximate(const Mesh& mesh, const MaterialField& mat, const RegionField& target,
                              const BoundaryLoadBasis& basis,
                              const std::vector<int>& columns = {});

/// Basis indices (both components) of every stride-th Neumann-boundary node
/// in perimeter order; stride 1 selects the whole basis. Subsets for strides
/// 2^k are nested.
std::vector<int> boundary_subset(const Mesh& mesh, const BoundaryLoadBasis& basis, int stride);

struct RegionEdge {
    int n0, n1;
    Eigen::Vector2d outward_normal;
    double length;
};

/// Boundary edges of an element set, in deterministic order (elements
/// ascending, local edges in CCW order).
std::vector<RegionEdge> region_boundary_edges(const Mesh& mesh, const std::vector<int>& region);

/// Neumann problem on d1 alone (coercive thanks to the rho term), driven by a
/// per-edge traction on the boundary of d1 (empty = unit outward normal on
/// every edge); extended by zero on d2. The result is a homogeneous solution
/// on d1 and vanishes identically on d2.
RegionField local_solution_phi(const Mesh& mesh, const MaterialField& mat,
                               const std::vector<int>& d1, const std::vector<int>& d2,
                               const std::vector<Eigen::Vector2d>& edge_load = {});

struct LocalizationLevel {
    int level = 0;
    int n_loads = 0;                  // admitted basis functions at this level
    Load g;                           // scaled load (full-basis coefficients)
    double d1_energy = 0.0;           // L2 energies of the scaled load's solution
    double d2_energy = 0.0;
    double d1_energy_unscaled = 0.0;  // same for the unscaled fit
    double d2_energy_unscaled = 0.0;
    double runge_residual = 0.0;
    bool perfect = false;  // unscaled load already has zero energy on d2
};

/// Loads concentrating L2 energy on d1 while draining it from d2: fits the
/// local solution over a ladder of nested, expanding load subsets (strides
/// 2^(n_levels-1) down to 1, so the last level admits the whole basis),
/// scaling each fit by the quarter power of its d2 energy. Nesting makes the
/// fit misfit nonincreasing across levels. Requires n_levels >= 2 and probe
/// regions that pass validate_probe_regions.
std::vector<LocalizationLevel> localized_sequence(const Mesh& mesh, const MaterialField& mat,
                                                  const std::vector<int>& d1,
                                                  const std::vector<int>& d2, int n_levels);

/// Material transported to the refined mesh (children inherit their parent's
/// element values).
MaterialField refine_material(const Mesh& base, const MaterialField& mat);

enum class LocalizationKind { Divergence, L2 };

/// Maximizer of the regularized quotient
///   (energy of T1* g on d1) / (energy of T2* g on d2 + eps |g|^2),
/// computed as the top generalized eigenvector; returned with unit load norm.
/// Divergence kind uses divergence energies, L2 kind uses L2 energies.
Load localized_load_rayleigh(const Mesh& mesh, const MaterialField& mat,
                             const BoundaryLoadBasis& basis, const std::vector<int>& d1,
                             const std::vector<int>& d2, double epsilon, LocalizationKind kind);

Load div_localized_load(const Mesh& mesh, const MaterialField& mat, const BoundaryLoadBasis& basis,
                        const std::vector<int>& d1, const std::vector<int>& d2, double epsilon);

// --- probing loads -------------------------------------------------------

/// Piecewise-constant comparison density: (k+6) a/5 on subdomain j and 3a/5
/// on the rest of the support.
struct TestDensity {
    int j = 0, k = 0;
    double a = 0.0, b = 0.0;
    Eigen::VectorXd zeta;  // per element
};

/// Number of contrast levels K = floor(5 (b/a - 1)) + 1 for 0 < a < b.
int contrast_levels(double a, double b);

TestDensity build_test_density(const Mesh& mesh, const Partition& part, int j, int k, double a,
                               double b);

/// Positivity certificate: half the L2 energy on subdomain j minus
/// (5b/(2a) - 3/2) times the energy on the rest of the support.
double certificate_I(const Mesh& mesh, const Partition& part, int j, const Displacement& u,
                     double a, double b);

struct ProbingLoad {
    int j = 0, k = 0;
    Load g;
    double certificate = 0.0;  // 1 after normalization
    int cgne_iterations = 0;
    bool normalized = false;
    double norm2 = 0.0;  // squared load norm, feeds the stability constant
};

struct ProbingLoadSet {
    double a = 0.0, b = 0.0;
    int n_subdomains = 0;
    int k_levels = 0;
    std::vector<ProbingLoad> loads;  // ordered (j,k), j-major

    const ProbingLoad* find(int j, int k) const;
};

struct CgneTrace {
    Load g;
    Eigen::VectorXd u_full;          // solution for the final iterate
    int iterations = 0;              // iterations actually taken
    double certificate = 0.0;        // certificate of the final iterate
    bool certified = false;
    std::vector<double> residuals;   // fit misfit per iteration, nonincreasing
};

/// Conjugate-gradient iteration on the normal equations of the restriction
/// map of `H`, targeting `phi`; stops at the first iterate whose certificate
/// for subdomain j is positive (or after max_iter iterations).
CgneTrace cgne_certify(const VirtualMeasurementOp& H, const RegionField& phi,
                       const Partition& part, int j, double a, double b, int max_iter);

class ProbingFailure : public std::runtime_error {
  public:
    ProbingFailure(int j, int k, int iterations, const std::string& what)
        : std::runtime_error(what), j_(j), k_(k), iterations_(iterations) {}
    int j() const { return j_; }
    int k() const { return k_; }
    int iterations() const { return iterations_; }

  private:
    int j_, k_, iterations_;
};

/// Deterministic probe cell inside subdomain j: among cells with an edge on
/// the support boundary, the one whose centroid is nearest the Neumann
/// boundary, ties broken by lowest element index.
int pick_probe_cell(const Mesh& mesh, const Partition& part, int j);

/// Builds the probing load for (j,k): a local homogeneous solution on the
/// probe cell is targeted by conjugate-gradient iteration on the normal
/// equations of the restriction map under the (j,k) test density; iteration
/// stops at the first iterate whose certificate is positive, and the load is
/// rescaled so the certificate equals one. Throws ProbingFailure when
/// max_iter iterations do not certify.
ProbingLoad construct_probing_load(const Mesh& mesh, const Partition& part, int j, int k, double a,
                                   double b, const MaterialField& background,
                                   const BoundaryLoadBasis& basis, int max_iter = 500);

ProbingLoadSet construct_probing_load_set(const Mesh& mesh, const Partition& part, double a,
                                          double b, const MaterialField& background,
                                          const BoundaryLoadBasis& basis, int max_iter = 500);

}  // namespace elastntd
