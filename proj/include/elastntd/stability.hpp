#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elastntd/localization.hpp"
#include "elastntd/ntd.hpp"

namespace elastntd {

struct TripleBounds {
    double lambda_min = 1.0, lambda_max = 2.0;
    double mu_min = 1.0, mu_max = 2.0;
    double rho_min = 1.0, rho_max = 2.0;

    void validate() const;
};

/// One member of an admissible coefficient box: either a per-subdomain
/// density in [a,b] (elastic moduli fixed elsewhere) or a full per-subdomain
/// (lambda, mu, rho) triple inside its boxes.
struct AdmissibleSample {
    enum class Kind { Density, Triple };
    Kind kind = Kind::Density;
    Eigen::VectorXd lambda, mu, rho;  // per subdomain; lambda/mu unused for Density
    double a = 0.0, b = 0.0;          // density box (Density kind)
    TripleBounds triple;              // coefficient boxes (Triple kind)

    /// Membership in the box plus coercivity compatibility of the values.
    void validate() const;

    /// Expand to a per-element material; `lam` and `mu` supply the fixed
    /// elastic moduli for Density-kind samples.
    MaterialField materialize(const Mesh& mesh, const Partition& part, double lam,
                              double mu) const;
};

AdmissibleSample sample_admissible_density(int n_subdomains, double a, double b,
                                           std::uint64_t seed, std::uint64_t stream,
                                           std::uint64_t index0 = 0);

/// Reciprocal of the largest squared load norm over a complete, normalized
/// probing-load set; the certified lower bound for the density sweep ratios.
double alpha_constant(const ProbingLoadSet& loads, const BoundaryLoadBasis& basis);

/// Per-subdomain values expanded to a per-element vector (zero outside the
/// support).
Eigen::VectorXd expand_subdomain_values(const Mesh& mesh, const Partition& part,
                                        const Eigen::VectorXd& per_subdomain);

/// Per-subdomain density drawn uniformly from [a,b]; pure function of
/// (seed, stream, index base).
Eigen::VectorXd sample_density(int n_subdomains, double a, double b, std::uint64_t seed,
                               std::uint64_t stream, std::uint64_t index0 = 0);

/// Per-subdomain weights with unit sup norm: uniform on [-1,1], rescaled so
/// the largest magnitude is exactly one.
Eigen::VectorXd sample_unit_sphere_K(const Partition& part, std::uint64_t seed,
                                     std::uint64_t index = 0);

struct LipschitzRow {
    int pair_id = 0;
    double coeff_dist = 0.0;
    double ntd_dist = 0.0;
    double ratio = 0.0;
};

struct LipschitzReport {
    std::vector<LipschitzRow> rows;
    double min_ratio = 0.0;
    double alpha = 0.0;  // 0 when no constructive constant applies
    bool pass = false;
    std::uint64_t seed = 0;
    std::string mode;  // "density" or "simultaneous"
};

/// Ratio sweep for the density-only problem: draws pairs from the admissible
/// box, measures the operator-norm distance of the boundary operators against
/// the sup distance of the densities, and checks every ratio clears
/// alpha (1 - 1e-6). Identical pairs are redrawn.
LipschitzReport lipschitz_sweep_density(const Mesh& mesh, const Partition& part, double lam,
                                        double mu, double a, double b, int n_pairs,
                                        std::uint64_t seed, double alpha,
                                        const BoundaryLoadBasis& basis);

enum class Definiteness { Increasing, Decreasing };

/// Max over the three coefficients of the per-subdomain sup distance.
double triple_delta_norm(const Eigen::VectorXd& dl, const Eigen::VectorXd& dm,
                         const Eigen::VectorXd& dr);

/// Ratio sweep for the simultaneous problem under a definiteness ordering:
/// each subdomain coefficient is drawn twice and sorted so the pair is
/// ordered; the reported minimum ratio is the empirical stability constant
/// (no constructive bound exists here). Pass means every ratio is positive.
LipschitzReport lipschitz_sweep_simultaneous(const Mesh& mesh, const Partition& part,
                                             const TripleBounds& bounds, Definiteness direction,
                                             int n_pairs, std::uint64_t seed,
                                             const BoundaryLoadBasis& basis);

/// Negative control: unordered triples with mixed-sign differences. Emitted
/// for documentation next to the ordered sweep; nothing is claimed about its
/// ratios, so the report never asserts (pass is always true).
LipschitzReport mixed_control_sweep(const Mesh& mesh, const Partition& part,
                                    const TripleBounds& bounds, int n_pairs, std::uint64_t seed,
                                    const BoundaryLoadBasis& basis);

}  // namespace elastntd
