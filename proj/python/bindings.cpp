#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "elastntd/io.hpp"
#include "elastntd/localization.hpp"
#include "elastntd/monotonicity.hpp"
#include "elastntd/ntd.hpp"
#include "elastntd/stability.hpp"

namespace py = pybind11;
using namespace elastntd;

namespace {

Side side_arg(const std::string& name) { return side_from_name(name); }

Load as_load(const Eigen::VectorXd& coeff) { return Load{coeff}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Plane-strain elasticity with a restoration force: Neumann-to-Dirichlet "
              "operators, monotonicity comparisons, localized potentials, probing loads "
              "and Lipschitz-ratio sweeps on structured unit-square meshes.";

    py::register_exception<ProbeRegionError>(m, "ProbeRegionError");
    py::register_exception<ProbingFailure>(m, "ProbingFailure");

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("n_nodes", &Mesh::n_nodes)
        .def_property_readonly("n_elements", &Mesh::n_elements)
        .def_readonly("nx", &Mesh::nx)
        .def_readonly("ny", &Mesh::ny)
        .def_readonly("element_subdomain", &Mesh::element_subdomain)
        .def("nodes",
             [](const Mesh& mesh) {
                 Eigen::MatrixXd out(mesh.n_nodes(), 2);
                 for (int n = 0; n < mesh.n_nodes(); ++n) out.row(n) = mesh.nodes[n].transpose();
                 return out;
             })
        .def("elements",
             [](const Mesh& mesh) {
                 std::vector<std::array<int, 3>> out = mesh.elements;
                 return out;
             })
        .def("boundary_edges",
             [](const Mesh& mesh) {
                 std::vector<std::tuple<int, int, std::string, int>> out;
                 for (const auto& be : mesh.boundary_edges)
                     out.emplace_back(be.a, be.b,
                                      be.tag == BoundaryTag::Neumann ? "neumann" : "dirichlet",
                                      be.element);
                 return out;
             })
        .def("element_area", &Mesh::element_area)
        .def("to_json", [](const Mesh& mesh) { return mesh_to_json(mesh).dump(); })
        .def_static("from_json",
                    [](const std::string& s) { return mesh_from_json(nlohmann::json::parse(s)); });

    m.def(
        "build_rect_mesh",
        [](int nx, int ny, const std::string& dirichlet_side) {
            return build_rect_mesh(nx, ny, side_arg(dirichlet_side));
        },
        py::arg("nx"), py::arg("ny"), py::arg("dirichlet_side") = "bottom");
    m.def("refine", &refine);
    m.def("refine_region", &refine_region);
    m.def("all_elements", &all_elements);
    m.def("elements_of_cells", &elements_of_cells);

    py::class_<Partition>(m, "Partition")
        .def_readonly("count", &Partition::count)
        .def_readonly("element_label", &Partition::element_label)
        .def("elements_of", &Partition::elements_of)
        .def("touches_boundary", &Partition::touches_boundary);
    m.def("grid_partition", &grid_partition);

    py::class_<ProbeRegions>(m, "ProbeRegions")
        .def_readonly("d1_elements", &ProbeRegions::d1_elements)
        .def_readonly("d2_elements", &ProbeRegions::d2_elements);
    m.def("validate_probe_regions", &validate_probe_regions);

    py::class_<MaterialBounds>(m, "MaterialBounds")
        .def(py::init<>())
        .def_readwrite("delta0", &MaterialBounds::delta0)
        .def_readwrite("M0", &MaterialBounds::M0)
        .def_readwrite("rho_min", &MaterialBounds::rho_min)
        .def_readwrite("rho_max", &MaterialBounds::rho_max);

    py::class_<MaterialField>(m, "MaterialField")
        .def_readonly("lam", &MaterialField::lambda)
        .def_readonly("mu", &MaterialField::mu)
        .def_readonly("rho", &MaterialField::rho)
        .def("with_rho", &MaterialField::with_rho)
        .def("validate", &MaterialField::validate)
        .def_static("uniform", &MaterialField::uniform, py::arg("mesh"), py::arg("lam"),
                    py::arg("mu"), py::arg("rho"), py::arg("bounds") = MaterialBounds{})
        .def_static("per_subdomain", &MaterialField::per_subdomain, py::arg("mesh"),
                    py::arg("partition"), py::arg("lam"), py::arg("mu"), py::arg("rho"),
                    py::arg("bounds") = MaterialBounds{});

    py::class_<BoundaryLoadBasis>(m, "BoundaryLoadBasis")
        .def(py::init<const Mesh&>())
        .def_property_readonly("size", &BoundaryLoadBasis::size)
        .def("entries",
             [](const BoundaryLoadBasis& b) {
                 std::vector<std::pair<int, int>> out;
                 for (const auto& e : b.entries()) out.emplace_back(e.node, e.comp);
                 return out;
             })
        .def("gram", [](const BoundaryLoadBasis& b) { return b.gram(); })
        .def("inner", [](const BoundaryLoadBasis& b, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& h) { return b.inner(as_load(g), as_load(h)); })
        .def("norm",
             [](const BoundaryLoadBasis& b, const Eigen::VectorXd& g) { return b.norm(as_load(g)); });

    py::class_<StiffnessSystem>(m, "StiffnessSystem")
        .def_property_readonly("n_nodes", &StiffnessSystem::n_nodes)
        .def_property_readonly("n_free", &StiffnessSystem::n_free);
    m.def("assemble", [](const Mesh& mesh, const MaterialField& mat) {
        return std::make_unique<StiffnessSystem>(mesh, mat);
    });
    m.def("solve_forward",
          [](const StiffnessSystem& sys, const BoundaryLoadBasis& basis, const Eigen::VectorXd& g) {
              return solve_forward(sys, basis, as_load(g)).values;
          });
    m.def("boundary_trace", [](const BoundaryLoadBasis& basis, const Eigen::VectorXd& values) {
        return boundary_trace(basis, values);
    });
    m.def("boundary_pairing",
          [](const BoundaryLoadBasis& basis, const Eigen::VectorXd& g, const Eigen::VectorXd& t) {
              return boundary_pairing(basis, as_load(g), t);
          });
    m.def("energy_densities",
          [](const Mesh& mesh, const Eigen::VectorXd& values, const std::vector<int>& region) {
              Energies e = energy_densities(mesh, Displacement{values}, region);
              return py::make_tuple(e.div_energy, e.strain_energy, e.l2_energy);
          });

    py::class_<NtDMatrix>(m, "NtDMatrix")
        .def_readonly("matrix", &NtDMatrix::matrix)
        .def_readonly("asymmetry", &NtDMatrix::asymmetry);
    m.def("assemble_ntd", py::overload_cast<const Mesh&, const MaterialField&,
                                            const BoundaryLoadBasis&>(&assemble_ntd));
    m.def("quadratic_form", [](const NtDMatrix& ntd, const Eigen::VectorXd& g) {
        return quadratic_form(ntd, as_load(g));
    });
    m.def("ntd_operator_norm", &ntd_operator_norm);
    m.def("min_gram_weighted_eigenvalue", &min_gram_weighted_eigenvalue);

    py::class_<SandwichReport>(m, "SandwichReport")
        .def_readonly("upper_bound", &SandwichReport::upper_bound)
        .def_readonly("middle", &SandwichReport::middle)
        .def_readonly("lower_bound", &SandwichReport::lower_bound)
        .def_readonly("slack_upper", &SandwichReport::slack_upper)
        .def_readonly("slack_lower", &SandwichReport::slack_lower)
        .def_readonly("scale", &SandwichReport::scale)
        .def("passed", [](const SandwichReport& r) { return r.pass(); });
    m.def("sandwich_rho", [](const Mesh& mesh, const MaterialField& m1, const MaterialField& m2,
                             const BoundaryLoadBasis& basis, const Eigen::VectorXd& g) {
        return sandwich_rho(mesh, m1, m2, basis, as_load(g));
    });
    m.def("sandwich_full", [](const Mesh& mesh, const MaterialField& m1, const MaterialField& m2,
                              const BoundaryLoadBasis& basis, const Eigen::VectorXd& g) {
        return sandwich_full(mesh, m1, m2, basis, as_load(g));
    });
    m.def("j_functional", [](const Mesh& mesh, const BoundaryLoadBasis& basis,
                             const Eigen::VectorXd& g, const Eigen::VectorXd& zeta,
                             const MaterialField& tau) {
        return j_functional(mesh, basis, as_load(g), zeta, tau);
    });
    m.def("psi_functional",
          [](const Mesh& mesh, const BoundaryLoadBasis& basis, const Eigen::VectorXd& g,
             const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, const Eigen::VectorXd& gamma,
             const MaterialField& mat) {
              return psi_functional(mesh, basis, as_load(g), alpha, beta, gamma, mat);
          });
    m.def("phi_functional",
          [](const Mesh& mesh, const BoundaryLoadBasis& basis, const Eigen::VectorXd& g,
             const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, const Eigen::VectorXd& gamma,
             const MaterialField& mat_a, const MaterialField& mat_b) {
              return phi_functional(mesh, basis, as_load(g), alpha, beta, gamma, mat_a, mat_b);
          });

    py::class_<RegionField>(m, "RegionField")
        .def_readonly("elements", &RegionField::elements)
        .def_readonly("values", &RegionField::values)
        .def_readonly("scalar", &RegionField::scalar);
    m.def("local_solution_phi", &local_solution_phi, py::arg("mesh"), py::arg("mat"), py::arg("d1"),
          py::arg("d2"), py::arg("edge_load") = std::vector<Eigen::Vector2d>{});
    m.def(
        "runge_approximate",
        [](const Mesh& mesh, const MaterialField& mat, const RegionField& target,
           const BoundaryLoadBasis& basis, const std::vector<int>& columns) {
            RungeResult r = runge_approximate(mesh, mat, target, basis, columns);
            return py::make_tuple(r.g.coeff, r.residual);
        },
        py::arg("mesh"), py::arg("mat"), py::arg("target"), py::arg("basis"),
        py::arg("columns") = std::vector<int>{});
    m.def("boundary_subset", &boundary_subset);

    py::class_<LocalizationLevel>(m, "LocalizationLevel")
        .def_readonly("level", &LocalizationLevel::level)
        .def_readonly("n_loads", &LocalizationLevel::n_loads)
        .def_property_readonly("g", [](const LocalizationLevel& lv) { return lv.g.coeff; })
        .def_readonly("d1_energy", &LocalizationLevel::d1_energy)
        .def_readonly("d2_energy", &LocalizationLevel::d2_energy)
        .def_readonly("d1_energy_unscaled", &LocalizationLevel::d1_energy_unscaled)
        .def_readonly("d2_energy_unscaled", &LocalizationLevel::d2_energy_unscaled)
        .def_readonly("runge_residual", &LocalizationLevel::runge_residual)
        .def_readonly("perfect", &LocalizationLevel::perfect);
    m.def("localized_sequence", &localized_sequence);
    m.def(
        "div_localized_load",
        [](const Mesh& mesh, const MaterialField& mat, const BoundaryLoadBasis& basis,
           const std::vector<int>& d1, const std::vector<int>& d2, double epsilon) {
            return div_localized_load(mesh, mat, basis, d1, d2, epsilon).coeff;
        });
    m.def(
        "localized_load_rayleigh",
        [](const Mesh& mesh, const MaterialField& mat, const BoundaryLoadBasis& basis,
           const std::vector<int>& d1, const std::vector<int>& d2, double epsilon,
           const std::string& kind) {
            LocalizationKind lk = kind == "div" ? LocalizationKind::Divergence : LocalizationKind::L2;
            return localized_load_rayleigh(mesh, mat, basis, d1, d2, epsilon, lk).coeff;
        },
        py::arg("mesh"), py::arg("mat"), py::arg("basis"), py::arg("d1"), py::arg("d2"),
        py::arg("epsilon"), py::arg("kind") = "div");

    py::class_<TestDensity>(m, "TestDensity")
        .def_readonly("j", &TestDensity::j)
        .def_readonly("k", &TestDensity::k)
        .def_readonly("a", &TestDensity::a)
        .def_readonly("b", &TestDensity::b)
        .def_readonly("zeta", &TestDensity::zeta);
    m.def("contrast_levels", &contrast_levels);
    m.def("build_test_density", &build_test_density);
    m.def("certificate_I", [](const Mesh& mesh, const Partition& part, int j,
                              const Eigen::VectorXd& values, double a, double b) {
        return certificate_I(mesh, part, j, Displacement{values}, a, b);
    });
    m.def("pick_probe_cell", &pick_probe_cell);

    py::class_<ProbingLoad>(m, "ProbingLoad")
        .def_readonly("j", &ProbingLoad::j)
        .def_readonly("k", &ProbingLoad::k)
        .def_property_readonly("g", [](const ProbingLoad& pl) { return pl.g.coeff; })
        .def_readonly("certificate", &ProbingLoad::certificate)
        .def_readonly("cgne_iterations", &ProbingLoad::cgne_iterations)
        .def_readonly("normalized", &ProbingLoad::normalized)
        .def_readonly("norm2", &ProbingLoad::norm2);
    py::class_<ProbingLoadSet>(m, "ProbingLoadSet")
        .def_readonly("a", &ProbingLoadSet::a)
        .def_readonly("b", &ProbingLoadSet::b)
        .def_readonly("n_subdomains", &ProbingLoadSet::n_subdomains)
        .def_readonly("k_levels", &ProbingLoadSet::k_levels)
        .def_readonly("loads", &ProbingLoadSet::loads);
    m.def("construct_probing_load", &construct_probing_load, py::arg("mesh"), py::arg("partition"),
          py::arg("j"), py::arg("k"), py::arg("a"), py::arg("b"), py::arg("background"),
          py::arg("basis"), py::arg("max_iter") = 500);
    m.def("construct_probing_load_set", &construct_probing_load_set, py::arg("mesh"),
          py::arg("partition"), py::arg("a"), py::arg("b"), py::arg("background"), py::arg("basis"),
          py::arg("max_iter") = 500);
    m.def("alpha_constant", &alpha_constant);

    m.def("sample_density", &sample_density, py::arg("n_subdomains"), py::arg("a"), py::arg("b"),
          py::arg("seed"), py::arg("stream"), py::arg("index0") = 0);
    m.def("sample_unit_sphere_K", &sample_unit_sphere_K, py::arg("partition"), py::arg("seed"),
          py::arg("index") = 0);
    m.def("expand_subdomain_values", &expand_subdomain_values);

    py::class_<TripleBounds>(m, "TripleBounds")
        .def(py::init<>())
        .def_readwrite("lambda_min", &TripleBounds::lambda_min)
        .def_readwrite("lambda_max", &TripleBounds::lambda_max)
        .def_readwrite("mu_min", &TripleBounds::mu_min)
        .def_readwrite("mu_max", &TripleBounds::mu_max)
        .def_readwrite("rho_min", &TripleBounds::rho_min)
        .def_readwrite("rho_max", &TripleBounds::rho_max);
    py::class_<LipschitzRow>(m, "LipschitzRow")
        .def_readonly("pair_id", &LipschitzRow::pair_id)
        .def_readonly("coeff_dist", &LipschitzRow::coeff_dist)
        .def_readonly("ntd_dist", &LipschitzRow::ntd_dist)
        .def_readonly("ratio", &LipschitzRow::ratio);
    py::class_<LipschitzReport>(m, "LipschitzReport")
        .def_readonly("rows", &LipschitzReport::rows)
        .def_readonly("min_ratio", &LipschitzReport::min_ratio)
        .def_readonly("alpha", &LipschitzReport::alpha)
        .def_readonly("pass_", &LipschitzReport::pass)
        .def_readonly("seed", &LipschitzReport::seed)
        .def_readonly("mode", &LipschitzReport::mode);
    py::class_<AdmissibleSample> sample(m, "AdmissibleSample");
    py::enum_<AdmissibleSample::Kind>(sample, "Kind")
        .value("Density", AdmissibleSample::Kind::Density)
        .value("Triple", AdmissibleSample::Kind::Triple);
    sample.def(py::init<>())
        .def_readwrite("kind", &AdmissibleSample::kind)
        .def_readwrite("lam", &AdmissibleSample::lambda)
        .def_readwrite("mu", &AdmissibleSample::mu)
        .def_readwrite("rho", &AdmissibleSample::rho)
        .def_readwrite("a", &AdmissibleSample::a)
        .def_readwrite("b", &AdmissibleSample::b)
        .def_readwrite("triple", &AdmissibleSample::triple)
        .def("validate", &AdmissibleSample::validate)
        .def("materialize", &AdmissibleSample::materialize);
    m.def("sample_admissible_density", &sample_admissible_density, py::arg("n_subdomains"),
          py::arg("a"), py::arg("b"), py::arg("seed"), py::arg("stream"), py::arg("index0") = 0);

    m.def("lipschitz_sweep_density", &lipschitz_sweep_density);
    m.def("mixed_control_sweep", &mixed_control_sweep);
    m.def(
        "lipschitz_sweep_simultaneous",
        [](const Mesh& mesh, const Partition& part, const TripleBounds& bounds,
           const std::string& direction, int n_pairs, std::uint64_t seed,
           const BoundaryLoadBasis& basis) {
            Definiteness dir =
                direction == "decreasing" ? Definiteness::Decreasing : Definiteness::Increasing;
            return lipschitz_sweep_simultaneous(mesh, part, bounds, dir, n_pairs, seed, basis);
        },
        py::arg("mesh"), py::arg("partition"), py::arg("bounds"), py::arg("direction"),
        py::arg("n_pairs"), py::arg("seed"), py::arg("basis"));

    m.attr("__version__") = "0.1.0";
}
