#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "foilwind/bspline.hpp"
#include "foilwind/constants.hpp"
#include "foilwind/homogenization.hpp"
#include "foilwind/mesh.hpp"
#include "foilwind/winding.hpp"

namespace foilwind {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Reluctivity per region; the winding uses the homogenized tensors.
struct RegionMaterials {
    std::optional<double> nu_air = nu0;
    std::optional<double> nu_yoke;
    std::optional<HomogenizedTensors> winding;
};

// Region-wise source current density along e_beta, A/m^2.
using SourceDensity = std::map<Region, double>;

// Integration weight of the out-of-plane direction at a point: l_z in
// Cartesian mode, 2 pi r in axisymmetric mode.
double volume_weight(const SymmetryMode& symmetry, const Eigen::Vector2d& p);

struct FieldMatrices {
    SparseMatrix K;
    SparseMatrix M;
};

// Nodal A_z (Cartesian) or psi = r A_phi (axisymmetric) stiffness and mass.
// `winding` is needed only when the mesh has FoilWinding triangles, for the
// orientation of the anisotropic reluctivity. Throws ConfigError when a region
// present in the mesh has no material.
FieldMatrices assemble_field(const Mesh& mesh, const RegionMaterials& materials,
                             const SymmetryMode& symmetry, const FoilWinding* winding = nullptr);

SparseMatrix assemble_coupling(const Mesh& mesh, const FoilWinding& winding, const BSplineBasisd& basis,
                               double sigma_par, const SymmetryMode& symmetry);

struct WindingMatrices {
    Eigen::MatrixXd G;
    Eigen::MatrixXd C_prime;   // not symmetric
    Eigen::MatrixXd C_dprime;
    Eigen::VectorXd P;
};

// eps_hom = 0 gives vanishing capacitance blocks; negative eps_hom raises ConfigError.
WindingMatrices assemble_winding(const Mesh& mesh, const FoilWinding& winding,
                                 const BSplineBasisd& basis, double sigma_par, double eps_hom,
                                 const SymmetryMode& symmetry);

Eigen::VectorXd assemble_source(const Mesh& mesh, const SourceDensity& sources,
                                const SymmetryMode& symmetry);

// Everything needed to assemble and post-process one foil winding problem.
struct FoilModel {
    Mesh mesh;
    SymmetryMode symmetry;
    FoilWinding winding;
    BSplineBasisd basis;
    RegionMaterials materials;
    SourceDensity sources;

    const HomogenizedTensors& tensors() const;
};

struct AssembledSystem {
    SparseMatrix K;
    SparseMatrix M;
    SparseMatrix X;
    Eigen::MatrixXd G;
    Eigen::MatrixXd C_prime;
    Eigen::MatrixXd C_dprime;
    Eigen::VectorXd P;
    Eigen::VectorXd js;
    std::vector<bool> dirichlet;
    SymmetryMode symmetry;

    int num_field() const { return static_cast<int>(K.rows()); }
    int num_voltage() const { return static_cast<int>(G.rows()); }
};

// Validates the mesh against the winding and assembles all blocks.
AssembledSystem assemble_system(const FoilModel& model);

// Max |A - A^T| over max |A|.
double asymmetry(const Eigen::MatrixXd& a);
double asymmetry(const SparseMatrix& a);

void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& a);

}  // namespace foilwind
