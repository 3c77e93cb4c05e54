#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

#include "foilwind/assembly.hpp"
#include "foilwind/homogenization.hpp"
#include "foilwind/mesh.hpp"
#include "foilwind/winding.hpp"

namespace foilwind {

// Mid positions (mesh coordinate along the alpha axis) of the N turns.
std::vector<double> turn_positions(const FoilWinding& w);

// Series resistance of the N turns: N l_z / (sigma_c d_c h) in Cartesian mode,
// sum_k 2 pi r_k / (sigma_c d_c h) in axisymmetric mode.
double dc_resistance(const FoilWinding& w, double sigma_c, const SymmetryMode& symmetry);

// Per-turn resistances.
Eigen::VectorXd turn_resistances(const FoilWinding& w, double sigma_c, const SymmetryMode& symmetry);

// Parallel-plate capacitance of each of the N - 1 insulation gaps:
// eps_i h l_z / d_i or eps_i h 2 pi r_gap / d_i.
Eigen::VectorXd interturn_capacitances(const FoilWinding& w, double eps_i, const SymmetryMode& symmetry);

// Layout with the winding rectangle replaced by N conductor strips of
// thickness d_c separated by insulation of thickness d_i (half of it at both
// outer faces). All strips are tagged Air; `turn_rects[k]` is the layout
// rectangle (and therefore mesh group) of turn k.
struct ResolvedTurns {
    RectLayout layout;
    std::vector<int> turn_rects;
};

// Throws GeometryError if the layout does not contain exactly one rectangle
// equal to the winding rectangle.
ResolvedTurns resolve_turns(const RectLayout& layout, const FoilWinding& w);

// Inductance matrix of turns given as mesh groups: L[k][m] is the flux
// linkage of turn m with unit current spread uniformly over turn k.
// Throws GeometryError for repeated or empty turn groups.
Eigen::MatrixXd magnetostatic_inductances(const Mesh& mesh, const std::vector<int>& turn_groups,
                                          const RegionMaterials& materials,
                                          const SymmetryMode& symmetry);

// Series chain of turns k = 0..N-1 between terminal node 0 and grounded node
// N. Turn k carries R_k and the coupled inductances L; capacitance C_k acts
// between the mean potentials of turns k and k + 1.
struct LadderNetwork {
    Eigen::VectorXd R;
    Eigen::VectorXd C;
    Eigen::MatrixXd L;

    int turns() const { return static_cast<int>(R.size()); }
};

// Ladder of the winding in `layout`: per-turn resistances, parallel-plate
// gap capacitances and inductances from a resolved-turn mesh of size mesh_size.
struct ResolvedLadder {
    LadderNetwork net;
    int triangles = 0;
};

ResolvedLadder resolved_ladder(const RectLayout& layout, const FoilWinding& w, const FoilMaterials& foil,
                               const RegionMaterials& materials, const SymmetryMode& symmetry,
                               double mesh_size);

// Throws ConfigError unless R > 0, C > 0 with N - 1 entries and L symmetric N x N.
void validate(const LadderNetwork& net);

// Terminal impedance by complex nodal analysis; SolverError when singular.
std::complex<double> ladder_impedance(const LadderNetwork& net, double omega);

}  // namespace foilwind
