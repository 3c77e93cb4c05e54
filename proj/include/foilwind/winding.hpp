#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "foilwind/bspline.hpp"
#include "foilwind/homogenization.hpp"
#include "foilwind/mesh.hpp"

namespace foilwind {

// Local frame of a straight (Cartesian) or tube-type (axisymmetric) winding.
// e_beta is out of plane: z in Cartesian mode, phi in axisymmetric mode.
struct LocalFrame {
    Eigen::Vector2d e_alpha;
    Eigen::Vector2d e_gamma;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
};

// Foil winding of N turns occupying an axis-aligned rectangle of the mesh.
// alpha runs across the turns along mesh axis `alpha_axis` and is zero at the
// rectangle center, so the alpha interval is [-D/2, D/2].
struct FoilWinding {
    int turns = 0;
    double fill_factor = 0.0;
    LayoutRect rect;
    int alpha_axis = 0;

    double thickness() const { return alpha_axis == 0 ? rect.width() : rect.height(); }
    double height() const { return alpha_axis == 0 ? rect.height() : rect.width(); }
    double foil_thickness() const { return thickness() / turns; }
    double conductor_thickness() const { return fill_factor * foil_thickness(); }
    double insulation_thickness() const { return (1.0 - fill_factor) * foil_thickness(); }
    double alpha_min() const { return -0.5 * thickness(); }
    double alpha_max() const { return 0.5 * thickness(); }

    // Mesh coordinate along the alpha axis where alpha = 0.
    double alpha_origin() const;
    // Mesh coordinate along the alpha axis for a given alpha.
    double axis_coordinate(double alpha) const { return alpha_origin() + alpha; }

    LocalFrame frame() const;
};

// Throws GeometryError for N < 2, a fill factor outside (0, 1), an empty
// rectangle, or alpha_axis not in {0, 1}.
FoilWinding make_foil_winding(int turns, double fill_factor, const LayoutRect& rect, int alpha_axis = 0);

inline constexpr double winding_tolerance = 1e-12;  // m

bool inside_winding(const FoilWinding& w, const Eigen::Vector2d& p, double tol = winding_tolerance);

// Alpha coordinate of a point; DomainError outside the winding rectangle.
double local_alpha(const FoilWinding& w, const Eigen::Vector2d& p);

// Winding function chi as (in-plane, in-plane, out-of-plane) components:
// e_z / l_z (Cartesian) or e_phi / (2 pi r) (axisymmetric) inside, zero outside.
Eigen::Vector3d winding_function(const FoilWinding& w, const Eigen::Vector2d& p,
                                 const SymmetryMode& symmetry);

// xi_j = B_j(alpha(p)) inside the winding, 0 outside.
double voltage_basis_field(const BSplineBasisd& basis, int j, const FoilWinding& w,
                           const Eigen::Vector2d& p);

// Human-readable notes where thin-foil assumptions are violated: d_f > h/10,
// or d_c >= skin depth at `max_frequency` (skipped when max_frequency <= 0).
std::vector<std::string> assumption_warnings(const FoilWinding& w, const FoilMaterials& m,
                                             double max_frequency);

}  // namespace foilwind
