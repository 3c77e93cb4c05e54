#include "foilwind/winding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "foilwind/constants.hpp"
#include "foilwind/errors.hpp"

namespace foilwind {

double FoilWinding::alpha_origin() const {
    return alpha_axis == 0 ? 0.5 * (rect.x0 + rect.x1) : 0.5 * (rect.y0 + rect.y1);
}

LocalFrame FoilWinding::frame() const {
    LocalFrame f;
    f.e_alpha = alpha_axis == 0 ? Eigen::Vector2d::UnitX() : Eigen::Vector2d::UnitY();
    f.e_gamma = alpha_axis == 0 ? Eigen::Vector2d::UnitY() : Eigen::Vector2d::UnitX();
    f.alpha_min = alpha_min();
    f.alpha_max = alpha_max();
    return f;
}

FoilWinding make_foil_winding(int turns, double fill_factor, const LayoutRect& rect, int alpha_axis) {
    if (turns < 2) {
        throw GeometryError("foil winding needs at least 2 turns");
    }
    if (!(fill_factor > 0.0 && fill_factor < 1.0)) {
        throw GeometryError("fill factor must lie in (0, 1)");
    }
    if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) {
        throw GeometryError("winding rectangle must have positive extent");
    }
    if (alpha_axis != 0 && alpha_axis != 1) {
        throw GeometryError("alpha axis must be 0 or 1");
    }
    FoilWinding w;
    w.turns = turns;
    w.fill_factor = fill_factor;
    w.rect = rect;
    w.rect.region = Region::FoilWinding;
    w.alpha_axis = alpha_axis;
    return w;
}

bool inside_winding(const FoilWinding& w, const Eigen::Vector2d& p, double tol) {
    return p.x() >= w.rect.x0 - tol && p.x() <= w.rect.x1 + tol && p.y() >= w.rect.y0 - tol &&
           p.y() <= w.rect.y1 + tol;
}

double local_alpha(const FoilWinding& w, const Eigen::Vector2d& p) {
    if (!inside_winding(w, p)) {
        throw DomainError("point lies outside the foil winding");
    }
    const double alpha = p(w.alpha_axis) - w.alpha_origin();
    return std::clamp(alpha, w.alpha_min(), w.alpha_max());
}

Eigen::Vector3d winding_function(const FoilWinding& w, const Eigen::Vector2d& p,
                                 const SymmetryMode& symmetry) {
    if (!inside_winding(w, p)) {
        return Eigen::Vector3d::Zero();
    }
    if (symmetry.is_axisymmetric()) {
        if (!(p.x() > 0.0)) {
            throw GeometryError("winding point on or beyond the symmetry axis");
        }
        return Eigen::Vector3d(0.0, 0.0, 1.0 / (2.0 * pi * p.x()));
    }
    return Eigen::Vector3d(0.0, 0.0, 1.0 / symmetry.length_z());
}

double voltage_basis_field(const BSplineBasisd& basis, int j, const FoilWinding& w,
                           const Eigen::Vector2d& p) {
    if (!inside_winding(w, p)) {
        return 0.0;
    }
    return basis.eval(j, local_alpha(w, p));
}

std::vector<std::string> assumption_warnings(const FoilWinding& w, const FoilMaterials& m,
                                             double max_frequency) {
    std::vector<std::string> notes;
    if (w.foil_thickness() > w.height() / 10.0) {
        std::ostringstream os;
        os << "foil thickness " << w.foil_thickness() << " m is not small against the winding height "
           << w.height() << " m";
        notes.push_back(os.str());
    }
    if (max_frequency > 0.0 && m.nu_c > 0.0 && m.sigma_c > 0.0) {
        const double delta = skin_depth(max_frequency, 1.0 / m.nu_c, m.sigma_c);
        if (w.conductor_thickness() >= delta) {
            std::ostringstream os;
            os << "conductor thickness " << w.conductor_thickness() << " m reaches the skin depth "
               << delta << " m at " << max_frequency << " Hz";
            notes.push_back(os.str());
        }
    }
    return notes;
}

}  // namespace foilwind
