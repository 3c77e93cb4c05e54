#include "foilwind/homogenization.hpp"

#include <cmath>
#include <string>

#include "foilwind/constants.hpp"
#include "foilwind/errors.hpp"

namespace foilwind {

double fill_factor(double conductor_thickness, double foil_thickness) {
    if (!(conductor_thickness > 0.0) || !(conductor_thickness < foil_thickness)) {
        throw GeometryError("fill factor needs 0 < d_c < d_f");
    }
    return conductor_thickness / foil_thickness;
}

void validate(const FoilMaterials& m) {
    if (!(m.fill_factor > 0.0 && m.fill_factor < 1.0)) {
        throw ConfigError("fill factor must lie in (0, 1), got " + std::to_string(m.fill_factor));
    }
    if (!(m.sigma_c > 0.0)) {
        throw ConfigError("conductor conductivity must be positive");
    }
    if (m.sigma_i != 0.0) {
        throw ConfigError("insulation conductivity must be zero");
    }
    if (!(m.nu_c > 0.0) || !(m.nu_i > 0.0)) {
        throw ConfigError("reluctivities must be positive");
    }
    if (!(m.eps_i > 0.0)) {
        throw ConfigError("insulation permittivity must be positive");
    }
}

HomogenizedTensors mix(const FoilMaterials& m) {
    validate(m);
    const double lam = m.fill_factor;
    HomogenizedTensors t;
    t.nu_perp = lam * m.nu_c + (1.0 - lam) * m.nu_i;
    t.nu_par = 1.0 / (lam / m.nu_c + (1.0 - lam) / m.nu_i);
    // Series connection through a perfect insulator carries no current.
    t.sigma_perp = 0.0;
    t.sigma_par = lam * m.sigma_c + (1.0 - lam) * m.sigma_i;
    t.eps_hom = m.eps_i / (1.0 - lam);
    return t;
}

double skin_depth(double frequency, double mu_c, double sigma_c) {
    if (!(frequency > 0.0) || !(mu_c > 0.0) || !(sigma_c > 0.0)) {
        throw DomainError("skin depth needs positive frequency, permeability and conductivity");
    }
    const double omega = 2.0 * pi * frequency;
    return std::sqrt(2.0 / (omega * mu_c * sigma_c));
}

}  // namespace foilwind
