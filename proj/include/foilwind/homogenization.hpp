#pragma once

namespace foilwind {

// Constituent properties of one foil layer: conductor (c) and insulation (i).
struct FoilMaterials {
    double nu_c = 0.0;       // 1/(H m)
    double nu_i = 0.0;
    double sigma_c = 0.0;    // S/m
    double sigma_i = 0.0;
    double eps_c = 0.0;      // F/m, kept for completeness; the winding model only needs eps_i
    double eps_i = 0.0;
    double fill_factor = 0.0;
};

// Diagonal material tensors of the winding in its local (alpha, beta, gamma) frame.
// "perp" acts along alpha (across the turns), "par" along beta and gamma.
struct HomogenizedTensors {
    double nu_perp = 0.0;
    double nu_par = 0.0;
    double sigma_perp = 0.0;
    double sigma_par = 0.0;
    double eps_hom = 0.0;
};

// d_c / d_f. Throws GeometryError unless 0 < d_c < d_f.
double fill_factor(double conductor_thickness, double foil_thickness);

// Throws ConfigError when the FoilMaterials invariants do not hold.
void validate(const FoilMaterials& m);

HomogenizedTensors mix(const FoilMaterials& m);

// sqrt(2 / (omega mu sigma)). Throws DomainError for non-positive input.
double skin_depth(double frequency, double mu_c, double sigma_c);

}  // namespace foilwind
