#pragma once

#include <Eigen/Core>

#include <vector>

#include "foilwind/bspline.hpp"
#include "foilwind/mesh.hpp"
#include "foilwind/winding.hpp"

namespace foilwind {

// Gauss-Legendre rule on [0, 1]: nodes and weights summing to one.
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int n);

// Collapsed (Duffy) tensor Gauss rule on the reference triangle with n points
// per direction; exact for polynomials of degree 2n - 1. Points are given as
// barycentric coordinates, weights as fractions of the triangle area.
struct TriangleRule {
    std::vector<Eigen::Vector3d> barycentric;
    std::vector<double> weights;
};

TriangleRule duffy_rule(int points_per_direction);

// Constant gradients of the three linear shape functions of triangle t.
Eigen::Matrix<double, 2, 3> shape_gradients(const Mesh& mesh, int t);

// Barycentric coordinates of p with respect to triangle t.
Eigen::Vector3d barycentric(const Mesh& mesh, int t, const Eigen::Vector2d& p);

struct WindingQuadPoint {
    int triangle = -1;
    Eigen::Vector3d bary;      // in the parent triangle
    Eigen::Vector2d position;
    double alpha = 0.0;
    int span = -1;             // knot index s with t_s < alpha < t_{s+1}
    double weight = 0.0;       // area weight
};

// Area quadrature over the winding: every FoilWinding triangle is clipped to
// the knot spans it overlaps, the pieces are fan-triangulated and integrated
// with duffy_rule(points_per_direction). Throws GeometryError if a
// FoilWinding triangle leaves the winding rectangle and ConfigError if the
// basis interval does not match the winding alpha extent.
std::vector<WindingQuadPoint> winding_quadrature(const Mesh& mesh, const FoilWinding& winding,
                                                 const BSplineBasisd& basis,
                                                 int points_per_direction = 4);

}  // namespace foilwind
