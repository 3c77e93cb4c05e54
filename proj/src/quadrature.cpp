#include "foilwind/quadrature.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>
#include <map>
#include <mutex>

#include "foilwind/constants.hpp"
#include "foilwind/errors.hpp"

namespace foilwind {

GaussRule gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("Gauss rule needs at least one point");
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n starting from the Chebyshev-like guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 1 ? x : p1;
            const double pn1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes(n - 1 - i) = 0.5 * (x + 1.0);
        rule.weights(n - 1 - i) = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

TriangleRule duffy_rule(int points_per_direction) {
    static std::mutex mutex;
    static std::map<int, TriangleRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(points_per_direction);
    if (it != cache.end()) {
        return it->second;
    }
    const GaussRule g = gauss_legendre(points_per_direction);
    TriangleRule rule;
    for (int i = 0; i < points_per_direction; ++i) {
        const double u = g.nodes(i);
        for (int j = 0; j < points_per_direction; ++j) {
            const double v = g.nodes(j);
            const double xi = u;
            const double eta = v * (1.0 - u);
            rule.barycentric.emplace_back(1.0 - xi - eta, xi, eta);
            // reference area is 1/2, so the area fraction doubles the Jacobian weight
            rule.weights.push_back(2.0 * g.weights(i) * g.weights(j) * (1.0 - u));
        }
    }
    cache.emplace(points_per_direction, rule);
    return rule;
}

Eigen::Matrix<double, 2, 3> shape_gradients(const Mesh& mesh, int t) {
    const Eigen::Vector2d a = mesh.node(mesh.triangles(0, t));
    const Eigen::Vector2d b = mesh.node(mesh.triangles(1, t));
    const Eigen::Vector2d c = mesh.node(mesh.triangles(2, t));
    const double two_area = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    Eigen::Matrix<double, 2, 3> g;
    g << b.y() - c.y(), c.y() - a.y(), a.y() - b.y(),
         c.x() - b.x(), a.x() - c.x(), b.x() - a.x();
    return g / two_area;
}

Eigen::Vector3d barycentric(const Mesh& mesh, int t, const Eigen::Vector2d& p) {
    const Eigen::Vector2d a = mesh.node(mesh.triangles(0, t));
    Eigen::Matrix2d J;
    J.col(0) = mesh.node(mesh.triangles(1, t)) - a;
    J.col(1) = mesh.node(mesh.triangles(2, t)) - a;
    const Eigen::Vector2d l = J.inverse() * (p - a);
    return {1.0 - l.x() - l.y(), l.x(), l.y()};
}

namespace {

using Polygon = std::vector<Eigen::Vector2d>;

// Keeps the part of `poly` with sign * (p(axis) - value) >= 0.
Polygon clip(const Polygon& poly, int axis, double value, double sign) {
    Polygon out;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d& p = poly[k];
        const Eigen::Vector2d& q = poly[(k + 1) % n];
        const double fp = sign * (p(axis) - value);
        const double fq = sign * (q(axis) - value);
        if (fp >= 0.0) {
            out.push_back(p);
        }
        if ((fp > 0.0 && fq < 0.0) || (fp < 0.0 && fq > 0.0)) {
            const double s = fp / (fp - fq);
            Eigen::Vector2d x = p + s * (q - p);
            x(axis) = value;
            out.push_back(x);
        }
    }
    return out;
}

double polygon_area(const Polygon& poly) {
    double a = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

}  // namespace

std::vector<WindingQuadPoint> winding_quadrature(const Mesh& mesh, const FoilWinding& winding,
                                                 const BSplineBasisd& basis,
                                                 int points_per_direction) {
    const double extent_tol = 1e-12 * std::max(1.0, winding.thickness());
    if (std::abs(basis.lower() - winding.alpha_min()) > extent_tol ||
        std::abs(basis.upper() - winding.alpha_max()) > extent_tol) {
        throw ConfigError("voltage-function basis interval does not match the winding alpha extent");
    }
    const TriangleRule rule = duffy_rule(points_per_direction);
    const int axis = winding.alpha_axis;
    const double origin = winding.alpha_origin();

    std::vector<WindingQuadPoint> points;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.regions[static_cast<std::size_t>(t)] != Region::FoilWinding) {
            continue;
        }
        Polygon tri;
        double amin = std::numeric_limits<double>::max();
        double amax = std::numeric_limits<double>::lowest();
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector2d p = mesh.node(mesh.triangles(k, t));
            if (!inside_winding(winding, p)) {
                throw GeometryError("foil winding triangle " + std::to_string(t) +
                                    " leaves the winding rectangle");
            }
            tri.push_back(p);
            amin = std::min(amin, p(axis) - origin);
            amax = std::max(amax, p(axis) - origin);
        }
        const double tri_area = mesh.signed_area(t);

        for (int s = 0; s < basis.num_spans(); ++s) {
            const auto [lo, hi] = basis.span_bounds(s);
            if (hi <= amin || lo >= amax) {
                continue;
            }
            Polygon piece = tri;
            if (lo > amin) piece = clip(piece, axis, origin + lo, 1.0);
            if (hi < amax) piece = clip(piece, axis, origin + hi, -1.0);
            if (piece.size() < 3 || polygon_area(piece) <= 1e-14 * tri_area) {
                continue;
            }
            for (std::size_t k = 1; k + 1 < piece.size(); ++k) {
                const Eigen::Vector2d& a = piece[0];
                const Eigen::Vector2d& b = piece[k];
                const Eigen::Vector2d& c = piece[k + 1];
                const double sub_area =
                    0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
                if (sub_area <= 1e-14 * tri_area) {
                    continue;
                }
                for (std::size_t q = 0; q < rule.weights.size(); ++q) {
                    const Eigen::Vector3d& l = rule.barycentric[q];
                    WindingQuadPoint qp;
                    qp.triangle = t;
                    qp.position = l(0) * a + l(1) * b + l(2) * c;
                    qp.bary = barycentric(mesh, t, qp.position);
                    qp.alpha = qp.position(axis) - origin;
                    qp.span = s + BSplineBasisd::degree;
                    qp.weight = rule.weights[q] * sub_area;
                    points.push_back(qp);
                }
            }
        }
    }
    return points;
}

}  // namespace foilwind
