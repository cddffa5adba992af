#ifndef CRNSIM_GEOMETRY_HPP
#define CRNSIM_GEOMETRY_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "crnsim/errors.hpp"
#include "crnsim/rng.hpp"
#include "crnsim/specfun.hpp"

namespace crnsim {

// Distance law of the k-th nearest node of a planar Poisson field, expressed
// directly for the path-loss power d^alpha. delta_override replaces the
// U/alpha exponent ratio when a scenario pins it explicitly.
struct GeometrySpec {
    double density = 1.0;
    int dimension = 2;
    double pathloss_exp = 2.0;
    int order = 1;
    std::optional<double> delta_override;

    void validate() const {
        detail::check_positive(density, "density");
        detail::check_at_least_one(dimension, "dimension");
        detail::check_positive(pathloss_exp, "pathloss_exp");
        detail::check_at_least_one(order, "order");
        if (delta_override)
            detail::check_positive(*delta_override, "delta");
    }

    double delta() const {
        return delta_override ? *delta_override : dimension / pathloss_exp;
    }

    double effective_area() const { return detail::pi_const * density; }
};

inline double pathloss_pdf(double x, const GeometrySpec& spec) {
    spec.validate();
    detail::check_positive(x, "pathloss argument");
    const double d = spec.delta();
    const double area = spec.effective_area();
    const double k = spec.order;
    return d * std::exp(k * std::log(area) + (d * k - 1.0) * std::log(x)
                        - area * std::pow(x, d) - std::lgamma(k));
}

inline double sample_kth_pathloss(const GeometrySpec& spec, Rng& rng) {
    spec.validate();
    const double y = gamma_draw(rng, static_cast<double>(spec.order)) / spec.effective_area();
    return std::pow(y, 1.0 / spec.delta());
}

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Homogeneous Poisson field restricted to a square window centred on the
// origin, for empirical checks against the order-distance law.
inline std::vector<Point2> generate_hppp_window(double density, double side, Rng& rng) {
    detail::check_positive(density, "density");
    detail::check_positive(side, "side");
    const long long count = poisson_draw(rng, density * side * side);
    std::vector<Point2> points;
    points.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        Point2 pt;
        pt.x = (uniform_double(rng) - 0.5) * side;
        pt.y = (uniform_double(rng) - 0.5) * side;
        points.push_back(pt);
    }
    return points;
}

} // namespace crnsim

#endif
