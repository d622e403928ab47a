// Analytic Stokes solutions used to drive and measure the solver.
#pragma once

#include "polydg/quadrature.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace polydg {

using Vec2 = std::array<double, 2>;
/// Row-major 2x2 tensor, t[2*i + j] = d u_i / d x_j.
using Tensor2 = std::array<double, 4>;

struct ExactSolution {
    std::function<Vec2(Point2)> velocity;
    std::function<Tensor2(Point2)> velocity_gradient;
    std::function<double(Point2)> pressure;
    std::function<Vec2(Point2)> forcing;  ///< f = -mu Lap u + grad p
    std::function<Vec2(Point2)> boundary; ///< Dirichlet trace g
};

/// u = 0, p = 0, f = 0.
inline ExactSolution zero_solution()
{
    ExactSolution s;
    s.velocity = [](Point2) { return Vec2{0.0, 0.0}; };
    s.velocity_gradient = [](Point2) { return Tensor2{0.0, 0.0, 0.0, 0.0}; };
    s.pressure = [](Point2) { return 0.0; };
    s.forcing = s.velocity;
    s.boundary = s.velocity;
    return s;
}

/// Integral of a function over the unit square by a tensor Gauss rule.
inline double integrate_unit_square(const std::function<double(Point2)>& fn, int points_per_direction = 40)
{
    auto [x, w] = gauss_legendre(points_per_direction);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            sum += 0.25 * w[i] * w[j] * fn(Point2{0.5 * (x[i] + 1.0), 0.5 * (x[j] + 1.0)});
    return sum;
}

namespace detail {

// a(x) = x (x - 1) (x - 1/2)^2 and its derivatives
inline double quartic(double x) { return x * (x - 1.0) * (x - 0.5) * (x - 0.5); }
inline double quartic_d1(double x) { return (x - 0.5) * (4.0 * x * x - 4.0 * x + 0.5); }

} // namespace detail

/// Divergence-free trigonometric velocity with an exponential pressure on
/// the unit square:
///   u = (-cos 2pi x sin 2pi y, sin 2pi x cos 2pi y),
///   p = 1 - exp(-a(x) - a(y)) - mean,  a(t) = t (t - 1) (t - 1/2)^2.
/// The pressure mean over (0,1)^2 is removed so p has zero average.
inline ExactSolution manufactured_solution(double mu = 1.0)
{
    constexpr double tp = 2.0 * std::numbers::pi;
    auto raw_p = [](Point2 q) { return 1.0 - std::exp(-detail::quartic(q.x) - detail::quartic(q.y)); };
    const double mean = integrate_unit_square(raw_p, 60);

    ExactSolution s;
    s.velocity = [](Point2 q) {
        return Vec2{-std::cos(tp * q.x) * std::sin(tp * q.y), std::sin(tp * q.x) * std::cos(tp * q.y)};
    };
    s.velocity_gradient = [](Point2 q) {
        const double cx = std::cos(tp * q.x), sx = std::sin(tp * q.x);
        const double cy = std::cos(tp * q.y), sy = std::sin(tp * q.y);
        return Tensor2{tp * sx * sy, -tp * cx * cy, tp * cx * cy, -tp * sx * sy};
    };
    s.pressure = [raw_p, mean](Point2 q) { return raw_p(q) - mean; };
    s.forcing = [mu, vel = s.velocity](Point2 q) {
        // -Lap u = 8 pi^2 u, grad p = exp(-a(x) - a(y)) (a'(x), a'(y))
        const Vec2 u = vel(q);
        const double e = std::exp(-detail::quartic(q.x) - detail::quartic(q.y));
        const double k = 2.0 * tp * tp; // 8 pi^2
        return Vec2{mu * k * u[0] + e * detail::quartic_d1(q.x), mu * k * u[1] + e * detail::quartic_d1(q.y)};
    };
    s.boundary = s.velocity;
    return s;
}

} // namespace polydg
