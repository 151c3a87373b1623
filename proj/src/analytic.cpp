#include "dendrite/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace dendrite {

CharacteristicCoeffs characteristic_coeffs(const SegmentParams& p) {
    validate(p);
    CharacteristicCoeffs c;
    c.a = p.r_axial * p.c_reservoir * p.c_membrane;
    c.b = p.c_reservoir + p.c_membrane + p.c_reservoir * p.r_axial / p.r_leak;
    c.c = 1.0 / p.r_leak;
    return c;
}

CharacteristicRoots characteristic_roots(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw std::domain_error("characteristic_roots: coefficients must be positive");
    const double disc = b * b - 4.0 * a * c;
    if (!(disc > 0.0))
        throw std::domain_error("characteristic_roots: non-positive discriminant (degenerate network)");
    const double root = std::sqrt(disc);
    // -b + root loses precision when 4ac << b^2; compute the small root via
    // the product c/a instead.
    CharacteristicRoots r;
    r.lambda_minus = (-b - root) / (2.0 * a);
    r.lambda_plus = (c / a) / r.lambda_minus;
    return r;
}

SolutionCoefficients solution_coefficients(double v0, const SegmentParams& p,
                                           const CharacteristicRoots& roots) {
    validate(p);
    const double rc = p.r_axial * p.c_reservoir;
    // v0 / (1 - (1 + l+ rc)/(1 + l- rc)) with the difference carried out
    // algebraically; the naive quotient cancels badly when rc is small
    // against the root timescales.
    SolutionCoefficients out;
    out.d_plus = v0 * (1.0 + roots.lambda_minus * rc) /
                 (rc * (roots.lambda_minus - roots.lambda_plus));
    out.d_minus = v0 - out.d_plus; // equals -d_plus * (1 + l+ rc)/(1 + l- rc)
    return out;
}

CharacteristicSolution solve_free_response(const SegmentParams& p, double v0) {
    const CharacteristicCoeffs co = characteristic_coeffs(p);
    const CharacteristicRoots roots = characteristic_roots(co.a, co.b, co.c);
    const SolutionCoefficients d = solution_coefficients(v0, p, roots);
    return CharacteristicSolution{co.a, co.b, co.c, roots.lambda_plus, roots.lambda_minus,
                                  d.d_plus, d.d_minus, v0};
}

double reservoir_voltage(const CharacteristicSolution& sol, double t) {
    return sol.d_plus * std::exp(sol.lambda_plus * t) +
           sol.d_minus * std::exp(sol.lambda_minus * t);
}

double membrane_voltage(const CharacteristicSolution& sol, const SegmentParams& p, double t) {
    // (1 + rc l+) D+ e^{l+ t} + (1 + rc l-) D- e^{l- t}, factored so the
    // initial condition v_M(0) = 0 holds exactly instead of by cancellation
    // of two large terms.
    const double rc = p.r_axial * p.c_reservoir;
    const double gain = sol.v0 * (1.0 + rc * sol.lambda_plus) * (1.0 + rc * sol.lambda_minus) /
                        (rc * (sol.lambda_minus - sol.lambda_plus));
    return gain * (std::exp(sol.lambda_plus * t) - std::exp(sol.lambda_minus * t));
}

double to_physical(double v_deviation, Polarity polarity, double vdd) {
    return polarity == Polarity::NType ? vdd - v_deviation : v_deviation;
}

} // namespace dendrite
