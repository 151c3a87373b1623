#pragma once

#include "dendrite/core.hpp"

// Closed-form free response of a single segment's passive RC network after
// the reservoir capacitor has been charged to V0 and the transistor has
// switched off.  All voltages here are deviation coordinates: volts away
// from the segment's resting rail.  Use to_physical() to map onto node
// voltages.
//
// The governing system is the two-capacitor network
//
//   a * v_R'' + b * v_R' + c * v_R = 0,
//   v_M = v_R + R_A * C_R * v_R',
//
// with v_R(0) = V0 and v_M(0) = 0.  Note the membrane expansion uses the
// R_A*C_R factor on both exponential terms; this is the only form that
// satisfies the governing equations when R_A*C_R != R_L*C_M (the two forms
// coincide for symmetric components).

namespace dendrite {

struct CharacteristicCoeffs {
    double a = 0; // F^2 * ohm
    double b = 0; // F
    double c = 0; // 1/ohm
};

struct CharacteristicRoots {
    double lambda_plus = 0;  // slower root (smaller magnitude), 1/s
    double lambda_minus = 0; // faster root, 1/s
};

struct SolutionCoefficients {
    double d_plus = 0;  // volts
    double d_minus = 0; // volts
};

struct CharacteristicSolution {
    double a_coeff = 0;
    double b_coeff = 0;
    double c_coeff = 0;
    double lambda_plus = 0;
    double lambda_minus = 0;
    double d_plus = 0;
    double d_minus = 0;
    double v0 = 0;
};

/// a = R_A*C_R*C_M, b = C_R + C_M + C_R*R_A/R_L, c = 1/R_L.
CharacteristicCoeffs characteristic_coeffs(const SegmentParams& p);

/// Both roots are real and strictly negative for positive coefficients;
/// lambda_plus is the root with the smaller magnitude.  Throws
/// std::domain_error if the discriminant is not positive (impossible for
/// coefficients produced by characteristic_coeffs, so it indicates invalid
/// input).
CharacteristicRoots characteristic_roots(double a, double b, double c);

/// Coefficients satisfying v_R(0) = v0 and v_M(0) = 0; d_plus + d_minus = v0.
SolutionCoefficients solution_coefficients(double v0, const SegmentParams& p,
                                           const CharacteristicRoots& roots);

/// Convenience: coefficients, roots and solution coefficients in one step.
CharacteristicSolution solve_free_response(const SegmentParams& p, double v0);

/// v_R(t) = D+ exp(l+ t) + D- exp(l- t); v_R(0) = v0, decays to 0.
double reservoir_voltage(const CharacteristicSolution& sol, double t);

/// v_M(t) = (1 + R_A C_R l+) D+ exp(l+ t) + (1 + R_A C_R l-) D- exp(l- t);
/// starts at zero, a single interior peak, decays to 0.
double membrane_voltage(const CharacteristicSolution& sol, const SegmentParams& p, double t);

/// Maps a deviation voltage onto the physical node voltage:
/// n-type output dips below VDD, p-type output rises above 0.
double to_physical(double v_deviation, Polarity polarity, double vdd);

} // namespace dendrite
