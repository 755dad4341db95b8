#pragma once

// Sharp fractional Sobolev and isoperimetric constants.
//
// C_{n,s,p} = 2 int_0^1 r^(ps-1) |1 - r^((n-ps)/p)|^p phi(r) dr with
//   n = 1: phi(r) = (1 - r)^(-1-ps) + (1 + r)^(-1-ps)
//   n = 2: phi(r) = 2 int_0^pi (1 - 2 r cos t + r^2)^(-(2+ps)/2) dt
// and S_{n,s,p} = (p/p*) (n/omega_n)^(sp/n) / C_{n,s,p}, p* = np/(n - sp).

namespace fraclab {

/// H^{n-1} measure of the unit sphere: 2 for n = 1, 2 pi for n = 2.
double sphere_measure(int n);

/// |B_1| = omega_n / n.
double unit_ball_measure(int n);

/// Throws DomainError unless 0 < r < 1.
double phi(int n, double s, double p, double r);

struct ConstantValue {
    double value = 0.0;
    double error = 0.0;  // absolute quadrature error estimate
};

/// Throws ConfigError for inadmissible (n, s, p) and NumericalError (message
/// carries the estimate) when the relative error estimate exceeds 1e-6.
ConstantValue c_constant(int n, double s, double p);

double sobolev_constant(int n, double s, double p);

/// Per_s(B_R) = R^(n-s) |B_1|^((n-s)/n) / (2 S_{n,s,1}).
double ball_perimeter(int n, double s, double radius);

/// Radius with h_s(B_R) = 1. Computed as (2S)^(-1/s) |B_1|^(-1/n) and as
/// h_s(B_1)^(1/s); throws NumericalError if they disagree beyond 1e-10 relative.
double calibrable_radius(int n, double s);

struct SharpConstants {
    int n = 1;
    double s = 0.5;
    double p = 1.0;
    double c = 0.0;
    double c_error = 0.0;
    double sobolev = 0.0;
    double p_star = 0.0;
    double omega = 0.0;        // sphere measure
    double ball_measure = 0.0;
    double ball_perimeter_unit = 0.0;  // Per_s(B_1)
    double calibrable_radius = 0.0;
};

SharpConstants sharp_constants(int n, double s, double p);

}  // namespace fraclab
