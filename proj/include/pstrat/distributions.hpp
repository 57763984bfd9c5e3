#pragma once

namespace pstrat::dist {

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
// Continued fraction (modified Lentz) on whichever of I_x(a,b) or
// 1 - I_{1-x}(b,a) converges faster; relative tolerance 1e-15.
double incomplete_beta(double a, double b, double x);

// Upper tail P(T > t) of Student's t with df > 0 degrees of freedom
// (df may be fractional, as in Welch's test).
double student_t_upper(double t, double df);
double student_t_cdf(double t, double df);

// Upper tail P(Z > z) of the standard normal.
double normal_upper(double z);
double normal_cdf(double z);

}  // namespace pstrat::dist
