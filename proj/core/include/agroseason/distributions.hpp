#ifndef AGROSEASON_DISTRIBUTIONS_HPP
#define AGROSEASON_DISTRIBUTIONS_HPP

namespace agroseason::dist {

// Standard normal CDF, machine precision via erfc.
double normal_cdf(double z);

// Upper tail P(Z > z).
double normal_sf(double z);

// Two-sided tail probability of |Z| >= |z|.
double normal_p_two_sided(double z);

// Standard normal quantile (inverse CDF), Wichura's PPND16 algorithm
// (Applied Statistics 37, 1988, algorithm AS 241). Accurate to ~1e-16
// over p in (0,1); p outside (0,1) returns +/-infinity at the ends and
// NaN otherwise.
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b), continued fraction
// evaluated with the modified Lentz method (cf. Numerical Recipes 6.4).
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with nu degrees of freedom:
// I_{nu/(nu+t^2)}(nu/2, 1/2).
double student_t_p_two_sided(double t, double nu);

} // namespace agroseason::dist

#endif
