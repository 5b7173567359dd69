#pragma once

namespace polytrain::stats {

// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

// P(F > f) for an F(df1, df2) variate.
double f_survival(double f, double df1, double df2);

// Two-sided P(|T| > |t|) for Student's t with `df` degrees of freedom.
double t_two_sided(double t, double df);

}  // namespace polytrain::stats
