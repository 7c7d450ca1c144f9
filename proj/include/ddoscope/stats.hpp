#pragma once

namespace ddoscope::stats {

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a Student t statistic with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

}  // namespace ddoscope::stats
