#pragma once

#include <span>
#include <vector>

namespace hermrand {

inline constexpr int kDefaultMaxDegree = 4096;

// L2-normalized Hermite functions h_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi)),
// evaluated with the weighted three-term recurrence
//
//   h_{n+1}(x) = sqrt(2/(n+1)) x h_n(x) - sqrt(n/(n+1)) h_{n-1}(x).
//
// The Gaussian factor is carried as a separate binary exponent so that the
// recurrence never underflows inside the oscillatory region |x| < sqrt(2n+1),
// even where e^{-x^2/2} alone is below the double range. Beyond the turning
// point the values decay like exp(-x^2/2) and underflow to 0 harmlessly.

/// Value of h_n(x). Throws kDegreeOverflow if n > n_max, kNonFiniteInput if x is
/// not finite.
double hermite_function(int n, double x, int n_max = kDefaultMaxDegree);

/// h_0(x), ..., h_{n_max}(x) from a single upward pass. Entry k is bit-identical
/// to hermite_function(k, x).
std::vector<double> hermite_functions(int n_max, double x, int degree_limit = kDefaultMaxDegree);

/// Same as above, writing out.size() values (degrees 0..out.size()-1).
void hermite_functions(double x, std::span<double> out, int degree_limit = kDefaultMaxDegree);

/// h_n'(x) = sqrt(n/2) h_{n-1}(x) - sqrt((n+1)/2) h_{n+1}(x).
double hermite_function_derivative(int n, double x, int n_max = kDefaultMaxDegree);

/// sup_x |h_n(x)|, located by a grid scan around the outermost lobe followed by
/// golden-section refinement.
double hermite_sup_norm(int n);

}  // namespace hermrand
