#pragma once

// Branch-consistent square root w(lambda, k) = sqrt(lambda^2 - k^2) used by
// every Sommerfeld integrand, and the plane-wave power base
// z(lambda, k) = (lambda + w)/k with 1/z = (lambda - w)/k.
//
// Branch rule on the real axis: w real >= 0 for |lambda| >= k, and
// w = -i sqrt(k^2 - lambda^2) for |lambda| < k so that e^{-w y} is an
// outgoing propagating wave. Off the axis, w continues from the evanescent
// tails: principal sqrt(lambda-k)*sqrt(lambda+k) for Re lambda >= 0, and by
// evenness w(-lambda) = w(lambda) for Re lambda < 0. Re(w) >= 0 on the
// deformed contours used here.

#include <complex>

#include "lmfmm/geometry.hpp"

namespace lmfmm {

struct SqrtBranch {}; // tag; the rule itself is w_sqrt below

inline complexd w_sqrt(complexd lambda, double k) {
	if (lambda.imag() == 0.0) {
		const double l = lambda.real();
		if (std::fabs(l) >= k) return complexd(std::sqrt(l * l - k * k), 0.0);
		return complexd(0.0, -std::sqrt(k * k - l * l));
	}
	if (lambda.real() < 0.0) lambda = -lambda;
	return std::sqrt(lambda - k) * std::sqrt(lambda + k);
}

/// z = (lambda + w)/k; |z| = 1 in the propagating region, |z| > 1 on the
/// growing evanescent tail. The reciprocal (lambda - w)/k is exact 1/z.
inline complexd z_factor(complexd lambda, complexd w, double k) { return (lambda + w) / k; }

} // namespace lmfmm
