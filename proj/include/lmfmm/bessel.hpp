#pragma once

// Integer-order Bessel functions J_p, Y_p and the Hankel function H_p^(1).
// J by Miller's backward recurrence with sum normalization; Y by forward
// recurrence seeded with series (small x) or asymptotic amplitude/phase
// expansions (large x) at orders 0 and 1.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmfmm/geometry.hpp"

namespace lmfmm {

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

// P/Q amplitude-phase asymptotic series for nu = 0, 1; valid x >= 9.
// J_nu = sqrt(2/(pi x)) (P cos chi - Q sin chi), Y_nu = sqrt(2/(pi x)) (P sin chi + Q cos chi),
// chi = x - (nu/2 + 1/4) pi. Terms summed until they stop decreasing.
inline void bessel_pq(int nu, double x, double& P, double& Q) {
	const double mu = 4.0 * nu * nu;
	const double ix8 = 1.0 / (8.0 * x);
	P = 1.0;
	Q = 0.0;
	double term = 1.0;
	double prev = std::numeric_limits<double>::max();
	for (int m = 1; m < 40; ++m) {
		const double f = (mu - (2 * m - 1) * (2 * m - 1)) * ix8 / m;
		term *= f;
		const double mag = std::fabs(term);
		if (mag >= prev) break; // asymptotic series turned around
		prev = mag;
		if (m % 2 == 1) {
			Q += (((m - 1) / 2) % 2 == 0) ? term : -term;
		} else {
			P += ((m / 2) % 2 == 0) ? term : -term;
		}
		if (mag < 1e-18) break;
	}
}

inline double j01_large(int nu, double x) {
	double P, Q;
	bessel_pq(nu, x, P, Q);
	const double chi = x - (0.5 * nu + 0.25) * M_PI;
	return std::sqrt(2.0 / (M_PI * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

inline double y01_large(int nu, double x) {
	double P, Q;
	bessel_pq(nu, x, P, Q);
	const double chi = x - (0.5 * nu + 0.25) * M_PI;
	return std::sqrt(2.0 / (M_PI * x)) * (P * std::sin(chi) + Q * std::cos(chi));
}

inline double j0_series(double x) {
	const double q = 0.25 * x * x;
	double term = 1.0, sum = 1.0;
	for (int m = 1; m < 60; ++m) {
		term *= -q / (double(m) * m);
		sum += term;
		if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
	}
	return sum;
}

inline double j1_series(double x) {
	const double q = 0.25 * x * x;
	double term = 0.5 * x, sum = term;
	for (int m = 1; m < 60; ++m) {
		term *= -q / (double(m) * (m + 1));
		sum += term;
		if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
	}
	return sum;
}

// Y_0, Y_1 ascending series (Abramowitz & Stegun 9.1.13); x <= 9.
inline double y0_series(double x) {
	const double q = 0.25 * x * x;
	double term = 1.0, sum = 0.0, h = 0.0;
	for (int m = 1; m < 60; ++m) {
		term *= -q / (double(m) * m);
		h += 1.0 / m;
		sum += -term * h; // (-1)^{m+1} H_m q^m/(m!)^2 with sign folded into term
		if (std::fabs(term) < 1e-18) break;
	}
	return (2.0 / M_PI) * ((std::log(0.5 * x) + euler_gamma) * j0_series(x) + sum);
}

inline double y1_series(double x) {
	const double q = 0.25 * x * x;
	double term = 0.5 * x, sum = 0.0;
	double h = 1.0; // H_m + H_{m+1} accumulates below
	// sum_{m>=0} (-1)^m (H_m + H_{m+1}) (x/2)^{2m+1}/(m! (m+1)!)
	sum += term * h;
	for (int m = 1; m < 60; ++m) {
		term *= -q / (double(m) * (m + 1));
		h += 1.0 / m + 1.0 / (m + 1);
		sum += term * h;
		if (std::fabs(term) < 1e-18) break;
	}
	return (2.0 / M_PI) * (std::log(0.5 * x) + euler_gamma) * j1_series(x) - 2.0 / (M_PI * x) -
	       sum / M_PI;
}

} // namespace detail

/// J_0..J_nmax at real x >= 0 via Miller backward recurrence. out has nmax+1 slots.
inline void bessel_j_array(int nmax, double x, double* out) {
	if (nmax < 0 || x < 0.0 || !std::isfinite(x))
		throw std::domain_error("bessel_j_array: need nmax >= 0, x >= 0");
	if (x == 0.0) {
		out[0] = 1.0;
		for (int p = 1; p <= nmax; ++p) out[p] = 0.0;
		return;
	}
	const int top = std::max(nmax, int(x) + 1);
	int m = top + 16 + int(2.0 * std::sqrt(double(top)));
	m += m & 1; // even start keeps the normalization sum aligned
	double fp = 0.0, fc = 1e-30, sum = 0.0;
	for (int p = m; p >= 1; --p) {
		double fm = (2.0 * p / x) * fc - fp;
		fp = fc;
		fc = fm;
		if (p - 1 <= nmax) out[p - 1] = fc;
		if (((p - 1) & 1) == 0) sum += (p == 1) ? fc : 2.0 * fc;
		if (std::fabs(fc) > 1e280) { // rescale to dodge overflow
			const double s = 1e-280;
			fc *= s;
			fp *= s;
			sum *= s;
			for (int q = std::min(p - 1, nmax); q <= nmax; ++q) out[q] *= s;
		}
	}
	if (sum == 0.0 || !std::isfinite(sum))
		throw std::runtime_error("bessel_j_array: Miller recurrence failed at x=" + std::to_string(x));
	const double norm = 1.0 / sum;
	for (int p = 0; p <= nmax; ++p) out[p] *= norm;
}

/// J_p(x) for integer p (any sign), x >= 0.
inline double bessel_j(int p, double x) {
	const int ap = p < 0 ? -p : p;
	if (ap > 10000) throw std::domain_error("bessel_j: |p| > 1e4 unsupported");
	std::vector<double> buf(ap + 1);
	bessel_j_array(ap, x, buf.data());
	double v = buf[ap];
	if (p < 0 && (ap & 1)) v = -v;
	return v;
}

inline double bessel_y0(double x) {
	if (!(x > 0.0)) throw std::domain_error("bessel_y0: x must be > 0");
	return x < 9.0 ? detail::y0_series(x) : detail::y01_large(0, x);
}

inline double bessel_y1(double x) {
	if (!(x > 0.0)) throw std::domain_error("bessel_y1: x must be > 0");
	return x < 9.0 ? detail::y1_series(x) : detail::y01_large(1, x);
}

/// Y_0..Y_nmax at x > 0. Forward recurrence (stable upward for Y).
inline void bessel_y_array(int nmax, double x, double* out) {
	out[0] = bessel_y0(x);
	if (nmax >= 1) out[1] = bessel_y1(x);
	for (int p = 1; p < nmax; ++p) {
		out[p + 1] = (2.0 * p / x) * out[p] - out[p - 1];
		if (!std::isfinite(out[p + 1]))
			throw std::runtime_error("bessel_y_array: overflow at order " + std::to_string(p + 1) +
			                         ", x=" + std::to_string(x));
	}
}

/// H_p^{(1)}(x) = J_p(x) + i Y_p(x), x > 0, integer p (any sign).
inline complexd hankel1(int p, double x) {
	if (!(x > 0.0)) throw std::domain_error("hankel1: x must be > 0");
	const int ap = p < 0 ? -p : p;
	std::vector<double> j(ap + 1), y(ap + 1);
	bessel_j_array(ap, x, j.data());
	bessel_y_array(ap, x, y.data());
	complexd v(j[ap], y[ap]);
	if (p < 0 && (ap & 1)) v = -v;
	return v;
}

/// Allocation-free H_0^{(1)}(x); the hot path of free-space direct sums.
inline complexd hankel0(double x) {
	if (!(x > 0.0)) throw std::domain_error("hankel0: x must be > 0");
	if (x < 9.0) return complexd(detail::j0_series(x), detail::y0_series(x));
	return complexd(detail::j01_large(0, x), detail::y01_large(0, x));
}

/// One-term large-order form J_p(z) ~ (1/sqrt(2 pi p)) (e z / 2p)^p. Saturates to 0 on underflow.
inline double bessel_j_asymptotic(int p, double z) {
	if (p < 1) throw std::domain_error("bessel_j_asymptotic: p >= 1 required");
	if (z == 0.0) return 0.0;
	const double lg = -0.5 * std::log(2.0 * M_PI * p) + p * std::log(std::exp(1.0) * z / (2.0 * p));
	if (lg < -745.0) return 0.0;
	return std::exp(lg);
}

} // namespace lmfmm
