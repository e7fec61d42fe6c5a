#pragma once

// Gauss-Legendre (Newton on the three-term recurrence) and Gauss-Laguerre
// (Golub-Welsch on the symmetric Jacobi matrix) rules, plus affine maps and
// process-wide caches. Generation is deterministic bit-for-bit.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace lmfmm {

struct QuadratureRule {
	enum class Kind { legendre, laguerre };
	Kind kind;
	std::vector<double> nodes;
	std::vector<double> weights;
};

/// n-point rule on (-1,1), exact for polynomials of degree <= 2n-1.
inline QuadratureRule gauss_legendre(int n) {
	if (n < 1 || n > 4096) throw std::domain_error("gauss_legendre: n out of [1,4096]");
	QuadratureRule r{QuadratureRule::Kind::legendre, std::vector<double>(n), std::vector<double>(n)};
	const int half = (n + 1) / 2;
	for (int i = 0; i < half; ++i) {
		double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
		double pp = 0.0;
		for (int it = 0; it < 100; ++it) {
			double p0 = 1.0, p1 = x;
			if (n == 1) p1 = x; // recurrence below starts at degree 2
			for (int j = 2; j <= n; ++j) {
				const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
				p0 = p1;
				p1 = p2;
			}
			const double pn = (n == 1) ? x : p1;
			const double pm = (n == 1) ? 1.0 : p0;
			pp = n * (x * pn - pm) / (x * x - 1.0);
			const double dx = pn / pp;
			x -= dx;
			if (std::fabs(dx) < 1e-15) break;
		}
		r.nodes[i] = -x;
		r.nodes[n - 1 - i] = x;
		const double w = 2.0 / ((1.0 - x * x) * pp * pp);
		r.weights[i] = w;
		r.weights[n - 1 - i] = w;
	}
	if (n & 1) r.nodes[n / 2] = 0.0;
	return r;
}

namespace detail {

// Implicit-shift QL for a symmetric tridiagonal matrix, accumulating only the
// first row of the eigenvector matrix (all Golub-Welsch needs).
inline void tridiag_ql_firstrow(std::vector<double>& d, std::vector<double>& e,
                                std::vector<double>& z) {
	const int n = int(d.size());
	e.push_back(0.0);
	for (int l = 0; l < n; ++l) {
		int iter = 0;
		int m;
		do {
			for (m = l; m < n - 1; ++m) {
				const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
				if (std::fabs(e[m]) <= 1e-16 * dd) break;
			}
			if (m != l) {
				if (++iter > 60) throw std::runtime_error("gauss_laguerre: QL failed to converge");
				double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
				double rr = std::hypot(g, 1.0);
				g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::fabs(rr) : -std::fabs(rr)));
				double s = 1.0, c = 1.0, p = 0.0;
				for (int i = m - 1; i >= l; --i) {
					double f = s * e[i], b = c * e[i];
					rr = std::hypot(f, g);
					e[i + 1] = rr;
					if (rr == 0.0) {
						d[i + 1] -= p;
						e[m] = 0.0;
						break;
					}
					s = f / rr;
					c = g / rr;
					g = d[i + 1] - p;
					rr = (d[i] - g) * s + 2.0 * c * b;
					p = s * rr;
					d[i + 1] = g + p;
					g = c * rr - b;
					f = z[i + 1];
					z[i + 1] = s * z[i] + c * f;
					z[i] = c * z[i] - s * f;
				}
				if (rr == 0.0 && m - 1 >= l) continue;
				d[l] -= p;
				e[l] = g;
				e[m] = 0.0;
			}
		} while (m != l);
	}
}

} // namespace detail

namespace detail {

// Golub-Welsch data for the n-point Laguerre rule: nodes plus the first
// eigenvector components z0 (weights are z0^2).
inline void laguerre_eigen(int n, std::vector<double>& nodes, std::vector<double>& z0) {
	std::vector<double> d(n), e(n > 1 ? n - 1 : 0), z(n, 0.0);
	for (int i = 0; i < n; ++i) d[i] = 2.0 * i + 1.0;
	for (int i = 0; i + 1 < n; ++i) e[i] = double(i + 1);
	z[0] = 1.0;
	tridiag_ql_firstrow(d, e, z);
	std::vector<int> idx(n);
	for (int i = 0; i < n; ++i) idx[i] = i;
	std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
	nodes.resize(n);
	z0.resize(n);
	for (int i = 0; i < n; ++i) {
		nodes[i] = d[idx[i]];
		z0[i] = z[idx[i]];
	}
}

} // namespace detail

/// n-point rule for \int_0^inf e^{-t} f(t) dt, exact for deg f <= 2n-1. Sum of weights = 1.
inline QuadratureRule gauss_laguerre(int n) {
	if (n < 1 || n > 512) throw std::domain_error("gauss_laguerre: n out of [1,512]");
	std::vector<double> nodes, z0;
	detail::laguerre_eigen(n, nodes, z0);
	QuadratureRule r{QuadratureRule::Kind::laguerre, std::move(nodes), std::vector<double>(n)};
	for (int i = 0; i < n; ++i) r.weights[i] = z0[i] * z0[i]; // mu0 = 1
	return r;
}

/// Affine map of a Legendre rule from (-1,1) to (a,b); sum of weights becomes b-a.
inline QuadratureRule map_to_interval(const QuadratureRule& rule, double a, double b) {
	if (rule.kind != QuadratureRule::Kind::legendre)
		throw std::invalid_argument("map_to_interval: legendre rule required");
	if (!(a < b)) throw std::domain_error("map_to_interval: need a < b");
	QuadratureRule r = rule;
	const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
	for (size_t i = 0; i < r.nodes.size(); ++i) {
		r.nodes[i] = mid + hw * rule.nodes[i];
		r.weights[i] = hw * rule.weights[i];
	}
	return r;
}

/// Rescale a Laguerre rule to weight e^{-s t}: nodes t_i/s, weights w_i/s.
inline QuadratureRule scale_laguerre(const QuadratureRule& rule, double s) {
	if (rule.kind != QuadratureRule::Kind::laguerre)
		throw std::invalid_argument("scale_laguerre: laguerre rule required");
	if (!(s > 0.0)) throw std::domain_error("scale_laguerre: s must be > 0");
	QuadratureRule r = rule;
	for (size_t i = 0; i < r.nodes.size(); ++i) {
		r.nodes[i] = rule.nodes[i] / s;
		r.weights[i] = rule.weights[i] / s;
	}
	return r;
}

/// Laguerre rule with weights scaled by e^{+t_i}:  int_0^inf f(t) dt =
/// sum_i w~_i f(t_i) for f with e^{-t}-type decay. Computed via the
/// exponentially scaled polynomials L~_k = L_k e^{-t/2}, which satisfy the
/// same three-term recurrence, so no overflow occurs up to n = 512.
inline QuadratureRule gauss_laguerre_scaled(int n) {
	if (n < 1 || n > 512) throw std::domain_error("gauss_laguerre_scaled: n out of [1,512]");
	std::vector<double> nodes, z0;
	detail::laguerre_eigen(n, nodes, z0);
	QuadratureRule r{QuadratureRule::Kind::laguerre, std::move(nodes), std::vector<double>(n)};
	for (int i = 0; i < n; ++i) {
		// w e^{t} = (z0 e^{t/2})^2, assembled in log space; beyond the
		// representable range of z0 the integrand contribution is ~e^{-t/2.5}
		// scale anyway, so a zero weight is harmless
		const double lz = std::log(std::fabs(z0[i]));
		const double lw = 2.0 * (lz + 0.5 * r.nodes[i]);
		r.weights[i] = (z0[i] == 0.0) ? 0.0 : std::exp(lw);
	}
	return r;
}

/// Cached rules; immutable once built, safe to share across threads.
inline const QuadratureRule& cached_legendre(int n) {
	static std::map<int, QuadratureRule> cache;
	static std::mutex mtx;
	std::lock_guard<std::mutex> lock(mtx);
	auto it = cache.find(n);
	if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
	return it->second;
}

inline const QuadratureRule& cached_laguerre(int n) {
	static std::map<int, QuadratureRule> cache;
	static std::mutex mtx;
	std::lock_guard<std::mutex> lock(mtx);
	auto it = cache.find(n);
	if (it == cache.end()) it = cache.emplace(n, gauss_laguerre(n)).first;
	return it->second;
}

inline const QuadratureRule& cached_laguerre_scaled(int n) {
	static std::map<int, QuadratureRule> cache;
	static std::mutex mtx;
	std::lock_guard<std::mutex> lock(mtx);
	auto it = cache.find(n);
	if (it == cache.end()) it = cache.emplace(n, gauss_laguerre_scaled(n)).first;
	return it->second;
}

} // namespace lmfmm
