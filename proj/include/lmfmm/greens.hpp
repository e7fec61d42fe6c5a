#pragma once

// Catalog of layered-media kernels in the canonical spectral form
//
//   g(x, x0) = int_R e^{i lambda X} e^{-w_K(lambda) a - w_K0(lambda) b}
//              sigma(lambda) / (4 pi w_K(lambda)) d lambda
//
// with X = x - x0, a = target_orient*y + offset_d, b = sign<0 ? y0 : -y0.
// Every family stores its image term sigma(lambda), which tends to a finite
// constant sigma_inf as lambda -> +-inf.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmfmm/bessel.hpp"
#include "lmfmm/geometry.hpp"
#include "lmfmm/spectral.hpp"

namespace lmfmm {

struct SigmaFunction {
	std::function<complexd(complexd)> eval;
	complexd sigma_inf{1.0, 0.0};
	complexd operator()(complexd lambda) const { return eval(lambda); }
};

struct ThreeLayerParams {
	double k1, k2, k3; // wavenumbers per layer, interfaces at y=0 and y=-d
	double d;
	void validate() const {
		if (!(k1 > 0 && k2 > 0 && k3 > 0 && d > 0))
			throw std::domain_error("ThreeLayerParams: wavenumbers and d must be positive");
	}
};

struct ThreeLayerSigmas {
	complexd s1, s2t, s2b, s3;
};

namespace detail {

struct ThreeLayerRadicals {
	complexd w1, w2, w3, E; // E = e^{-d w2}
	complexd l2;
};

inline ThreeLayerRadicals three_layer_radicals(complexd lam, const ThreeLayerParams& p) {
	ThreeLayerRadicals r;
	r.w1 = w_sqrt(lam, p.k1);
	r.w2 = w_sqrt(lam, p.k2);
	r.w3 = w_sqrt(lam, p.k3);
	r.E = std::exp(-p.d * r.w2);
	r.l2 = lam * lam;
	return r;
}

} // namespace detail

/// Closed-form (sigma1, sigma2t, sigma2b, sigma3) for the three-layer medium.
/// Evaluated in the e^{-d w2}-scaled form, so no hyperbolic overflow occurs for
/// large |lambda|; the displayed e^{+d w} factors of sigma2b and sigma3 are
/// reinstated exactly.
inline ThreeLayerSigmas sigma_three_layer_closed(complexd lam, const ThreeLayerParams& p) {
	p.validate();
	const auto r = detail::three_layer_radicals(lam, p);
	const complexd E2 = r.E * r.E;
	const complexd XD = r.l2 + r.w1 * r.w3 - p.k2 * p.k2;
	const complexd X1 = -r.l2 + r.w1 * r.w3 + p.k2 * p.k2;
	const complexd X2 = r.l2 + r.w2 * r.w3 - p.k2 * p.k2;
	const complexd X3 = -r.l2 + r.w2 * r.w3 + p.k2 * p.k2;
	// den = 2 e^{-d w2} * [sinh(d w2) XD + w2 (w1+w3) cosh(d w2)]
	const complexd den = (1.0 - E2) * XD + r.w2 * (r.w1 + r.w3) * (1.0 + E2);
	const double scale = std::abs(r.l2) + p.k2 * p.k2 + std::abs(r.w2 * (r.w1 + r.w3));
	if (std::abs(den) < 1e-12 * scale)
		throw std::runtime_error("sigma_three_layer: near-singular denominator at lambda=(" +
		                         std::to_string(lam.real()) + "," + std::to_string(lam.imag()) + ")");
	ThreeLayerSigmas s;
	s.s1 = ((1.0 - E2) * X1 + r.w2 * (r.w1 - r.w3) * (1.0 + E2)) / den;
	s.s2t = 2.0 * X2 / den;
	s.s2b = -2.0 * X3 / den;
	// e^{-d(w2-w3)} via the quotient form; w2 - w3 stays bounded as lambda -> inf
	const complexd w2mw3 = (p.k3 * p.k3 - p.k2 * p.k2) / (r.w2 + r.w3);
	s.s3 = 4.0 * r.w2 * r.w3 * std::exp(-p.d * w2mw3) / den;
	return s;
}

/// Same quantities via the paper's literal 4x4 interface system with right-hand
/// side (1,0,1,0)^T. The system's third and fourth unknowns are the scaled
/// densities e^{-d w2} sigma2b and e^{-d w3} sigma3; they are unscaled before
/// returning so the result matches sigma_three_layer_closed.
inline ThreeLayerSigmas sigma_three_layer_solve(complexd lam, const ThreeLayerParams& p) {
	p.validate();
	const auto r = detail::three_layer_radicals(lam, p);
	complexd A[4][5] = {
	    {-1.0, r.w1 / r.w2, r.E * r.w1 / r.w2, 0.0, 1.0},
	    {0.0, r.E, 1.0, -r.w2 / r.w3, 0.0},
	    {1.0, 1.0, -r.E, 0.0, 1.0},
	    {0.0, r.E, -1.0, -1.0, 0.0},
	};
	// Gaussian elimination with partial pivoting
	for (int c = 0; c < 4; ++c) {
		int piv = c;
		for (int rr = c + 1; rr < 4; ++rr)
			if (std::abs(A[rr][c]) > std::abs(A[piv][c])) piv = rr;
		if (std::abs(A[piv][c]) < 1e-14)
			throw std::runtime_error("sigma_three_layer_solve: singular system at lambda=(" +
			                         std::to_string(lam.real()) + "," + std::to_string(lam.imag()) +
			                         ")");
		if (piv != c)
			for (int j = c; j < 5; ++j) std::swap(A[c][j], A[piv][j]);
		for (int rr = c + 1; rr < 4; ++rr) {
			const complexd f = A[rr][c] / A[c][c];
			for (int j = c; j < 5; ++j) A[rr][j] -= f * A[c][j];
		}
	}
	complexd x[4];
	for (int rr = 3; rr >= 0; --rr) {
		complexd acc = A[rr][4];
		for (int j = rr + 1; j < 4; ++j) acc -= A[rr][j] * x[j];
		x[rr] = acc / A[rr][rr];
	}
	const complexd w2mw3 = (p.k3 * p.k3 - p.k2 * p.k2) / (r.w2 + r.w3);
	ThreeLayerSigmas s;
	s.s1 = x[0];
	s.s2t = x[1];
	s.s2b = x[2] / r.E;
	s.s3 = x[3] * std::exp(-p.d * w2mw3) / r.E; // = x[3] e^{+d w3}, overflow-safe
	return s;
}

enum class KernelFamily { free_space, dirichlet_scattered, impedance_scattered, three_layer };
enum class ThreeLayerComponent { s1, s2t, s2b, s3 };

inline const char* family_name(KernelFamily f) {
	switch (f) {
		case KernelFamily::free_space: return "free";
		case KernelFamily::dirichlet_scattered: return "dirichlet";
		case KernelFamily::impedance_scattered: return "impedance";
		case KernelFamily::three_layer: return "three-layer";
	}
	return "?";
}

struct KernelSpec {
	KernelFamily family = KernelFamily::free_space;
	ThreeLayerComponent component = ThreeLayerComponent::s1;
	double k_target = 1.0;
	double k_source = 1.0;
	double offset_d = 0.0;   // canonical offset folded into the target exponent
	int sign = +1;           // sign on sqrt(lambda^2-k0^2) y0 in the source term
	int target_orient = +1;  // -1 when the target exponent is e^{+w y} (g2t, g3)
	SigmaFunction sigma;
	double alpha = 0.0;          // impedance parameter
	ThreeLayerParams tl{1, 1, 1, 1};

	double k_max() const { return std::max(k_target, k_source); }
	double k_min() const { return std::min(k_target, k_source); }

	/// Sorted distinct wavenumbers of every radical in the integrand (the
	/// integration path must break at each: sqrt kinks live there).
	std::vector<double> wavenumbers() const {
		std::vector<double> ks{k_target, k_source};
		if (family == KernelFamily::three_layer) {
			ks.push_back(tl.k1);
			ks.push_back(tl.k2);
			ks.push_back(tl.k3);
		}
		std::sort(ks.begin(), ks.end());
		ks.erase(std::unique(ks.begin(), ks.end(),
		                     [](double a, double b) { return std::fabs(a - b) <= 1e-12 * b; }),
		         ks.end());
		return ks;
	}

	/// Effective target-side height a(y); must be >= 0 for admissible targets.
	double target_height(double y) const { return target_orient * y + offset_d; }
	/// Effective source-side height b(y0).
	double source_height(double y0) const { return sign < 0 ? y0 : -y0; }
};

/// Canonical integrand geometry for a single (target, source) pair.
struct CanonicalGeometry {
	double X; // horizontal separation x - x0
	double a; // target-side effective height
	double b; // source-side effective height
	double vertical() const { return a + b; }
	double rho() const { return std::hypot(X, a + b); }
};

/// Validates layer membership and integrability; for the free-space family the
/// y -> -y reflection symmetry folds y-y0 < 0 into the canonical orientation.
inline CanonicalGeometry canonical_geometry(const KernelSpec& s, Point2 x, Point2 x0) {
	CanonicalGeometry g{x.x - x0.x, 0.0, 0.0};
	switch (s.family) {
		case KernelFamily::free_space: {
			const double dy = x.y - x0.y;
			g.a = std::fabs(dy);
			g.b = 0.0;
			if (g.a == 0.0 && g.X == 0.0)
				throw std::domain_error("eval_kernel: coincident source and target");
			return g;
		}
		case KernelFamily::dirichlet_scattered:
		case KernelFamily::impedance_scattered:
			if (x.y < 0.0 || x0.y < 0.0)
				throw std::domain_error("eval_kernel: half-space kernel needs y, y0 >= 0");
			g.a = x.y;
			g.b = x0.y;
			if (g.a + g.b == 0.0 && g.X == 0.0)
				throw std::domain_error("eval_kernel: target coincides with image source");
			return g;
		case KernelFamily::three_layer: {
			if (x0.y <= 0.0) throw std::domain_error("eval_kernel: three-layer source must have y0 > 0");
			const double d = s.tl.d;
			switch (s.component) {
				case ThreeLayerComponent::s1:
					if (x.y < 0.0) throw std::domain_error("eval_kernel: g1s target must have y >= 0");
					break;
				case ThreeLayerComponent::s2t:
				case ThreeLayerComponent::s2b:
					if (x.y > 0.0 || x.y < -d)
						throw std::domain_error("eval_kernel: g2 target must lie in -d <= y <= 0");
					break;
				case ThreeLayerComponent::s3:
					if (x.y > -d) throw std::domain_error("eval_kernel: g3 target must have y <= -d");
					break;
			}
			g.a = s.target_height(x.y);
			g.b = x0.y;
			if (g.a < 0.0) throw std::domain_error("eval_kernel: negative effective target height");
			return g;
		}
	}
	throw std::logic_error("canonical_geometry: unknown family");
}

inline KernelSpec make_free_space(double k) {
	if (!(k > 0)) throw std::domain_error("make_free_space: k must be > 0");
	KernelSpec s;
	s.family = KernelFamily::free_space;
	s.k_target = s.k_source = k;
	s.offset_d = 0.0;
	s.sign = +1;
	s.sigma = {[](complexd) { return complexd(1.0, 0.0); }, complexd(1.0, 0.0)};
	return s;
}

inline KernelSpec make_dirichlet_scattered(double k) {
	if (!(k > 0)) throw std::domain_error("make_dirichlet_scattered: k must be > 0");
	KernelSpec s;
	s.family = KernelFamily::dirichlet_scattered;
	s.k_target = s.k_source = k;
	s.offset_d = 0.0;
	s.sign = -1;
	s.sigma = {[](complexd) { return complexd(-1.0, 0.0); }, complexd(-1.0, 0.0)};
	return s;
}

inline KernelSpec make_impedance_scattered(double k, double alpha) {
	if (!(k > 0)) throw std::domain_error("make_impedance_scattered: k must be > 0");
	KernelSpec s;
	s.family = KernelFamily::impedance_scattered;
	s.k_target = s.k_source = k;
	s.offset_d = 0.0;
	s.sign = -1;
	s.alpha = alpha;
	s.sigma = {[k, alpha](complexd lam) {
		           const complexd w = w_sqrt(lam, k);
		           return (w + complexd(0, k * alpha)) / (w - complexd(0, k * alpha));
	           },
	           complexd(1.0, 0.0)};
	return s;
}

inline KernelSpec make_three_layer(const ThreeLayerParams& p, ThreeLayerComponent comp) {
	p.validate();
	KernelSpec s;
	s.family = KernelFamily::three_layer;
	s.component = comp;
	s.k_source = p.k1;
	s.sign = -1;
	s.tl = p;
	switch (comp) {
		case ThreeLayerComponent::s1:
			s.k_target = p.k1;
			s.offset_d = 0.0;
			s.target_orient = +1;
			s.sigma = {[p](complexd lam) { return sigma_three_layer_closed(lam, p).s1; },
			           complexd(0.0, 0.0)};
			break;
		case ThreeLayerComponent::s2t:
			s.k_target = p.k2;
			s.offset_d = 0.0;
			s.target_orient = -1; // target exponent e^{+w2 y}
			s.sigma = {[p](complexd lam) { return sigma_three_layer_closed(lam, p).s2t; },
			           complexd(1.0, 0.0)};
			break;
		case ThreeLayerComponent::s2b:
			s.k_target = p.k2;
			s.offset_d = 2.0 * p.d; // target exponent e^{-w2 (y+2d)}
			s.target_orient = +1;
			s.sigma = {[p](complexd lam) { return sigma_three_layer_closed(lam, p).s2b; },
			           complexd(0.0, 0.0)};
			break;
		case ThreeLayerComponent::s3:
			s.k_target = p.k3;
			s.offset_d = 0.0;
			s.target_orient = -1; // transmitted field decays downward: e^{+w3 y}
			s.sigma = {[p](complexd lam) { return sigma_three_layer_closed(lam, p).s3; },
			           complexd(1.0, 0.0)};
			break;
	}
	return s;
}

/// Closed-form value where one exists: Hankel identity for free space, method
/// of images for the Dirichlet (and alpha=0 impedance) half space.
inline std::optional<complexd> reference_value(const KernelSpec& s, Point2 x, Point2 x0) {
	const complexd i4(0.0, 0.25);
	switch (s.family) {
		case KernelFamily::free_space:
			return i4 * hankel1(0, s.k_target * dist(x, x0));
		case KernelFamily::dirichlet_scattered:
			return -i4 * hankel1(0, s.k_target * dist(x, {x0.x, -x0.y}));
		case KernelFamily::impedance_scattered:
			if (s.alpha == 0.0) return i4 * hankel1(0, s.k_target * dist(x, {x0.x, -x0.y}));
			return std::nullopt;
		default:
			return std::nullopt;
	}
}

} // namespace lmfmm
