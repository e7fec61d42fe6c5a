#pragma once

// Multipole and local expansions for layered kernels. The multipole
// coefficients are the free-space Helmholtz ones, M_p = sum_j q_j J_p(k0 r_j)
// e^{-i p theta_j}; everything kernel-specific lives in the basis functions
// Phi_p / Psi_p and in the M2L matrix (translations.hpp).
//
// Frozen phase convention (validated against direct evaluation):
//   source factor  e^{-i lam dx - w_K0 dy} = sum_m (-i)^m J_m(K0 r) e^{-im th} z_K0^m
//   target factor  e^{+i lam dx - w_K ty dy} = sum_m i^m J_m(K r) e^{im th} z_K^{ty m}
// so Phi_p carries (-i)^p and the local coefficients carry i^p.

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "lmfmm/bessel.hpp"
#include "lmfmm/geometry.hpp"
#include "lmfmm/greens.hpp"
#include "lmfmm/sommerfeld.hpp"

namespace lmfmm {

struct Particle {
	Point2 position;
	complexd charge;
};

struct MultipoleExpansion {
	Point2 center;
	double k0 = 1.0; // source-layer wavenumber
	int order = 0;
	std::vector<complexd> coeff; // index p + order, p in [-order, order]

	complexd& at(int p) { return coeff[p + order]; }
	complexd at(int p) const { return coeff[p + order]; }
};

struct LocalExpansion {
	Point2 center;
	double k = 1.0; // target-layer wavenumber
	int order = 0;
	std::vector<complexd> coeff;

	complexd& at(int p) { return coeff[p + order]; }
	complexd at(int p) const { return coeff[p + order]; }
};

struct ModifiedDistance {
	double rho = 0.0;
};

enum class ExpansionRole { multipole, local };

/// Free-space Helmholtz S2M; identical coefficients for every kernel family.
inline MultipoleExpansion s2m(std::span<const Particle> particles, Point2 center, double k0,
                              int order) {
	if (order < 0) throw std::domain_error("s2m: order must be >= 0");
	MultipoleExpansion m{center, k0, order, std::vector<complexd>(2 * order + 1, complexd(0, 0))};
	std::vector<double> j(order + 1);
	for (const auto& pt : particles) {
		const Polar pol = to_polar(pt.position - center);
		bessel_j_array(order, k0 * pol.r, j.data());
		const complexd e = std::exp(complexd(0, -pol.theta));
		complexd ep(1, 0);
		m.at(0) += pt.charge * j[0];
		for (int p = 1; p <= order; ++p) {
			ep *= e;
			const complexd jp = pt.charge * j[p];
			m.at(p) += jp * ep;                                  // e^{-ip theta}
			m.at(-p) += jp * ((p & 1) ? -conj(ep) : conj(ep));   // J_{-p} = (-1)^p J_p
		}
	}
	return m;
}

/// Evaluate a local expansion: sum_p L_p J_p(k r) e^{i p theta}.
inline complexd l2t(const LocalExpansion& local, Point2 x) {
	const Polar pol = to_polar(x - local.center);
	std::vector<double> j(local.order + 1);
	bessel_j_array(local.order, local.k * pol.r, j.data());
	const complexd e = std::exp(complexd(0, pol.theta));
	complexd acc = local.at(0) * j[0];
	complexd ep(1, 0);
	for (int p = 1; p <= local.order; ++p) {
		ep *= e;
		acc += local.at(p) * j[p] * ep;
		acc += local.at(-p) * ((p & 1) ? -j[p] : j[p]) * conj(ep);
	}
	return acc;
}

/// Multipole basis function Phi_p(x) about a source box center; the expansion
/// identity is sum_p M_p Phi_p(x) = sum_j q_j g(x, x_j).
inline complexd phi_basis(int p, Point2 x, const KernelSpec& spec, Point2 source_center,
                          double tol = 1e-11) {
	CanonicalGeometry g;
	g.X = x.x - source_center.x;
	g.a = spec.target_height(x.y);
	g.b = spec.source_height(source_center.y);
	if (!(g.vertical() > 0.0) && g.X == 0.0)
		throw std::domain_error("phi_basis: inadmissible geometry");
	detail::Integrand f(spec, g);
	detail::PowerBatch b;
	b.tau_s = -spec.sign; // e^{+w y0} orientation reverses the power direction
	b.P = 0;
	b.Q = std::abs(p);
	ContourPlan plan = detail::default_plan(spec, g);
	std::vector<complexd> out;
	detail::integrate_batch_to_tol(f, b, plan, tol, out);
	return detail::ipow_int(complexd(0, -1), p) * out[b.Q + p];
}

/// Propagating and evanescent (middle+outer) parts of Phi_p separately,
/// at fixed node counts; used by the expansion-study tool.
inline std::pair<complexd, complexd> phi_basis_parts(int p, Point2 x, const KernelSpec& spec,
                                                     Point2 source_center, const ContourPlan& plan) {
	CanonicalGeometry g;
	g.X = x.x - source_center.x;
	g.a = spec.target_height(x.y);
	g.b = spec.source_height(source_center.y);
	detail::Integrand f(spec, g);
	detail::PowerBatch b;
	b.tau_s = -spec.sign;
	b.P = 0;
	b.Q = std::abs(p);
	std::vector<complexd> prop(b.cols()), evan(b.cols());
	detail::integrate_batch(f, b, plan, detail::part_propagating, prop.data());
	detail::integrate_batch(f, b, plan, detail::part_middle | detail::part_outer, evan.data());
	const complexd ph = detail::ipow_int(complexd(0, -1), p);
	return {ph * prop[b.Q + p], ph * evan[b.Q + p]};
}

/// Local basis function Psi_p(x0) about a target box center; the expansion
/// identity is g(x, x0) = sum_p J_p(k r~) e^{i p theta~} Psi_p(x0).
inline complexd psi_basis(int p, Point2 x0, const KernelSpec& spec, Point2 target_center,
                          double tol = 1e-11) {
	CanonicalGeometry g;
	g.X = target_center.x - x0.x;
	g.a = spec.target_height(target_center.y);
	g.b = spec.source_height(x0.y);
	if (!(g.vertical() > 0.0) && g.X == 0.0)
		throw std::domain_error("psi_basis: inadmissible geometry");
	detail::Integrand f(spec, g);
	detail::PowerBatch b;
	b.tau_t = spec.target_orient;
	b.P = std::abs(p);
	b.Q = 0;
	ContourPlan plan = detail::default_plan(spec, g);
	std::vector<complexd> out;
	detail::integrate_batch_to_tol(f, b, plan, tol, out);
	return detail::ipow_int(complexd(0, 1), p) * out[(b.P + p) * b.cols()];
}

inline std::pair<complexd, complexd> psi_basis_parts(int p, Point2 x0, const KernelSpec& spec,
                                                     Point2 target_center, const ContourPlan& plan) {
	CanonicalGeometry g;
	g.X = target_center.x - x0.x;
	g.a = spec.target_height(target_center.y);
	g.b = spec.source_height(x0.y);
	detail::Integrand f(spec, g);
	detail::PowerBatch b;
	b.tau_t = spec.target_orient;
	b.P = std::abs(p);
	b.Q = 0;
	std::vector<complexd> prop(b.rows()), evan(b.rows());
	detail::integrate_batch(f, b, plan, detail::part_propagating, prop.data());
	detail::integrate_batch(f, b, plan, detail::part_middle | detail::part_outer, evan.data());
	const complexd ph = detail::ipow_int(complexd(0, 1), p);
	return {ph * prop[b.P + p], ph * evan[b.P + p]};
}

/// Modified distance: box-center separation corrected by the kernel's vertical
/// offset and orientation (image reflection), governing the r/rho decay rate.
inline ModifiedDistance modified_distance(const KernelSpec& spec, Point2 a, Point2 b,
                                          ExpansionRole role) {
	// a = target-side point (far target for multipole, target box center for
	// local), b = source-side point. The same image-corrected formula covers
	// both roles; `role` documents intent at call sites.
	(void)role;
	const double v = spec.target_height(a.y) + spec.source_height(b.y);
	return {std::hypot(a.x - b.x, v)};
}

/// Smallest P with (r/rho)^{P+1}/(1 - r/rho) <= eps, plus the wave correction
/// ceil(e k r / 2) outside the low-frequency regime; floor 4.
inline int estimate_order(double r, const ModifiedDistance& rho, double eps, double k_pair) {
	if (!(r < rho.rho)) throw std::domain_error("estimate_order: requires r < rho");
	if (!(eps > 0)) throw std::domain_error("estimate_order: eps must be > 0");
	const double q = r / rho.rho;
	int p_geo = 0;
	const double rhs = eps * (1.0 - q);
	if (rhs < 1.0)
		p_geo = std::max(0, int(std::ceil(std::log(rhs) / std::log(q))) - 1);
	const int p_wave = int(std::ceil(0.5 * std::exp(1.0) * k_pair * r));
	return std::max({4, p_geo, p_wave});
}

} // namespace lmfmm
