#pragma once

// Quadrature- and expansion-convergence studies: the impedance half-integral
// of the benchmark setting (x = 1, y = 0.1, k = 1, alpha = 1, c = 2) under its
// five representations, and the |J_p B_p| decay/ratio measurements for the
// multipole and local bases. Shared by the CLI study subcommands and the
// acceptance suite.

#include <cmath>
#include <complex>
#include <vector>

#include "lmfmm/expansions.hpp"
#include "lmfmm/greens.hpp"
#include "lmfmm/quadrature.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/validation.hpp"

namespace lmfmm {

/// The evanescent half-integral of the half-space impedance kernel,
///   I = int_0^inf e^{-t y} e^{i x rho(t)} / rho(t) * (t + i k a)/(t - i k a) dt,
/// rho(t) = sqrt(t^2 + k^2); the object of the benchmark quadrature study.
struct QuadStudySetting {
	double x = 1.0;
	double y = 0.1;
	double k = 1.0;
	double alpha = 1.0;
	double c = 2.0;
};

namespace study {

inline complexd f_evan(const QuadStudySetting& s, complexd t) {
	const complexd rho = std::sqrt(t * t + s.k * s.k);
	const complexd sig = (t + complexd(0, s.k * s.alpha)) / (t - complexd(0, s.k * s.alpha));
	return std::exp(-t * s.y + complexd(0, s.x) * rho) / rho * sig;
}

// contour-2 maps (up-half), polar angle of (x, y)
inline complexd phi_u(const QuadStudySetting& s, complexd u) {
	const double r = std::hypot(s.x, s.y), st = s.y / r, ct = s.x / r;
	return s.k * (u * st + complexd(0, ct) * std::sqrt(1.0 + u * u));
}
inline complexd psi_u(const QuadStudySetting& s, complexd u) {
	const double r = std::hypot(s.x, s.y), ct = s.x / r;
	return (s.c + complexd(0, ct)) * u - complexd(0, ct);
}
inline complexd f28(const QuadStudySetting& s, complexd u) {
	const complexd ph = phi_u(s, u);
	const complexd sig = (ph + complexd(0, s.alpha)) / (ph - complexd(0, s.alpha));
	const double r = std::hypot(s.x, s.y);
	return std::exp(-s.k * r * u) / std::sqrt(1.0 + u * u) * sig;
}

} // namespace study

/// Adaptive references (>= ~1e-13) for each studied integral.
struct QuadStudyReferences {
	complexd evan;        // full half-integral, Eq.-25 object
	complexd segIV1;      // int_0^c of the same integrand
	complexd segIII1;     // contour-1 remainder (evan - segIV1)
	complexd segIII2;     // contour-2 segment III (Eq.-28 object)
	complexd segIV2;      // contour-2 segment IV (Eq.-29 object)
};

inline QuadStudyReferences quad_study_references(const QuadStudySetting& s,
                                                 double target = 1e-14) {
	QuadStudyReferences R;
	const double T = 4.0 * s.k + 4.0;
	const auto head =
	    adaptive_reference([&](double t) { return study::f_evan(s, t); }, 0.0, T, target);
	const auto tail = adaptive_reference_tail(
	    [&](double v) { return complexd(0, 1) * study::f_evan(s, complexd(T, v)); }, 0.0, s.x,
	    target);
	R.evan = head.value + tail.value;
	R.segIV1 = adaptive_reference([&](double t) { return study::f_evan(s, t); }, 0.0, s.c, target)
	               .value;
	R.segIII1 = R.evan - R.segIV1;
	const double r = std::hypot(s.x, s.y);
	R.segIII2 = adaptive_reference_tail([&](double v) { return study::f28(s, s.c + v); }, 0.0,
	                                    s.k * r, target)
	                .value;
	{
		const double ct = s.x / r;
		const complexd slope = s.c + complexd(0, ct);
		R.segIV2 = adaptive_reference(
		               [&](double u) { return study::f28(s, study::psi_u(s, u)) * slope; }, 0.0, 1.0,
		               target)
		               .value;
	}
	return R;
}

/// The five studied quadratures at a given node count.
inline complexd quad_study_original(const QuadStudySetting& s, int n) {
	const auto& rule = cached_laguerre_scaled(n);
	complexd acc(0, 0);
	for (int i = 0; i < n; ++i) acc += study::f_evan(s, rule.nodes[i] / s.y) * rule.weights[i] / s.y;
	return acc;
}

inline complexd quad_study_segIV1(const QuadStudySetting& s, int n) {
	const detail::MappedRule rule(n, 0.0, s.c);
	complexd acc(0, 0);
	for (int i = 0; i < n; ++i) acc += study::f_evan(s, rule.node(i)) * rule.weight(i);
	return acc;
}

/// Production contour-1 leg: ray from t = c tilted to the steepest-descent
/// direction, Gauss-Laguerre at rate_mult times the decay rate.
inline complexd quad_study_segIII1(const QuadStudySetting& s, int n, double rate_mult = 2.5) {
	const double R = std::hypot(s.x, s.y);
	const double beta = std::atan2(s.x, s.y);
	const complexd dir = std::polar(1.0, beta);
	const double rate = rate_mult * R;
	const auto& rule = cached_laguerre_scaled(n);
	complexd acc(0, 0);
	for (int i = 0; i < n; ++i) {
		const complexd t = s.c + dir * (rule.nodes[i] / rate);
		acc += study::f_evan(s, t) * dir * (rule.weights[i] / rate);
	}
	return acc;
}

inline complexd quad_study_segIII2(const QuadStudySetting& s, int n) {
	const double r = std::hypot(s.x, s.y);
	const double rate = s.k * r;
	const auto& rule = cached_laguerre(n);
	complexd acc(0, 0);
	const double head = std::exp(-rate * s.c);
	for (int i = 0; i < n; ++i) {
		const complexd u = s.c + rule.nodes[i] / rate;
		const complexd ph = study::phi_u(s, u);
		const complexd sig = (ph + complexd(0, s.alpha)) / (ph - complexd(0, s.alpha));
		acc += sig / std::sqrt(1.0 + u * u) * (rule.weights[i] / rate) * head;
	}
	return acc;
}

inline complexd quad_study_segIV2(const QuadStudySetting& s, int n) {
	const double r = std::hypot(s.x, s.y), ct = s.x / r;
	const complexd slope = s.c + complexd(0, ct);
	const detail::MappedRule rule(n, 0.0, 1.0);
	complexd acc(0, 0);
	for (int i = 0; i < n; ++i)
		acc += study::f28(s, study::psi_u(s, rule.node(i))) * slope * rule.weight(i);
	return acc;
}

// ------------------------------------------------------------------
// Expansion ratio studies (multipole Phi_p, local Psi_p)
// ------------------------------------------------------------------

enum class ExpansionStudyKind { multipole_ratio, local_ratio };
enum class StudyParts { both, evanescent_only };

struct ExpansionStudySetting {
	ExpansionStudyKind kind = ExpansionStudyKind::multipole_ratio;
	// geometry: horizontal offset and the two effective heights
	Point2 far_point{2.0, 2.5};   // target x for Phi, source x0 for Psi
	Point2 box_center{0.0, 0.5};  // source center for Phi, target center for Psi
	double r = 1.5;               // in-box distance used in J_p(k r)
	int p_min = 1, p_max = 60;
	// for the waveguiding three-layer settings only the outer part is well
	// defined (guided-mode poles live in the propagating/middle bands)
	StudyParts parts = StudyParts::both;
};

struct ExpansionStudyRow {
	int p;
	double mag_prop;  // |J_p| * |propagating part of B_p|
	double mag_evan;  // |J_p| * |outer evanescent part of B_p|
	double term;      // |J_p B_p| with B per `parts`
	double ratio;     // term(p) / term(p-1); 0 for the first row
};

inline std::vector<ExpansionStudyRow> expansion_study(const KernelSpec& spec,
                                                      const ExpansionStudySetting& cfg) {
	std::vector<ExpansionStudyRow> rows;
	const bool local = cfg.kind == ExpansionStudyKind::local_ratio;
	const double kj = local ? spec.k_target : spec.k_source;
	CanonicalGeometry g;
	if (local) {
		g.X = cfg.box_center.x - cfg.far_point.x;
		g.a = spec.target_height(cfg.box_center.y);
		g.b = spec.source_height(cfg.far_point.y);
	} else {
		g.X = cfg.far_point.x - cfg.box_center.x;
		g.a = spec.target_height(cfg.far_point.y);
		g.b = spec.source_height(cfg.box_center.y);
	}
	detail::Integrand f(spec, g);
	double prev_term = 0.0;
	for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
		detail::PowerBatch b;
		if (local) {
			b.tau_t = spec.target_orient;
			b.P = p;
			b.Q = 0;
		} else {
			b.tau_s = -spec.sign;
			b.P = 0;
			b.Q = p;
		}
		ContourPlan plan = detail::default_plan(spec, g);
		// enough nodes for the largest order studied
		plan.n_prop = std::max(plan.n_prop, 2 * cfg.p_max + 40);
		plan.n_evan = std::max(plan.n_evan, 96);
		plan.n_segment = 48;
		plan.n_mid = std::max(plan.n_mid, 2 * cfg.p_max + 40);
		const int idx = local ? (b.P + p) * b.cols() : (b.Q + p);
		std::vector<complexd> prop(b.rows() * b.cols()), evan(prop.size()), mid(prop.size());
		detail::integrate_batch(f, b, plan, detail::part_propagating, prop.data());
		detail::integrate_batch(f, b, plan, detail::part_outer, evan.data());
		if (cfg.parts == StudyParts::both && f.bks.size() > 1)
			detail::integrate_batch(f, b, plan, detail::part_middle, mid.data());
		const double jp = std::fabs(bessel_j(p, kj * cfg.r));
		ExpansionStudyRow row;
		row.p = p;
		row.mag_prop = jp * std::abs(prop[idx]);
		row.mag_evan = jp * std::abs(evan[idx]);
		const complexd total = (cfg.parts == StudyParts::both)
		                           ? prop[idx] + mid[idx] + evan[idx]
		                           : evan[idx];
		row.term = jp * std::abs(total);
		row.ratio = prev_term > 0.0 ? row.term / prev_term : 0.0;
		prev_term = row.term;
		rows.push_back(row);
	}
	return rows;
}

} // namespace lmfmm
