#pragma once

// The four translation operators. M2M and L2L are the free-space Helmholtz
// operators (shift vector = child center - parent center in both):
//
//   M2M:  M~_p = sum_q M_{p-q} J_q(k0 |d|) e^{-i q theta_d}
//   L2L:  L~_p = sum_m L_{p+m} J_m(k  |d|) e^{+i m theta_d}
//
// The layered M2L matrix A_{p,q} is a batched canonical Sommerfeld integral
// with the two power factors; the free-space M2L uses the Hankel addition
// theorem. Matrices are cached by (level, integer offset, orders).

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "lmfmm/bessel.hpp"
#include "lmfmm/expansions.hpp"
#include "lmfmm/geometry.hpp"
#include "lmfmm/greens.hpp"
#include "lmfmm/sommerfeld.hpp"

namespace lmfmm {

namespace detail {

// table of J_n(k r) e^{+-i n theta} for n in [-N, N]
inline std::vector<complexd> bessel_phase_table(int N, double kr, double theta, int theta_sign) {
	std::vector<double> j(N + 1);
	bessel_j_array(N, kr, j.data());
	std::vector<complexd> t(2 * N + 1);
	t[N] = j[0];
	const complexd e = std::exp(complexd(0, theta_sign * theta));
	complexd ep(1, 0);
	for (int n = 1; n <= N; ++n) {
		ep *= e;
		t[N + n] = j[n] * ep;
		t[N - n] = ((n & 1) ? -j[n] : j[n]) * conj(ep);
	}
	return t;
}

} // namespace detail

/// Shift a multipole expansion from a child center to a parent center,
/// truncating or extending to order_out (default: keep the child's order).
inline MultipoleExpansion m2m(const MultipoleExpansion& child, Point2 parent_center,
                              int order_out = -1) {
	const int P = order_out < 0 ? child.order : order_out;
	const int Q = child.order;
	MultipoleExpansion out{parent_center, child.k0, P,
	                       std::vector<complexd>(2 * P + 1, complexd(0, 0))};
	const Polar pol = to_polar(child.center - parent_center);
	if (pol.r == 0.0) {
		for (int p = -std::min(P, Q); p <= std::min(P, Q); ++p) out.at(p) = child.at(p);
		return out;
	}
	const int N = P + Q;
	const auto shift = detail::bessel_phase_table(N, child.k0 * pol.r, pol.theta, -1);
	for (int p = -P; p <= P; ++p) {
		complexd acc(0, 0);
		for (int q = -Q; q <= Q; ++q) acc += child.at(q) * shift[N + (p - q)];
		out.at(p) = acc;
	}
	return out;
}

/// Shift a local expansion from a parent center to a child center.
inline LocalExpansion l2l(const LocalExpansion& parent, Point2 child_center, int order_out = -1) {
	const int P = order_out < 0 ? parent.order : order_out;
	const int Q = parent.order;
	LocalExpansion out{child_center, parent.k, P, std::vector<complexd>(2 * P + 1, complexd(0, 0))};
	const Polar pol = to_polar(child_center - parent.center);
	if (pol.r == 0.0) {
		for (int p = -std::min(P, Q); p <= std::min(P, Q); ++p) out.at(p) = parent.at(p);
		return out;
	}
	const int N = P + Q;
	const auto shift = detail::bessel_phase_table(N, parent.k * pol.r, pol.theta, +1);
	for (int p = -P; p <= P; ++p) {
		complexd acc(0, 0);
		for (int m = -N; m <= N; ++m) {
			if (p + m < -Q || p + m > Q) continue;
			acc += parent.at(p + m) * shift[N + m];
		}
		out.at(p) = acc;
	}
	return out;
}

/// Layered M2L translation matrix, entries
///   A_{p,q} = i^p (-i)^q  I[tau_t p, q](X_c, a_c, b_c)
/// accumulated over one shared set of quadrature nodes.
struct M2LMatrix {
	Point2 source_center, target_center;
	int P = 0, Q = 0;
	std::vector<complexd> a; // row-major, (2P+1) x (2Q+1)

	complexd at(int p, int q) const { return a[(p + P) * (2 * Q + 1) + (q + Q)]; }
};

inline M2LMatrix m2l_matrix(const KernelSpec& spec, Point2 source_center, Point2 target_center,
                            int P, int Q, double tol) {
	CanonicalGeometry g;
	g.X = target_center.x - source_center.x;
	g.a = spec.target_height(target_center.y);
	g.b = spec.source_height(source_center.y);
	if (!(g.rho() > 0.0)) throw std::domain_error("m2l_matrix: coincident effective centers");
	detail::Integrand f(spec, g);
	detail::PowerBatch b;
	b.tau_t = spec.target_orient;
	b.tau_s = -spec.sign;
	b.P = P;
	b.Q = Q;
	M2LMatrix m;
	m.source_center = source_center;
	m.target_center = target_center;
	m.P = P;
	m.Q = Q;
	std::vector<complexd> out;
	try {
		detail::integrate_batch_to_tol(f, b, detail::default_plan(spec, g), tol, out);
	} catch (const QuadratureFailure& e) {
		throw QuadratureFailure(std::string("m2l_matrix: ") + e.what(), e.value, e.achieved_error);
	}
	m.a.resize(out.size());
	// phases i^p (-i)^q
	for (int p = -P; p <= P; ++p) {
		const complexd ip = detail::ipow_int(complexd(0, 1), p);
		for (int q = -Q; q <= Q; ++q) {
			const complexd iq = detail::ipow_int(complexd(0, -1), q);
			m.a[(p + P) * (2 * Q + 1) + (q + Q)] = ip * iq * out[(p + P) * (2 * Q + 1) + (q + Q)];
		}
	}
	return m;
}

/// L_p = sum_q A_{p,q} M_q.
inline LocalExpansion m2l_apply(const M2LMatrix& A, const MultipoleExpansion& M, double k_target) {
	if (M.order != A.Q) throw std::invalid_argument("m2l_apply: order mismatch");
	LocalExpansion loc{A.target_center, k_target, A.P,
	                   std::vector<complexd>(2 * A.P + 1, complexd(0, 0))};
	for (int p = -A.P; p <= A.P; ++p) {
		complexd acc(0, 0);
		const complexd* row = A.a.data() + (p + A.P) * (2 * A.Q + 1);
		for (int q = -A.Q; q <= A.Q; ++q) acc += row[q + A.Q] * M.at(q);
		loc.at(p) = acc;
	}
	return loc;
}

/// Free-space Helmholtz M2L via the Hankel addition theorem:
///   L_p = (i/4) sum_q M_q H^{(1)}_{q-p}(k |D|) e^{i (q-p) theta_D},  D = target - source.
inline LocalExpansion m2l_free_space(const MultipoleExpansion& M, Point2 target_center, int P) {
	const Point2 D = target_center - M.center;
	const Polar pol = to_polar(D);
	if (!(pol.r > 0.0)) throw std::domain_error("m2l_free_space: coincident centers");
	const int Q = M.order;
	const int H = P + Q;
	std::vector<double> j(H + 1), y(H + 1);
	bessel_j_array(H, M.k0 * pol.r, j.data());
	bessel_y_array(H, M.k0 * pol.r, y.data());
	std::vector<complexd> hank(2 * H + 1); // H_m e^{i m theta}, m in [-H, H]
	const complexd e = std::exp(complexd(0, pol.theta));
	hank[H] = complexd(j[0], y[0]);
	complexd ep(1, 0);
	for (int m = 1; m <= H; ++m) {
		ep *= e;
		const complexd hm(j[m], y[m]);
		hank[H + m] = hm * ep;
		hank[H - m] = ((m & 1) ? -hm : hm) * conj(ep);
	}
	LocalExpansion loc{target_center, M.k0, P, std::vector<complexd>(2 * P + 1, complexd(0, 0))};
	const complexd i4(0, 0.25);
	for (int p = -P; p <= P; ++p) {
		complexd acc(0, 0);
		for (int q = -Q; q <= Q; ++q) acc += M.at(q) * hank[H + (q - p)];
		loc.at(p) = i4 * acc;
	}
	return loc;
}

/// Cache of M2L matrices keyed by (level, integer center offset, orders).
/// Concurrent readers; insertion under a mutex.
class M2LCache {
public:
	struct Key {
		int level_s, level_t;
		std::int64_t dix;      // horizontal offset (finest-level units)
		std::int64_t iy_s, iy_t; // absolute vertical indices (no y-translation invariance)
		int P, Q;
		bool operator<(const Key& o) const {
			return std::tie(level_s, level_t, dix, iy_s, iy_t, P, Q) <
			       std::tie(o.level_s, o.level_t, o.dix, o.iy_s, o.iy_t, o.P, o.Q);
		}
	};

	const M2LMatrix* find(const Key& k) const {
		std::lock_guard<std::mutex> lock(mtx_);
		auto it = map_.find(k);
		return it == map_.end() ? nullptr : it->second.get();
	}

	const M2LMatrix* insert(const Key& k, M2LMatrix&& m) {
		std::lock_guard<std::mutex> lock(mtx_);
		auto it = map_.find(k);
		if (it == map_.end()) it = map_.emplace(k, std::make_unique<M2LMatrix>(std::move(m))).first;
		return it->second.get();
	}

	std::size_t size() const {
		std::lock_guard<std::mutex> lock(mtx_);
		return map_.size();
	}

	std::size_t bytes() const {
		std::lock_guard<std::mutex> lock(mtx_);
		std::size_t b = 0;
		for (const auto& [k, v] : map_) b += sizeof(M2LMatrix) + v->a.size() * sizeof(complexd);
		return b;
	}

	void clear() {
		std::lock_guard<std::mutex> lock(mtx_);
		map_.clear();
	}

private:
	mutable std::mutex mtx_;
	std::map<Key, std::unique_ptr<M2LMatrix>> map_;
};

} // namespace lmfmm
