#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lmfmm/greens.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/translations.hpp"

using namespace lmfmm;

namespace {

std::vector<Particle> random_box(std::mt19937_64& rng, Point2 c, double r, int n) {
	std::uniform_real_distribution<double> ud(-1, 1);
	std::vector<Particle> out;
	for (int i = 0; i < n; ++i)
		out.push_back({{c.x + r * ud(rng), c.y + r * ud(rng)}, complexd(ud(rng), ud(rng))});
	return out;
}

} // namespace

TEST_CASE("m2m: zero shift is the identity") {
	std::mt19937_64 rng(3);
	const auto parts = random_box(rng, {0.2, 0.9}, 0.3, 5);
	const auto m = s2m(parts, {0.2, 0.9}, 1.1, 10);
	const auto shifted = m2m(m, {0.2, 0.9});
	for (int p = -10; p <= 10; ++p) CHECK(shifted.at(p) == m.at(p));
}

TEST_CASE("m2m equals direct s2m at the parent") {
	std::mt19937_64 rng(4);
	const Point2 child{0.25, 1.25}, parent{0.5, 1.0};
	const auto parts = random_box(rng, child, 0.24, 12);
	const int P = 30;
	for (double k0 : {0.4, 1.0}) { // k0 * boxsize <= 1
		const auto mc = m2m(s2m(parts, child, k0, P), parent);
		const auto md = s2m(parts, parent, k0, P);
		double worst = 0.0, scale = 0.0;
		for (int p = -P; p <= P; ++p) {
			worst = std::max(worst, std::abs(mc.at(p) - md.at(p)));
			scale = std::max(scale, std::abs(md.at(p)));
		}
		CHECK(worst <= 1e-10 * scale);
	}
}

TEST_CASE("m2m two-level chaining equals one shift") {
	std::mt19937_64 rng(6);
	const Point2 c0{0.1, 1.1}, c1{0.3, 0.9}, c2{0.7, 0.5};
	const auto parts = random_box(rng, c0, 0.1, 8);
	const auto m = s2m(parts, c0, 0.8, 24);
	const auto two = m2m(m2m(m, c1), c2);
	const auto one = m2m(m, c2);
	for (int p = -12; p <= 12; ++p)
		CHECK(std::abs(two.at(p) - one.at(p)) <= 1e-10 * std::max(1.0, std::abs(one.at(p))));
}

TEST_CASE("l2l: zero shift is the identity and evaluation is consistent") {
	const auto spec = make_impedance_scattered(1.0, 1.0);
	const Point2 ct{1.5, 0.8}, child{1.6, 0.7};
	const Point2 x0{0.0, 0.5};
	const int P = 18;
	LocalExpansion loc{ct, spec.k_target, P, std::vector<complexd>(2 * P + 1)};
	for (int p = -P; p <= P; ++p) loc.at(p) = psi_basis(p, x0, spec, ct, 1e-12);
	const auto same = l2l(loc, ct);
	for (int p = -P; p <= P; ++p) CHECK(same.at(p) == loc.at(p));
	const auto moved = l2l(loc, child);
	const Point2 x{1.7, 0.65}; // inside the child's validity disk
	const complexd a = l2t(loc, x), b = l2t(moved, x);
	CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
}

TEST_CASE("m2l_matrix + m2l_apply reproduce the kernel for a far charge") {
	std::mt19937_64 rng(8);
	const auto spec = make_impedance_scattered(0.8, 1.0);
	const Point2 cs{0.0, 1.0}, ct{3.0, 1.4};
	const auto parts = random_box(rng, cs, 0.3, 3);
	const int P = 16, Q = 16;
	const auto A = m2l_matrix(spec, cs, ct, P, Q, 1e-12);
	const auto M = s2m(parts, cs, spec.k_source, Q);
	const auto L = m2l_apply(A, M, spec.k_target);
	const Point2 x{3.2, 1.1};
	complexd direct(0, 0);
	for (const auto& p : parts) direct += p.charge * eval_kernel(spec, x, p.position, 1e-12);
	CHECK(std::abs(l2t(L, x) - direct) <= 1e-8 * std::abs(direct));
}

TEST_CASE("m2l chain for the cross-wavenumber g2t kernel") {
	std::mt19937_64 rng(9);
	const ThreeLayerParams tl{1.5, 0.8, 1.2, 0.8}; // guided-mode-free
	const auto spec = make_three_layer(tl, ThreeLayerComponent::s2t);
	const Point2 cs{0.0, 1.0}, ct{2.0, -0.5};
	const auto parts = random_box(rng, cs, 0.3, 3);
	const int P = 16, Q = 16;
	const auto A = m2l_matrix(spec, cs, ct, P, Q, 1e-12);
	const auto M = s2m(parts, cs, spec.k_source, Q);
	const auto L = m2l_apply(A, M, spec.k_target);
	const Point2 x{2.2, -0.35};
	complexd direct(0, 0);
	for (const auto& p : parts) direct += p.charge * eval_kernel(spec, x, p.position, 1e-12);
	CHECK(std::abs(l2t(L, x) - direct) <= 1e-7 * std::abs(direct));
}

TEST_CASE("m2l_apply: zero multipole and linearity") {
	const auto spec = make_dirichlet_scattered(1.0);
	const auto A = m2l_matrix(spec, {0.0, 1.0}, {2.5, 1.0}, 6, 6, 1e-10);
	MultipoleExpansion z{{0.0, 1.0}, 1.0, 6, std::vector<complexd>(13, complexd(0, 0))};
	const auto Lz = m2l_apply(A, z, 1.0);
	for (int p = -6; p <= 6; ++p) CHECK(Lz.at(p) == complexd(0, 0));
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> ud(-1, 1);
	MultipoleExpansion m1 = z, m2 = z, sum = z;
	for (int p = -6; p <= 6; ++p) {
		m1.at(p) = complexd(ud(rng), ud(rng));
		m2.at(p) = complexd(ud(rng), ud(rng));
		sum.at(p) = m1.at(p) + m2.at(p);
	}
	const auto L1 = m2l_apply(A, m1, 1.0), L2 = m2l_apply(A, m2, 1.0), Ls = m2l_apply(A, sum, 1.0);
	for (int p = -6; p <= 6; ++p)
		CHECK(std::abs(Ls.at(p) - L1.at(p) - L2.at(p)) <= 1e-15 * std::abs(Ls.at(p)) + 1e-300);
	CHECK_THROWS_AS(m2l_apply(A, s2m({}, {0, 1}, 1.0, 4), 1.0), std::invalid_argument);
}

TEST_CASE("m2l_free_space matches the Hankel oracle and the layered route") {
	std::mt19937_64 rng(13);
	const double k = 1.0;
	const Point2 cs{0.0, 1.0}, ct{3.0, 2.0};
	const auto parts = random_box(rng, cs, 0.3, 4);
	const int P = 18;
	const auto M = s2m(parts, cs, k, P);
	const auto L = m2l_free_space(M, ct, P);
	const Point2 x{3.2, 1.8};
	complexd direct(0, 0);
	for (const auto& p : parts)
		direct += p.charge * complexd(0, 0.25) * hankel1(0, k * dist(x, p.position));
	CHECK(std::abs(l2t(L, x) - direct) <= 1e-9 * std::abs(direct));
	// two independent routes: Hankel addition theorem vs Sommerfeld matrix
	// (target box above the source box keeps the canonical form admissible)
	const auto spec = make_free_space(k);
	const Point2 ct2{1.0, 3.5};
	const auto A = m2l_matrix(spec, cs, ct2, P, P, 1e-11);
	const auto L1 = m2l_free_space(M, ct2, P);
	const auto L2 = m2l_apply(A, M, k);
	const Point2 xt{1.1, 3.4};
	CHECK(std::abs(l2t(L1, xt) - l2t(L2, xt)) <= 1e-9 * std::abs(l2t(L1, xt)));
}

TEST_CASE("full chain S2M -> M2M -> M2L -> L2L -> L2T across kernels") {
	std::mt19937_64 rng(17);
	std::uniform_real_distribution<double> ud(-1, 1);
	const ThreeLayerParams tl{1.5, 0.8, 1.2, 0.8};
	const std::vector<KernelSpec> specs = {
	    make_dirichlet_scattered(1.0), make_impedance_scattered(1.0, 1.0),
	    make_three_layer(tl, ThreeLayerComponent::s2t)};
	for (const auto& spec : specs) {
		const bool lower = spec.family == KernelFamily::three_layer;
		for (int trial = 0; trial < 4; ++trial) {
			const Point2 child_s{0.1 * ud(rng), 0.8 + 0.1 * ud(rng)};
			const Point2 parent_s{child_s.x + 0.15, child_s.y - 0.1};
			const double ty = lower ? -0.4 : 1.0;
			const Point2 parent_t{3.0 + ud(rng), ty + (lower ? 0.1 : 0.4) * ud(rng)};
			const Point2 child_t{parent_t.x + 0.1, parent_t.y + (lower ? 0.05 : 0.1)};
			const Point2 xsrc{child_s.x + 0.05, child_s.y + 0.05};
			const Point2 xtgt{child_t.x + 0.05, child_t.y + (lower ? -0.05 : 0.05)};
			const complexd q(ud(rng), ud(rng));
			const int P = 20;
			const std::vector<Particle> one = {{xsrc, q}};
			const auto M = m2m(s2m(one, child_s, spec.k_source, P), parent_s);
			const auto A = m2l_matrix(spec, parent_s, parent_t, P, P, 1e-11);
			const auto L = l2l(m2l_apply(A, M, spec.k_target), child_t);
			const complexd direct = q * eval_kernel(spec, xtgt, xsrc, 1e-12);
			INFO(family_name(spec.family) << " trial " << trial);
			CHECK(std::abs(l2t(L, xtgt) - direct) <= 1e-7 * std::abs(direct));
		}
	}
}

TEST_CASE("m2l cache") {
	M2LCache cache;
	CHECK(cache.size() == 0);
	const auto spec = make_dirichlet_scattered(1.0);
	M2LCache::Key key{2, 2, 8, 3, 3, 4, 4};
	CHECK(cache.find(key) == nullptr);
	cache.insert(key, m2l_matrix(spec, {0.0, 1.0}, {2.0, 1.0}, 4, 4, 1e-9));
	CHECK(cache.size() == 1);
	CHECK(cache.find(key) != nullptr);
	CHECK(cache.bytes() > 0);
}
