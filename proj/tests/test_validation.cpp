#include <catch2/catch_amalgamated.hpp>

#include "lmfmm/validation.hpp"

using namespace lmfmm;

TEST_CASE("adaptive_reference on elementary integrals") {
	// int_0^inf e^{-t} dt = 1 via the tail map
	const auto r = adaptive_reference_tail([](double t) { return complexd(std::exp(-t), 0); }, 0.0,
	                                       1.0, 1e-14);
	CHECK(r.converged);
	CHECK_THAT(r.value.real(), Catch::Matchers::WithinAbs(1.0, 1e-13));
	// smooth finite integral
	const auto s = adaptive_reference([](double x) { return complexd(std::sin(x), 0); }, 0.0, M_PI,
	                                  1e-13);
	CHECK_THAT(s.value.real(), Catch::Matchers::WithinAbs(2.0, 1e-12));
	CHECK(s.evaluations > 0);
}

TEST_CASE("oracle reproduces the free-space Sommerfeld identity") {
	const auto spec = make_free_space(1.0);
	const auto r = oracle_kernel_value(spec, {0.0, 2.0}, {0.0, 0.0}, 1e-13);
	REQUIRE(r.converged);
	const complexd ref = complexd(0, 0.25) * hankel1(0, 2.0);
	CHECK(std::abs(r.value - ref) <= 1e-12 * std::abs(ref));
}

TEST_CASE("oracle self-consistency across targets") {
	const auto spec = make_impedance_scattered(1.0, 1.0);
	const auto a = oracle_kernel_value(spec, {1.0, 0.1}, {0.0, 0.0}, 1e-10);
	const auto b = oracle_kernel_value(spec, {1.0, 0.1}, {0.0, 0.0}, 1e-13);
	CHECK(std::abs(a.value - b.value) <= 1e-10 * std::max(1.0, std::abs(b.value)));
}

TEST_CASE("property suite passes on a healthy build and is deterministic") {
	const auto rep1 = run_property_suite(2024);
	INFO(rep1.str());
	CHECK(rep1.all_pass());
	const auto rep2 = run_property_suite(2024);
	CHECK(rep1.str() == rep2.str());
}

TEST_CASE("perturbed branch rule is caught by the w_sqrt invariant") {
	// mutation check: the wrong propagating branch violates e^{-w y} decay
	// pairing with the plane-wave formula; the square identity still holds,
	// so detect via the explicit branch requirement instead
	const double k = 1.3;
	bool caught = false;
	for (double lam = -0.99 * k; lam < k; lam += 0.07 * k) {
		const complexd w = w_sqrt_wrong_branch(complexd(lam, 0), k);
		if (!(w.imag() < 0.0)) caught = true; // invariant: w = -i sqrt(k^2-l^2)
	}
	CHECK(caught);
	// and the healthy rule satisfies it everywhere
	for (double lam = -0.99 * k; lam < k; lam += 0.07 * k)
		CHECK(w_sqrt(complexd(lam, 0), k).imag() < 0.0);
}
