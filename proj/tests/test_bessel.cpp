#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lmfmm/bessel.hpp"

using namespace lmfmm;

namespace {

// truncated power series with factorial tails; independent oracle for J_p.
// max_term reports the largest summand so callers can bound the oracle's own
// cancellation error (~ max_term * eps).
double bessel_j_series(int p, double z, double* max_term = nullptr) {
	double term = 1.0;
	for (int m = 1; m <= p; ++m) term *= 0.5 * z / m;
	double sum = term, mt = std::fabs(term);
	const double q = 0.25 * z * z;
	for (int m = 1; m < 200; ++m) {
		term *= -q / (double(m) * (m + p));
		sum += term;
		mt = std::max(mt, std::fabs(term));
		if (std::fabs(term) < 1e-18 * std::fabs(sum) + 1e-300) break;
	}
	if (max_term) *max_term = mt;
	return sum;
}

} // namespace

TEST_CASE("bessel_j basic values") {
	CHECK(bessel_j(0, 0.0) == 1.0);
	CHECK(bessel_j(3, 0.0) == 0.0);
	CHECK_THAT(bessel_j(5, 2.0),
	           Catch::Matchers::WithinAbs(bessel_j_series(5, 2.0), 1e-12));
}

TEST_CASE("bessel_j vs series oracle over a grid") {
	for (int p : {0, 1, 2, 7, 15, 31}) {
		for (double z : {0.01, 0.3, 1.0, 4.5, 9.7}) {
			double max_term = 0.0;
			const double ref = bessel_j_series(p, z, &max_term);
			const double got = bessel_j(p, z);
			// the oracle itself loses ~max_term*eps to cancellation
			const double tol = std::max(1e-12 * std::fabs(ref), 4e-16 * max_term) + 1e-15;
			INFO("p=" << p << " z=" << z);
			CHECK(std::fabs(got - ref) <= tol);
		}
	}
}

TEST_CASE("bessel_j vs std::cyl_bessel_j") {
	for (int p : {0, 1, 4, 12, 40}) {
		for (double z : {0.2, 2.0, 8.0, 19.5}) {
			const double ref = std::cyl_bessel_j(double(p), z);
			INFO("p=" << p << " z=" << z);
			CHECK_THAT(bessel_j(p, z), Catch::Matchers::WithinRel(ref, 1e-11) ||
			                               Catch::Matchers::WithinAbs(ref, 1e-14));
		}
	}
}

TEST_CASE("reflection formula J_{-p} = (-1)^p J_p") {
	std::mt19937_64 rng(42);
	std::uniform_real_distribution<double> ud(0.0, 40.0);
	for (int t = 0; t < 50; ++t) {
		const int p = int(rng() % 200);
		const double z = ud(rng);
		CHECK_THAT(bessel_j(-p, z),
		           Catch::Matchers::WithinAbs((p & 1) ? -bessel_j(p, z) : bessel_j(p, z), 1e-15));
	}
}

TEST_CASE("hankel1 components and Wronskian") {
	const complexd h = hankel1(0, 1.0);
	CHECK_THAT(h.real(), Catch::Matchers::WithinRel(std::cyl_bessel_j(0.0, 1.0), 1e-12));
	CHECK_THAT(h.imag(), Catch::Matchers::WithinRel(std::cyl_neumann(0.0, 1.0), 1e-10));
	// J_{p+1} Y_p - J_p Y_{p+1} = 2/(pi z)
	for (int p : {0, 1, 3, 9}) {
		for (double z : {0.4, 1.0, 3.3, 12.0}) {
			std::vector<double> j(p + 2), y(p + 2);
			bessel_j_array(p + 1, z, j.data());
			bessel_y_array(p + 1, z, y.data());
			const double w = j[p + 1] * y[p] - j[p] * y[p + 1];
			INFO("p=" << p << " z=" << z);
			CHECK_THAT(w, Catch::Matchers::WithinAbs(2.0 / (M_PI * z), 1e-10));
		}
	}
}

TEST_CASE("hankel1 domain error and large-order magnitude growth") {
	CHECK_THROWS_AS(hankel1(0, 0.0), std::domain_error);
	CHECK_THROWS_AS(hankel1(0, -1.0), std::domain_error);
	// large-order growth consistent with |H_p| ~ sqrt(2/(pi p)) (e z/2p)^{-p}:
	// the magnitude matches the one-term form and the ratio matches its quotient
	// (which tends to [2(p+1)/(e z)] * (1+1/p)^p, i.e. ~ 2(p+1)/z).
	const double z = 2.0;
	auto asym = [&](int p) {
		return std::sqrt(2.0 / (M_PI * p)) * std::pow(std::exp(1.0) * z / (2.0 * p), -double(p));
	};
	for (int p : {40, 60}) {
		CHECK_THAT(std::abs(hankel1(p, z)) / asym(p), Catch::Matchers::WithinAbs(1.0, 0.03));
		const double ratio = std::abs(hankel1(p + 1, z)) / std::abs(hankel1(p, z));
		CHECK_THAT(ratio / (asym(p + 1) / asym(p)), Catch::Matchers::WithinAbs(1.0, 0.03));
	}
}

TEST_CASE("bessel_j_asymptotic") {
	const double want = std::exp(-0.5 * std::log(100.0 * M_PI)) *
	                    std::pow(0.1 * std::exp(1.0) / 100.0, 50.0);
	CHECK_THAT(bessel_j_asymptotic(50, 0.1), Catch::Matchers::WithinRel(want, 1e-12));
	CHECK(bessel_j_asymptotic(1, 0.0) == 0.0);
	CHECK_THROWS_AS(bessel_j_asymptotic(0, 1.0), std::domain_error);
	// ratio exact/asymptotic -> 1 as p grows with z fixed
	const double z = 0.5;
	double prev = 1e9;
	for (int p : {20, 40, 80}) {
		const double r = bessel_j(p, z) / bessel_j_asymptotic(p, z);
		CHECK(std::fabs(r - 1.0) < std::fabs(prev - 1.0) + 1e-12);
		prev = r;
	}
	CHECK_THAT(bessel_j(80, z) / bessel_j_asymptotic(80, z), Catch::Matchers::WithinAbs(1.0, 0.01));
}

TEST_CASE("bessel near-zero absolute accuracy") {
	// first zero of J_0 at 2.404825557695773; values near zeros stay accurate absolutely
	const double j0z = 2.404825557695772768622;
	CHECK_THAT(bessel_j(0, j0z), Catch::Matchers::WithinAbs(0.0, 1e-15));
}
