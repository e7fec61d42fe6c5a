#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lmfmm/quadrature.hpp"

using namespace lmfmm;

TEST_CASE("gauss_legendre basics") {
	const auto r1 = gauss_legendre(1);
	CHECK_THAT(r1.nodes[0], Catch::Matchers::WithinAbs(0.0, 1e-16));
	CHECK_THAT(r1.weights[0], Catch::Matchers::WithinAbs(2.0, 1e-15));

	const auto r5 = gauss_legendre(5); // degree 8 <= 2*5-1
	double got = 0.0;
	for (int i = 0; i < 5; ++i) got += r5.weights[i] * std::pow(r5.nodes[i], 8);
	CHECK_THAT(got, Catch::Matchers::WithinAbs(2.0 / 9.0, 1e-14));

	CHECK_THROWS_AS(gauss_legendre(0), std::domain_error);
	CHECK_THROWS_AS(gauss_legendre(5000), std::domain_error);
}

TEST_CASE("gauss_legendre structure invariants") {
	for (int n : {2, 3, 17, 64, 257}) {
		const auto r = gauss_legendre(n);
		double sw = 0.0;
		for (int i = 0; i < n; ++i) {
			CHECK(r.nodes[i] > -1.0);
			CHECK(r.nodes[i] < 1.0);
			CHECK(r.weights[i] > 0.0);
			CHECK_THAT(r.nodes[i], Catch::Matchers::WithinAbs(-r.nodes[n - 1 - i], 1e-15));
			sw += r.weights[i];
		}
		CHECK_THAT(sw, Catch::Matchers::WithinAbs(2.0, 1e-13));
	}
}

TEST_CASE("gauss_laguerre basics") {
	const auto r1 = gauss_laguerre(1);
	CHECK_THAT(r1.nodes[0], Catch::Matchers::WithinAbs(1.0, 1e-13));
	CHECK_THAT(r1.weights[0], Catch::Matchers::WithinAbs(1.0, 1e-13));

	const auto r3 = gauss_laguerre(3); // int t^4 e^{-t} = 24
	double got = 0.0;
	for (int i = 0; i < 3; ++i) got += r3.weights[i] * std::pow(r3.nodes[i], 4);
	CHECK_THAT(got, Catch::Matchers::WithinAbs(24.0, 1e-12));

	CHECK_THROWS_AS(gauss_laguerre(0), std::domain_error);
	CHECK_THROWS_AS(gauss_laguerre(513), std::domain_error);
}

TEST_CASE("gauss_laguerre structure and moments") {
	for (int n : {2, 8, 40, 128, 512}) {
		const auto r = gauss_laguerre(n);
		double sw = 0.0;
		for (int i = 0; i < n; ++i) {
			CHECK(r.nodes[i] > 0.0);
			if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
			CHECK(r.weights[i] >= 0.0);
			sw += r.weights[i];
		}
		CHECK_THAT(sw, Catch::Matchers::WithinAbs(1.0, 1e-12));
		// gamma(4) = 6 exactly for n >= 2
		double m3 = 0.0;
		for (int i = 0; i < n; ++i) m3 += r.weights[i] * std::pow(r.nodes[i], 3);
		CHECK_THAT(m3, Catch::Matchers::WithinRel(6.0, 1e-11));
	}
}

TEST_CASE("map_to_interval") {
	const auto r = map_to_interval(gauss_legendre(8), 0.0, 2.0);
	double sw = 0.0;
	for (double w : r.weights) sw += w;
	CHECK_THAT(sw, Catch::Matchers::WithinAbs(2.0, 1e-14));

	const auto rs = map_to_interval(gauss_legendre(5), 0.0, M_PI);
	double got = 0.0;
	for (int i = 0; i < 5; ++i) got += rs.weights[i] * std::sin(rs.nodes[i]);
	CHECK_THAT(got, Catch::Matchers::WithinAbs(2.0, 1e-6));

	CHECK_THROWS_AS(map_to_interval(gauss_legendre(4), 1.0, 1.0), std::domain_error);
	CHECK_THROWS_AS(map_to_interval(gauss_laguerre(4), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("scale_laguerre") {
	const auto r1 = scale_laguerre(gauss_laguerre(1), 2.0);
	CHECK_THAT(r1.nodes[0], Catch::Matchers::WithinAbs(0.5, 1e-13));
	CHECK_THAT(r1.weights[0], Catch::Matchers::WithinAbs(0.5, 1e-13));
	// int e^{-3t} dt = 1/3 for any n
	for (int n : {1, 2, 9}) {
		const auto r = scale_laguerre(gauss_laguerre(n), 3.0);
		double sw = 0.0;
		for (double w : r.weights) sw += w;
		CHECK_THAT(sw, Catch::Matchers::WithinRel(1.0 / 3.0, 1e-12));
	}
	// int t e^{-s t} dt = 1/s^2 with s = 0.15, exact at n = 2
	const double s = 0.15;
	const auto r = scale_laguerre(gauss_laguerre(2), s);
	double got = 0.0;
	for (int i = 0; i < 2; ++i) got += r.weights[i] * r.nodes[i];
	CHECK_THAT(got, Catch::Matchers::WithinRel(1.0 / (s * s), 1e-12));
	CHECK_THROWS_AS(scale_laguerre(gauss_laguerre(2), 0.0), std::domain_error);
}

TEST_CASE("polynomial exactness sweep with random coefficients") {
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> ud(-1.0, 1.0);
	for (int n = 1; n <= 64; ++n) {
		const auto r = gauss_legendre(n);
		std::vector<double> coef(2 * n); // degree 2n-1
		for (auto& c : coef) c = ud(rng);
		double got = 0.0;
		for (int i = 0; i < n; ++i) {
			double acc = 0.0;
			for (int d = int(coef.size()) - 1; d >= 0; --d) acc = acc * r.nodes[i] + coef[d];
			got += r.weights[i] * acc;
		}
		double want = 0.0;
		for (std::size_t d = 0; d < coef.size(); d += 2) want += coef[d] * 2.0 / double(d + 1);
		INFO("n=" << n);
		CHECK_THAT(got, Catch::Matchers::WithinAbs(want, 1e-11 * std::max(1.0, std::fabs(want))));
	}
}

TEST_CASE("rules are bit-for-bit reproducible") {
	for (int n : {5, 33, 200}) {
		const auto a = gauss_legendre(n), b = gauss_legendre(n);
		CHECK(a.nodes == b.nodes);
		CHECK(a.weights == b.weights);
		const auto c = gauss_laguerre(n), d = gauss_laguerre(n);
		CHECK(c.nodes == d.nodes);
		CHECK(c.weights == d.weights);
	}
}
