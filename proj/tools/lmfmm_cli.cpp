// Command-line front end: kernel evaluation, N-body convolution, the two
// study commands that regenerate the benchmark CSV data, and the property
// validation runner.
//
// Exit codes: 0 ok, 2 usage/geometry error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lmfmm/csv.hpp"
#include "lmfmm/fmm.hpp"
#include "lmfmm/lmfmm.hpp"
#include "lmfmm/study.hpp"

using namespace lmfmm;

namespace {

struct KernelArgs {
	std::string kernel = "free";
	double k = 1.0, alpha = 1.0;
	double k1 = 1.0, k2 = 3.0, k3 = 1.0, d = 1.0;

	void attach(CLI::App* app) {
		app->add_option("--kernel", kernel,
		                "free | dirichlet | impedance | three-layer:{s1,s2t,s2b,s3}");
		app->add_option("--k", k, "wavenumber (single-layer kernels)");
		app->add_option("--alpha", alpha, "impedance parameter");
		app->add_option("--k1", k1, "three-layer: top wavenumber");
		app->add_option("--k2", k2, "three-layer: middle wavenumber");
		app->add_option("--k3", k3, "three-layer: bottom wavenumber");
		app->add_option("--d", d, "three-layer: slab thickness");
	}

	KernelSpec make() const {
		if (kernel == "free") return make_free_space(k);
		if (kernel == "dirichlet") return make_dirichlet_scattered(k);
		if (kernel == "impedance") return make_impedance_scattered(k, alpha);
		const ThreeLayerParams tl{k1, k2, k3, d};
		if (kernel == "three-layer:s1") return make_three_layer(tl, ThreeLayerComponent::s1);
		if (kernel == "three-layer:s2t") return make_three_layer(tl, ThreeLayerComponent::s2t);
		if (kernel == "three-layer:s2b") return make_three_layer(tl, ThreeLayerComponent::s2b);
		if (kernel == "three-layer:s3") return make_three_layer(tl, ThreeLayerComponent::s3);
		throw CLI::ValidationError("--kernel", "unknown kernel '" + kernel + "'");
	}
};

int run_eval_green(const KernelArgs& ka, double x, double y, double x0, double y0, double tol) {
	const KernelSpec spec = ka.make();
	const complexd v = eval_kernel(spec, {x, y}, {x0, y0}, tol);
	std::printf("%.17g %.17g\n", v.real(), v.imag());
	return 0;
}

int run_convolve(const KernelArgs& ka, const std::string& sources_path,
                 const std::string& targets_path, const std::string& out_path, double tol,
                 int order, int max_leaf, int threads, bool check, double cache_mb) {
	const KernelSpec spec = ka.make();
	const CsvTable st = read_csv(sources_path);
	const CsvTable tt = read_csv(targets_path);
	ConvolveJob job;
	job.spec = &spec;
	job.tol = tol;
	job.order_override = order;
	job.max_leaf = max_leaf;
	job.threads = threads;
	job.m2l_cache_bytes = std::size_t(cache_mb * 1048576.0);
	const int sx = st.column("x"), sy = st.column("y"), sqr = st.column("q_re"),
	          sqi = st.column("q_im");
	for (const auto& r : st.rows)
		job.sources.push_back({{r[sx], r[sy]}, complexd(r[sqr], r[sqi])});
	const int tx = tt.column("x"), ty = tt.column("y");
	for (const auto& r : tt.rows) job.targets.push_back({r[tx], r[ty]});
	if (job.sources.empty()) throw std::domain_error("convolve: empty sources file");
	if (job.targets.empty()) throw std::domain_error("convolve: empty targets file");

	const auto phi = convolve(job);
	CsvWriter w(out_path);
	w.header({"x", "y", "phi_re", "phi_im"});
	for (std::size_t i = 0; i < phi.size(); ++i)
		w.row(job.targets[i].x, job.targets[i].y, phi[i].real(), phi[i].imag());

	if (check) {
		ConvolveJob sub = job;
		sub.targets.clear();
		std::vector<complexd> got;
		const std::size_t step = std::max<std::size_t>(1, (job.targets.size() + 499) / 500);
		for (std::size_t i = 0; i < job.targets.size(); i += step) {
			sub.targets.push_back(job.targets[i]);
			got.push_back(phi[i]);
		}
		const auto exact = direct_sum(sub);
		double num = 0, den = 0;
		for (std::size_t i = 0; i < exact.size(); ++i) {
			num += std::norm(got[i] - exact[i]);
			den += std::norm(exact[i]);
		}
		std::printf("check: relative l2 error on %zu targets = %.3e\n", exact.size(),
		            std::sqrt(num / den));
	}
	return 0;
}

int run_quad_study(const QuadStudySetting& s, int n_min, int n_max, int n_step,
                   const std::string& out_path) {
	if (n_min < 1 || n_max < n_min || n_step < 1)
		throw std::domain_error("quad-study: sweep range must be increasing");
	const auto R = quad_study_references(s);
	CsvWriter w(out_path);
	w.comment("evanescent half-integral study at x=" + std::to_string(s.x) +
	          " y=" + std::to_string(s.y) + " k=" + std::to_string(s.k) +
	          " alpha=" + std::to_string(s.alpha) + " c=" + std::to_string(s.c));
	w.comment("references by the adaptive oracle at 1e-14");
	w.header({"representation", "n", "abs_error"});
	auto emit = [&](const char* name, complexd ref, complexd (*fn)(const QuadStudySetting&, int)) {
		for (int n = n_min; n <= n_max; n += n_step) {
			double err;
			try {
				err = std::abs(fn(s, n) - ref);
			} catch (const std::exception&) {
				err = std::nan("");
			}
			w.row(name, n, err);
		}
	};
	emit("original", R.evan,
	     [](const QuadStudySetting& q, int n) { return quad_study_original(q, n); });
	emit("contour1", R.segIII1,
	     [](const QuadStudySetting& q, int n) { return quad_study_segIII1(q, n); });
	emit("contour2", R.segIII2,
	     [](const QuadStudySetting& q, int n) { return quad_study_segIII2(q, n); });
	emit("segmentIV-1", R.segIV1,
	     [](const QuadStudySetting& q, int n) { return quad_study_segIV1(q, n); });
	emit("segmentIV-2", R.segIV2,
	     [](const QuadStudySetting& q, int n) { return quad_study_segIV2(q, n); });
	return 0;
}

int run_expansion_study(const KernelArgs& ka, const std::string& kind, double far_x, double far_y,
                        double center_x, double center_y, double r, int p_min, int p_max,
                        const std::string& parts, const std::string& out_path) {
	const KernelSpec spec = ka.make();
	ExpansionStudySetting cfg;
	if (kind == "multipole-ratio")
		cfg.kind = ExpansionStudyKind::multipole_ratio;
	else if (kind == "local-ratio")
		cfg.kind = ExpansionStudyKind::local_ratio;
	else
		throw std::domain_error("expansion-study: --study must be multipole-ratio or local-ratio");
	if (p_min < 1 || p_max < p_min)
		throw std::domain_error("expansion-study: sweep range must be increasing");
	cfg.far_point = {far_x, far_y};
	cfg.box_center = {center_x, center_y};
	cfg.r = r;
	cfg.p_min = p_min;
	cfg.p_max = p_max;
	cfg.parts = (parts == "evanescent") ? StudyParts::evanescent_only : StudyParts::both;
	const auto rows = expansion_study(spec, cfg);
	const bool local = cfg.kind == ExpansionStudyKind::local_ratio;
	const Point2 tgt_side = local ? cfg.box_center : cfg.far_point;
	const Point2 src_side = local ? cfg.far_point : cfg.box_center;
	const double rho =
	    std::hypot(tgt_side.x - src_side.x,
	               spec.target_height(tgt_side.y) + spec.source_height(src_side.y));
	CsvWriter w(out_path);
	w.comment("expansion study, r/rho = " + std::to_string(cfg.r / rho));
	w.header({"p", "mag_prop", "mag_evan", "term", "ratio"});
	for (const auto& row : rows) w.row(row.p, row.mag_prop, row.mag_evan, row.term, row.ratio);
	return 0;
}

int run_validate(std::uint64_t seed) {
	const auto rep = run_property_suite(seed);
	std::fputs(rep.str().c_str(), stdout);
	return rep.all_pass() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"layered-media Helmholtz kernels, Sommerfeld quadrature, and O(N) convolution"};
	app.require_subcommand(1);

	auto* eg = app.add_subcommand("eval-green", "evaluate one kernel value");
	KernelArgs eg_k;
	eg_k.attach(eg);
	double eg_x = 0, eg_y = 1, eg_x0 = 0, eg_y0 = 0.5, eg_tol = 1e-10;
	eg->add_option("--x", eg_x, "target x");
	eg->add_option("--y", eg_y, "target y");
	eg->add_option("--x0", eg_x0, "source x");
	eg->add_option("--y0", eg_y0, "source y");
	eg->add_option("--tol", eg_tol, "relative tolerance");

	auto* cv = app.add_subcommand("convolve", "N-body convolution via the adapted FMM");
	KernelArgs cv_k;
	cv_k.attach(cv);
	std::string cv_sources, cv_targets, cv_out = "phi.csv";
	double cv_tol = 1e-6;
	int cv_order = 0, cv_leaf = 30, cv_threads = default_threads();
	double cv_cache_mb = 512.0;
	bool cv_check = false;
	cv->add_option("--sources", cv_sources, "sources CSV (x,y,q_re,q_im)")->required();
	cv->add_option("--targets", cv_targets, "targets CSV (x,y)")->required();
	cv->add_option("--out", cv_out, "output CSV (x,y,phi_re,phi_im)");
	cv->add_option("--tol", cv_tol, "relative l2 tolerance");
	cv->add_option("--order", cv_order, "expansion order override (0 = automatic)");
	cv->add_option("--max-leaf", cv_leaf, "leaf capacity");
	cv->add_option("--threads", cv_threads, "worker threads");
	cv->add_option("--m2l-cache-mb", cv_cache_mb, "translation-matrix cache bound (MB)");
	cv->add_flag("--check", cv_check, "verify against direct summation on <= 500 targets");

	auto* qs = app.add_subcommand("quad-study",
	                              "quadrature convergence of the five representations");
	QuadStudySetting qs_s;
	std::string qs_out = "quad_study.csv";
	int qs_nmin = 4, qs_nmax = 256, qs_nstep = 4;
	qs->add_option("--x", qs_s.x, "horizontal separation");
	qs->add_option("--y", qs_s.y, "vertical separation");
	qs->add_option("--k", qs_s.k, "wavenumber");
	qs->add_option("--alpha", qs_s.alpha, "impedance parameter");
	qs->add_option("--c", qs_s.c, "contour shift");
	qs->add_option("--n-min", qs_nmin, "smallest node count");
	qs->add_option("--n-max", qs_nmax, "largest node count");
	qs->add_option("--n-step", qs_nstep, "node count step");
	qs->add_option("--out", qs_out, "output CSV");

	auto* es = app.add_subcommand("expansion-study", "|J_p B_p| decay and ratio study");
	KernelArgs es_k;
	es_k.kernel = "impedance";
	es_k.attach(es);
	std::string es_kind = "multipole-ratio", es_parts = "both", es_out = "expansion_study.csv";
	double es_fx = 2.0, es_fy = 2.5, es_cx = 0.0, es_cy = 0.5, es_r = 1.5;
	int es_pmin = 1, es_pmax = 60;
	es->add_option("--study", es_kind, "multipole-ratio | local-ratio");
	es->add_option("--far-x", es_fx, "far point x (target for multipole, source for local)");
	es->add_option("--far-y", es_fy, "far point y");
	es->add_option("--center-x", es_cx, "box center x");
	es->add_option("--center-y", es_cy, "box center y");
	es->add_option("--r", es_r, "in-box distance used in J_p(k r)");
	es->add_option("--p-min", es_pmin, "first order");
	es->add_option("--p-max", es_pmax, "last order");
	es->add_option("--parts", es_parts, "both | evanescent (waveguiding settings need evanescent)");
	es->add_option("--out", es_out, "output CSV");

	auto* va = app.add_subcommand("validate", "run the seeded property suite");
	std::uint64_t va_seed = 2024;
	va->add_option("--seed", va_seed, "randomness seed");

	CLI11_PARSE(app, argc, argv);

	try {
		if (eg->parsed()) return run_eval_green(eg_k, eg_x, eg_y, eg_x0, eg_y0, eg_tol);
		if (cv->parsed())
			return run_convolve(cv_k, cv_sources, cv_targets, cv_out, cv_tol, cv_order, cv_leaf,
			                    cv_threads, cv_check, cv_cache_mb);
		if (qs->parsed()) return run_quad_study(qs_s, qs_nmin, qs_nmax, qs_nstep, qs_out);
		if (es->parsed())
			return run_expansion_study(es_k, es_kind, es_fx, es_fy, es_cx, es_cy, es_r, es_pmin,
			                           es_pmax, es_parts, es_out);
		if (va->parsed()) return run_validate(va_seed);
	} catch (const QuadratureFailure& e) {
		std::fprintf(stderr, "numerical failure: %s (achieved %.3e)\n", e.what(), e.achieved_error);
		return 3;
	} catch (const CLI::Error& e) {
		return app.exit(e);
	} catch (const std::domain_error& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 2;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 3;
	}
	return 2;
}
