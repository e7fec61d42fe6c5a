#pragma once

// Algorithm driver: upward pass (free-space S2M/M2M), downward pass (L2L,
// interaction-list M2L, and promotion of near pairs to M2L whenever the
// image-corrected modified distance validates the multipole expansion),
// local evaluation (L2T) and direct S2T for whatever near pairs remain.
//
// The free-space family runs through the identical driver with the Hankel
// addition theorem M2L; S2M, M2M and L2L are shared between the free-space
// and layered paths.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lmfmm/expansions.hpp"
#include "lmfmm/greens.hpp"
#include "lmfmm/parallel.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/translations.hpp"
#include "lmfmm/tree.hpp"

namespace lmfmm {

struct ConvolveJob {
	const KernelSpec* spec = nullptr;
	std::vector<Particle> sources;
	std::vector<Point2> targets;
	double tol = 1e-6;
	int max_leaf = 30;
	int order_override = 0; // 0 = per-level estimate
	int threads = 1;
	std::size_t m2l_cache_bytes = std::size_t(512) << 20;
};

namespace fmmdetail {

constexpr double promotion_eta = 2.0;

struct Engine {
	const KernelSpec& spec;
	const ConvolveJob& job;
	QuadTree tree;
	std::vector<int> order;                   // per level
	std::vector<MultipoleExpansion> multipole; // per box
	std::vector<LocalExpansion> local;         // per box
	std::vector<char> has_multipole, has_local;
	M2LCache cache;
	QuadTree::NearLists near;
	// per target box: list of promoted (source box, matrix) M2L contributions
	std::vector<std::vector<std::pair<int, const M2LMatrix*>>> m2l_in;
	std::vector<std::vector<std::pair<int, int>>> s2t_in; // per target LEAF: source ranges
	ContourPlan s2t_plan;                                 // shared near-field plan
	bool free_space;

	Engine(const ConvolveJob& j)
	    : spec(*j.spec), job(j), free_space(j.spec->family == KernelFamily::free_space) {}

	void check_admissible() {
		// per-point layer membership; pairwise admissibility is then automatic
		auto check_src = [&](Point2 p) {
			if (spec.family == KernelFamily::dirichlet_scattered ||
			    spec.family == KernelFamily::impedance_scattered) {
				if (p.y < 0) throw std::domain_error("convolve: source below the interface");
			} else if (spec.family == KernelFamily::three_layer) {
				if (p.y <= 0) throw std::domain_error("convolve: three-layer source must have y > 0");
			}
		};
		auto check_tgt = [&](Point2 p) {
			switch (spec.family) {
				case KernelFamily::free_space: break;
				case KernelFamily::dirichlet_scattered:
				case KernelFamily::impedance_scattered:
					if (p.y < 0) throw std::domain_error("convolve: target below the interface");
					break;
				case KernelFamily::three_layer:
					(void)canonical_geometry(spec, p, {p.x, 1.0}); // throws on wrong layer
					break;
			}
		};
		for (const auto& p : job.sources) check_src(p.position);
		for (const auto& t : job.targets) check_tgt(t);
	}

	double quad_tol() const { return std::min(1e-8, job.tol / 20.0); }
	double order_eps() const { return job.tol / 10.0; }

	void choose_orders() {
		order.assign(tree.levels.size(), 4);
		const double kp = spec.k_max();
		for (std::size_t l = 0; l < tree.levels.size(); ++l) {
			if (tree.levels[l].empty()) continue;
			const double hw = tree.boxes[tree.levels[l][0]].half_width;
			const double r = hw * M_SQRT2;
			// standard V-list worst case: centers two widths apart
			const ModifiedDistance rho{4.0 * hw - r};
			order[l] = (job.order_override > 0) ? job.order_override
			                                    : estimate_order(r, rho, order_eps(), kp);
		}
	}

	// ---- upward pass ----
	void upward() {
		multipole.assign(tree.boxes.size(), {});
		has_multipole.assign(tree.boxes.size(), 0);
		std::vector<Particle> perm(job.sources.size());
		for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = job.sources[tree.src_order[i]];
		for (int l = tree.depth(); l >= 0; --l) {
			const auto& lvl = tree.levels[l];
			parallel_for(lvl.size(), job.threads, [&](std::size_t i) {
				const int b = lvl[i];
				const BoxNode& box = tree.boxes[b];
				if (box.src_count() == 0) return;
				const int P = order[l];
				if (box.leaf) {
					multipole[b] = s2m({perm.data() + box.src_begin, std::size_t(box.src_count())},
					                   box.center, spec.k_source, P);
				} else {
					MultipoleExpansion acc{box.center, spec.k_source, P,
					                       std::vector<complexd>(2 * P + 1, complexd(0, 0))};
					for (int c : box.child) {
						if (c < 0 || tree.boxes[c].src_count() == 0) continue;
						const MultipoleExpansion shifted = m2m(multipole[c], box.center, P);
						for (int p = -P; p <= P; ++p) acc.at(p) += shifted.at(p);
					}
					multipole[b] = std::move(acc);
				}
				has_multipole[b] = 1;
			});
		}
	}

	// promotion criterion: multipole of S valid across all of T
	bool promotable(const BoxNode& S, const BoxNode& T) const {
		if (free_space) {
			const double rho = dist(S.center, T.center);
			return rho >= promotion_eta * (S.half_diag() + T.half_diag());
		}
		const ModifiedDistance rho =
		    modified_distance(spec, T.center, S.center, ExpansionRole::local);
		return rho.rho >= promotion_eta * (S.half_diag() + T.half_diag());
	}

	M2LCache::Key make_key(int sb, int tb) const {
		const BoxNode& S = tree.boxes[sb];
		const BoxNode& T = tree.boxes[tb];
		// horizontal translation invariance only; vertical indices enter absolutely
		const std::int64_t dix =
		    (T.ix << (tree.depth() + 1 - T.level)) - (S.ix << (tree.depth() + 1 - S.level));
		return {S.level, T.level, dix, S.iy, T.iy, order[T.level], order[S.level]};
	}

	const M2LMatrix* cached_matrix(int sb, int tb) {
		const M2LCache::Key key = make_key(sb, tb);
		if (const M2LMatrix* m = cache.find(key)) return m;
		M2LMatrix m = m2l_matrix(spec, tree.boxes[sb].center, tree.boxes[tb].center, key.P, key.Q,
		                         quad_tol());
		return cache.insert(key, std::move(m));
	}

	// ---- downward pass ----
	void downward() {
		local.assign(tree.boxes.size(), {});
		has_local.assign(tree.boxes.size(), 0);
		near = tree.near_lists();
		m2l_in.assign(tree.boxes.size(), {});
		s2t_in.assign(tree.boxes.size(), {});
		// route near pairs: promoted ones become M2L, the rest stay S2T
		// a self box (sb == tb) is promotable too when the image distance allows
		auto route = [&](int tb, int sb) {
			const BoxNode& S = tree.boxes[sb];
			const BoxNode& T = tree.boxes[tb];
			if (promotable(S, T))
				m2l_in[tb].emplace_back(sb, nullptr);
			else
				s2t_in[tb].emplace_back(S.src_begin, S.src_end);
		};
		for (const auto& [tb, sb] : near.u) route(tb, sb);
		for (const auto& [tb, sb] : near.w) route(tb, sb);
		for (const auto& [tb, sb] : near.x) route(tb, sb);
		// V lists
		std::vector<std::vector<int>> vlists(tree.boxes.size());
		for (std::size_t l = 2; l < tree.levels.size(); ++l) {
			for (int b : tree.levels[l]) {
				if (tree.boxes[b].tgt_count() == 0) continue;
				for (int s : tree.interaction_list(b))
					if (tree.boxes[s].src_count() > 0) vlists[b].push_back(s);
			}
		}
		// build matrices serially per level (cache dedup), then apply in parallel
		for (std::size_t l = 1; l < tree.levels.size(); ++l) {
			const auto& lvl = tree.levels[l];
			if (!free_space) {
				if (cache.bytes() > job.m2l_cache_bytes) cache.clear(); // coarse level-wise bound
				for (int b : lvl) {
					if (tree.boxes[b].tgt_count() == 0) continue;
					for (int s : vlists[b]) (void)cached_matrix(s, b);
					for (auto& [s, mat] : m2l_in[b]) mat = cached_matrix(s, b);
				}
			}
			parallel_for(lvl.size(), job.threads, [&](std::size_t i) {
				const int b = lvl[i];
				const BoxNode& box = tree.boxes[b];
				if (box.tgt_count() == 0) return;
				const int P = order[l];
				LocalExpansion acc{box.center, spec.k_target, P,
				                   std::vector<complexd>(2 * P + 1, complexd(0, 0))};
				if (box.parent >= 0 && has_local[box.parent]) {
					const LocalExpansion shifted = l2l(local[box.parent], box.center, P);
					for (int p = -P; p <= P; ++p) acc.at(p) += shifted.at(p);
				}
				auto add = [&](const LocalExpansion& le) {
					for (int p = -P; p <= P; ++p) acc.at(p) += le.at(p);
				};
				for (int s : vlists[b]) {
					if (free_space)
						add(m2l_free_space(multipole[s], box.center, P));
					else {
						const M2LMatrix* m = cache_lookup_only(s, b);
						add(m2l_apply(*m, multipole[s], spec.k_target));
					}
				}
				for (const auto& [s, mat] : m2l_in[b]) {
					if (free_space)
						add(m2l_free_space(multipole[s], box.center, P));
					else
						add(m2l_apply(*mat, multipole[s], spec.k_target));
				}
				local[b] = std::move(acc);
				has_local[b] = 1;
			});
		}
	}

	const M2LMatrix* cache_lookup_only(int sb, int tb) { return cache.find(make_key(sb, tb)); }

	// ---- evaluation ----
	std::vector<complexd> evaluate() {
		std::vector<complexd> phi(job.targets.size(), complexd(0, 0));
		// gather S2T ranges up the ancestor chains: a target particle in leaf T
		// receives S2T from every ancestor box's list (X pairs land on internal
		// boxes). Collect per-leaf lists once.
		std::vector<std::vector<std::pair<int, int>>> leaf_s2t(tree.boxes.size());
		for (int b : tree.leaves()) {
			if (tree.boxes[b].tgt_count() == 0) continue;
			int cur = b;
			while (cur >= 0) {
				for (const auto& r : s2t_in[cur]) leaf_s2t[b].push_back(r);
				cur = tree.boxes[cur].parent;
			}
			std::sort(leaf_s2t[b].begin(), leaf_s2t[b].end());
		}
		const auto& leaves = tree.leaves();
		parallel_for(leaves.size(), job.threads, [&](std::size_t i) {
			const int b = leaves[i];
			const BoxNode& box = tree.boxes[b];
			if (box.tgt_count() == 0) return;
			for (int ti = box.tgt_begin; ti < box.tgt_end; ++ti) {
				const Point2 x = job.targets[tree.tgt_order[ti]];
				complexd acc = has_local[b] ? l2t(local[b], x) : complexd(0, 0);
				for (const auto& [sb, se] : leaf_s2t[b]) {
					for (int si = sb; si < se; ++si) {
						const Particle& p = job.sources[tree.src_order[si]];
						acc += p.charge * eval_one(x, p.position);
					}
				}
				phi[tree.tgt_order[ti]] = acc;
			}
		});
		return phi;
	}

	complexd eval_one(Point2 x, Point2 x0) const {
		if (free_space) return complexd(0, 0.25) * hankel0(spec.k_target * dist(x, x0));
		const CanonicalGeometry g = canonical_geometry(spec, x, x0);
		detail::Integrand f(spec, g);
		detail::PowerBatch b;
		complexd out;
		detail::integrate_batch(f, b, detail::bulk_plan(spec, g), detail::part_all, &out);
		return out;
	}

	std::vector<complexd> run() {
		check_admissible();
		std::vector<Point2> src_pts(job.sources.size());
		for (std::size_t i = 0; i < src_pts.size(); ++i) src_pts[i] = job.sources[i].position;
		tree = QuadTree::build(src_pts, job.targets, job.max_leaf);
		choose_orders();
		upward();
		downward();
		return evaluate();
	}
};

} // namespace fmmdetail

/// Fast convolution phi(x_i) = sum_j q_j g(x_i, x_j) for all targets.
inline std::vector<complexd> convolve(const ConvolveJob& job) {
	if (!job.spec) throw std::invalid_argument("convolve: missing kernel spec");
	if (job.sources.empty()) throw std::domain_error("convolve: no sources");
	if (job.targets.empty()) throw std::domain_error("convolve: no targets");
	fmmdetail::Engine eng(job);
	return eng.run();
}

/// O(N M) reference summation; the validation oracle for convolve.
inline std::vector<complexd> direct_sum(const ConvolveJob& job) {
	if (!job.spec) throw std::invalid_argument("direct_sum: missing kernel spec");
	const double nm = double(job.sources.size()) * double(job.targets.size());
	if (nm > 1e7) throw std::domain_error("direct_sum: N*M exceeds 1e7 guard");
	const KernelSpec& spec = *job.spec;
	const bool fs = spec.family == KernelFamily::free_space;
	std::vector<complexd> phi(job.targets.size());
	parallel_for(job.targets.size(), job.threads, [&](std::size_t i) {
		complexd acc(0, 0);
		detail::PowerBatch b;
		complexd val;
		for (const auto& p : job.sources) {
			if (fs) {
				acc += p.charge * complexd(0, 0.25) * hankel0(spec.k_target * dist(job.targets[i], p.position));
			} else {
				const CanonicalGeometry g = canonical_geometry(spec, job.targets[i], p.position);
				detail::Integrand f(spec, g);
				detail::integrate_batch(f, b, detail::bulk_plan(spec, g), detail::part_all, &val);
				acc += p.charge * val;
			}
		}
		phi[i] = acc;
	});
	return phi;
}

} // namespace lmfmm
