#pragma once

// Adaptive, 2:1 level-restricted quadtree over sources and targets together
// (one geometry, two index sets). Interaction (V), near (U), and the two
// cross-level lists (W: big target leaf vs deeper separated source subtree;
// X: coarse source leaf vs deeper separated target box) are enumerated by the
// first-separation rule, which covers every source-target pair exactly once:
// descend both ancestor paths while the boxes touch; the pair is assigned to
// the first level at which they stop touching (or to U if they never do).

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "lmfmm/expansions.hpp"
#include "lmfmm/geometry.hpp"

namespace lmfmm {

struct BoxNode {
	int level = 0;
	std::int64_t ix = 0, iy = 0; // grid coordinates at this level
	Point2 center;
	double half_width = 0.0;
	int parent = -1;
	std::array<int, 4> child{-1, -1, -1, -1};
	bool leaf = true;
	// index ranges into the permuted particle orders
	int src_begin = 0, src_end = 0;
	int tgt_begin = 0, tgt_end = 0;

	int src_count() const { return src_end - src_begin; }
	int tgt_count() const { return tgt_end - tgt_begin; }
	double half_diag() const { return half_width * M_SQRT2; }
};

class QuadTree {
public:
	std::vector<BoxNode> boxes;            // creation order; root = 0
	std::vector<std::vector<int>> levels;  // box ids per level
	std::vector<int> src_order, tgt_order; // permutations into the caller's arrays
	int max_leaf = 30;

	const BoxNode& root() const { return boxes[0]; }
	int depth() const { return int(levels.size()) - 1; }

	int find(int level, std::int64_t ix, std::int64_t iy) const {
		auto it = index_.find(std::make_tuple(level, ix, iy));
		return it == index_.end() ? -1 : it->second;
	}

	/// Boxes at the same level within one cell in each direction (incl. self).
	std::vector<int> colleagues(int b) const {
		std::vector<int> out;
		const BoxNode& box = boxes[b];
		for (int dj = -1; dj <= 1; ++dj)
			for (int di = -1; di <= 1; ++di) {
				const int c = find(box.level, box.ix + di, box.iy + dj);
				if (c >= 0) out.push_back(c);
			}
		return out;
	}

	static bool touching(const BoxNode& a, const BoxNode& b) {
		const double gap = 1e-9 * (a.half_width + b.half_width);
		return std::fabs(a.center.x - b.center.x) <= a.half_width + b.half_width + gap &&
		       std::fabs(a.center.y - b.center.y) <= a.half_width + b.half_width + gap;
	}

	/// V list: same-level children of the parent's colleagues that do not touch b.
	std::vector<int> interaction_list(int b) const {
		std::vector<int> out;
		const BoxNode& box = boxes[b];
		if (box.parent < 0) return out;
		for (int pc : colleagues(box.parent)) {
			for (int c : boxes[pc].child) {
				if (c < 0 || c == b) continue;
				if (!touching(boxes[c], box)) out.push_back(c);
			}
		}
		std::sort(out.begin(), out.end());
		return out;
	}

	struct NearLists {
		// U: touching leaf-leaf pairs (target leaf t, source leaf s)
		// W: target leaf t vs deeper non-touching source subtree s
		// X: coarse source leaf s vs deeper non-touching target box t
		std::vector<std::pair<int, int>> u, w, x; // (target box, source box)
	};

	/// Near-field pairs by the first-separation rule. Only source-occupied
	/// source boxes and target-occupied target boxes are reported.
	NearLists near_lists() const {
		NearLists nl;
		for (int t : leaves_) {
			const BoxNode& T = boxes[t];
			if (T.tgt_count() == 0) continue;
			for (int c : colleagues(t)) {
				// descend the source side while it touches T
				descend_source(c, t, nl);
			}
		}
		for (int s : leaves_) {
			const BoxNode& S = boxes[s];
			if (S.src_count() == 0) continue;
			for (int c : colleagues(s)) {
				descend_target(c, s, nl);
			}
		}
		std::sort(nl.u.begin(), nl.u.end());
		std::sort(nl.w.begin(), nl.w.end());
		std::sort(nl.x.begin(), nl.x.end());
		return nl;
	}

	const std::vector<int>& leaves() const { return leaves_; }

	/// Build over the union of both point sets; subdivides while either
	/// population exceeds max_leaf. Coincident-point overflow degrades to a
	/// single leaf holding everything.
	static QuadTree build(std::span<const Point2> sources, std::span<const Point2> targets,
	                      int max_leaf);

private:
	// Target-side walk from T's colleagues: emits U for touching source leaves
	// at T's level or deeper, W at the first non-touching (deeper) source box.
	void descend_source(int s, int t, NearLists& nl) const {
		const BoxNode& S = boxes[s];
		const BoxNode& T = boxes[t];
		if (S.src_count() == 0) return;
		if (!touching(S, T)) {
			nl.w.emplace_back(t, s);
			return;
		}
		if (S.leaf) {
			nl.u.emplace_back(t, s);
			return;
		}
		for (int c : S.child)
			if (c >= 0) descend_source(c, t, nl);
	}

	// Source-side walk from S's colleagues: emits U for touching target leaves
	// strictly deeper than S (the same-level case came from the target side),
	// X at the first non-touching (deeper) target box.
	void descend_target(int t, int s, NearLists& nl) const {
		const BoxNode& T = boxes[t];
		const BoxNode& S = boxes[s];
		if (T.tgt_count() == 0) return;
		if (!touching(S, T)) {
			nl.x.emplace_back(t, s);
			return;
		}
		if (T.leaf) {
			if (T.level > S.level) nl.u.emplace_back(t, s);
			return;
		}
		for (int c : T.child)
			if (c >= 0) descend_target(c, s, nl);
	}

	std::map<std::tuple<int, std::int64_t, std::int64_t>, int> index_;
	std::vector<int> leaves_;

	void reindex() {
		index_.clear();
		leaves_.clear();
		levels.clear();
		for (int b = 0; b < int(boxes.size()); ++b) {
			const BoxNode& box = boxes[b];
			if (int(levels.size()) <= box.level) levels.resize(box.level + 1);
			levels[box.level].push_back(b);
			index_[std::make_tuple(box.level, box.ix, box.iy)] = b;
			if (box.leaf) leaves_.push_back(b);
		}
	}

	// partition a contiguous index range into the four quadrants of `box`
	template <typename GetPoint>
	static std::array<int, 5> partition4(std::vector<int>& order, int begin, int end, Point2 center,
	                                     const GetPoint& pt) {
		auto quad = [&](int idx) {
			const Point2 p = pt(idx);
			return (p.x >= center.x ? 1 : 0) + (p.y >= center.y ? 2 : 0);
		};
		std::stable_sort(order.begin() + begin, order.begin() + end,
		                 [&](int a, int b) { return quad(a) < quad(b); });
		std::array<int, 5> bounds{begin, begin, begin, begin, end};
		int pos = begin;
		for (int q = 0; q < 4; ++q) {
			while (pos < end && quad(order[pos]) == q) ++pos;
			bounds[q + 1] = pos;
		}
		bounds[4] = end;
		return bounds;
	}

	friend class TreeBuilder;
};

class TreeBuilder {
public:
	static QuadTree build(std::span<const Point2> sources, std::span<const Point2> targets,
	                      int max_leaf) {
		if (sources.empty() && targets.empty()) throw std::domain_error("build_tree: no points");
		if (max_leaf < 1) throw std::domain_error("build_tree: max_leaf >= 1 required");
		QuadTree tree;
		tree.max_leaf = max_leaf;
		tree.src_order.resize(sources.size());
		tree.tgt_order.resize(targets.size());
		for (std::size_t i = 0; i < sources.size(); ++i) tree.src_order[i] = int(i);
		for (std::size_t i = 0; i < targets.size(); ++i) tree.tgt_order[i] = int(i);

		double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
		auto absorb = [&](Point2 p) {
			xmin = std::min(xmin, p.x);
			xmax = std::max(xmax, p.x);
			ymin = std::min(ymin, p.y);
			ymax = std::max(ymax, p.y);
		};
		for (auto p : sources) absorb(p);
		for (auto p : targets) absorb(p);
		double size = std::max(xmax - xmin, ymax - ymin);
		if (size <= 0.0) size = 1.0;
		size *= 1.0 + 1e-12;
		// anchor at the lower-left corner: boxes never extend below/left of the data
		BoxNode root;
		root.level = 0;
		root.center = {xmin + 0.5 * size, ymin + 0.5 * size};
		root.half_width = 0.5 * size;
		root.src_begin = 0;
		root.src_end = int(sources.size());
		root.tgt_begin = 0;
		root.tgt_end = int(targets.size());
		tree.boxes.push_back(root);

		const auto srcpt = [&](int i) { return sources[i]; };
		const auto tgtpt = [&](int i) { return targets[i]; };
		// breadth-first subdivision
		for (std::size_t b = 0; b < tree.boxes.size(); ++b) {
			subdivide_if_needed(tree, int(b), srcpt, tgtpt);
		}
		balance(tree, srcpt, tgtpt);
		tree.reindex();
		return tree;
	}

private:
	template <typename SP, typename TP>
	static void split_box(QuadTree& tree, int b, const SP& srcpt, const TP& tgtpt) {
		BoxNode box = tree.boxes[b]; // copy; vector may reallocate
		const auto sb = QuadTree::partition4(tree.src_order, box.src_begin, box.src_end, box.center,
		                                     srcpt);
		const auto tb = QuadTree::partition4(tree.tgt_order, box.tgt_begin, box.tgt_end, box.center,
		                                     tgtpt);
		tree.boxes[b].leaf = false;
		const double hw = 0.5 * box.half_width;
		for (int q = 0; q < 4; ++q) {
			const int ns = sb[q + 1] - sb[q], nt = tb[q + 1] - tb[q];
			BoxNode c;
			c.level = box.level + 1;
			c.ix = 2 * box.ix + (q & 1);
			c.iy = 2 * box.iy + (q >> 1);
			c.center = {box.center.x + ((q & 1) ? hw : -hw), box.center.y + ((q & 2) ? hw : -hw)};
			c.half_width = hw;
			c.parent = b;
			c.src_begin = sb[q];
			c.src_end = sb[q + 1];
			c.tgt_begin = tb[q];
			c.tgt_end = tb[q + 1];
			if (ns == 0 && nt == 0) continue; // prune empty quadrants
			tree.boxes[b].child[q] = int(tree.boxes.size());
			tree.boxes.push_back(c);
		}
	}

	template <typename SP, typename TP>
	static void subdivide_if_needed(QuadTree& tree, int b, const SP& srcpt, const TP& tgtpt) {
		const BoxNode& box = tree.boxes[b];
		if (box.src_count() <= tree.max_leaf && box.tgt_count() <= tree.max_leaf) return;
		if (box.level >= 40 || box.half_width < 1e-13 * tree.boxes[0].half_width)
			return; // coincident-point fallback: oversized leaf
		split_box(tree, b, srcpt, tgtpt);
	}

	// 2:1 balance (corner-inclusive): split any leaf with a touching leaf more
	// than one level deeper.
	template <typename SP, typename TP>
	static void balance(QuadTree& tree, const SP& srcpt, const TP& tgtpt) {
		bool changed = true;
		while (changed) {
			changed = false;
			tree.reindex();
			std::vector<int> to_split;
			for (int b : tree.leaves_) {
				const BoxNode& fine = tree.boxes[b];
				if (fine.level < 2) continue;
				// the coarse neighbor cells of this leaf's parent neighborhood
				for (int dj = -1; dj <= 1; ++dj)
					for (int di = -1; di <= 1; ++di) {
						if (di == 0 && dj == 0) continue;
						// deepest existing ancestor of the neighbor cell at fine.level
						std::int64_t nx = fine.ix + di, ny = fine.iy + dj;
						int lvl = fine.level;
						int found = -1;
						while (lvl >= 0) {
							found = tree.find(lvl, nx, ny);
							if (found >= 0) break;
							nx >>= 1;
							ny >>= 1;
							--lvl;
						}
						if (found >= 0 && tree.boxes[found].leaf &&
						    fine.level - tree.boxes[found].level > 1)
							to_split.push_back(found);
					}
			}
			std::sort(to_split.begin(), to_split.end());
			to_split.erase(std::unique(to_split.begin(), to_split.end()), to_split.end());
			for (int b : to_split) {
				if (!tree.boxes[b].leaf) continue;
				split_box(tree, b, srcpt, tgtpt);
				changed = true;
			}
		}
	}
};

inline QuadTree QuadTree::build(std::span<const Point2> sources, std::span<const Point2> targets,
                                int max_leaf) {
	return TreeBuilder::build(sources, targets, max_leaf);
}

/// Convenience single-population build (spec's build_tree operation).
inline QuadTree build_tree(std::span<const Point2> points, int max_leaf) {
	return QuadTree::build(points, {}, max_leaf);
}

} // namespace lmfmm
