#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lmfmm {

/// Chunked parallel for over [0, n). Work items must not race with each other;
/// results stay deterministic because each index is processed exactly once and
/// writes only to its own slot.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
	if (threads <= 1 || n < 2) {
		for (std::size_t i = 0; i < n; ++i) fn(i);
		return;
	}
	const int nt = std::min<std::size_t>(threads, n);
	std::atomic<std::size_t> next{0};
	std::vector<std::thread> pool;
	std::exception_ptr err = nullptr;
	std::mutex err_mtx;
	pool.reserve(nt);
	for (int t = 0; t < nt; ++t) {
		pool.emplace_back([&] {
			for (;;) {
				const std::size_t i = next.fetch_add(1);
				if (i >= n) return;
				try {
					fn(i);
				} catch (...) {
					std::lock_guard<std::mutex> lock(err_mtx);
					if (!err) err = std::current_exception();
					return;
				}
			}
		});
	}
	for (auto& th : pool) th.join();
	if (err) std::rethrow_exception(err);
}

inline int default_threads() {
	const unsigned hc = std::thread::hardware_concurrency();
	return hc == 0 ? 1 : int(hc);
}

} // namespace lmfmm
