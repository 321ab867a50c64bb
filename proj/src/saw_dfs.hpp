#pragma once

// Depth-first enumeration of self-avoiding unit-step walks from the origin.
// The visitor sees every prefix: enter(depth, x, cell, record) when the walk
// grows to `depth` steps ending at x, leave(depth) when it backtracks.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "ozlab/lattice.hpp"

namespace ozlab::detail {

// cubic box [-radius, radius]^d with a linear cell index
class Box {
 public:
  Box(int dim, int radius) : dim_(dim), radius_(radius) {
    std::size_t stride = 1;
    for (int i = 0; i < dim; ++i) {
      strides_[static_cast<std::size_t>(i)] = stride;
      stride *= static_cast<std::size_t>(2 * radius + 1);
    }
    cells_ = stride;
  }

  int dim() const noexcept { return dim_; }
  int radius() const noexcept { return radius_; }
  std::size_t cells() const noexcept { return cells_; }

  std::size_t index(const LatticePoint& x) const noexcept {
    std::size_t idx = 0;
    for (int i = 0; i < dim_; ++i)
      idx += static_cast<std::size_t>(x[i] + radius_) * strides_[static_cast<std::size_t>(i)];
    return idx;
  }

  LatticePoint point(std::size_t idx) const {
    LatticePoint x(dim_);
    const auto side = static_cast<std::size_t>(2 * radius_ + 1);
    for (int i = 0; i < dim_; ++i) {
      x[i] = static_cast<int>(idx % side) - radius_;
      idx /= side;
    }
    return x;
  }

  std::ptrdiff_t offset(const LatticePoint& step) const noexcept {
    std::ptrdiff_t off = 0;
    for (int i = 0; i < dim_; ++i)
      off += static_cast<std::ptrdiff_t>(step[i]) *
             static_cast<std::ptrdiff_t>(strides_[static_cast<std::size_t>(i)]);
    return off;
  }

 private:
  int dim_;
  int radius_;
  std::array<std::size_t, kMaxDim> strides_{};
  std::size_t cells_ = 0;
};

template <class Visitor>
class SawWalker {
 public:
  SawWalker(const Box& box, int max_len, Visitor& visitor)
      : box_(box), max_len_(max_len), visitor_(visitor), occupied_(box.cells(), 0) {
    for (const auto& s : unit_steps(box.dim())) {
      steps_.push_back(s);
      offsets_.push_back(box.offset(s));
    }
  }

  // root visit, then the subtree that starts with `first_step`
  void run_subtree(const LatticePoint& first_step, bool record_root) {
    const LatticePoint origin(box_.dim());
    const std::size_t root = box_.index(origin);
    occupied_[root] = 1;
    visitor_.enter(0, origin, root, record_root);
    if (max_len_ > 0) {
      const std::size_t cell = root + static_cast<std::size_t>(box_.offset(first_step));
      descend(1, first_step, cell);
    }
    visitor_.leave(0);
    occupied_[root] = 0;
  }

 private:
  void descend(int depth, const LatticePoint& x, std::size_t cell) {
    occupied_[cell] = 1;
    visitor_.enter(depth, x, cell, true);
    if (depth < max_len_) {
      for (std::size_t k = 0; k < steps_.size(); ++k) {
        const std::size_t next = cell + static_cast<std::size_t>(offsets_[k]);
        if (occupied_[next]) continue;
        descend(depth + 1, x + steps_[k], next);
      }
    }
    visitor_.leave(depth);
    occupied_[cell] = 0;
  }

  const Box& box_;
  int max_len_;
  Visitor& visitor_;
  std::vector<std::uint8_t> occupied_;
  std::vector<LatticePoint> steps_;
  std::vector<std::ptrdiff_t> offsets_;
};

// Runs one walker per first step (2d independent subtrees) on up to `threads`
// workers, each with its own copy of `prototype`, then merges the copies in
// first-step order so the result does not depend on scheduling.
template <class Visitor>
Visitor run_saw_enumeration(int dim, int max_len, const Visitor& prototype, unsigned threads) {
  const Box box(dim, std::max(max_len, 1) + 1);
  const auto firsts = unit_steps(dim);
  std::vector<Visitor> parts(firsts.size(), prototype);
  auto work = [&](std::size_t k) {
    SawWalker<Visitor> walker(box, max_len, parts[k]);
    walker.run_subtree(firsts[k], k == 0);
  };
  const std::size_t n_threads =
      std::clamp<std::size_t>(threads == 0 ? std::thread::hardware_concurrency() : threads, 1,
                              firsts.size());
  if (n_threads <= 1 || max_len == 0) {
    for (std::size_t k = 0; k < (max_len == 0 ? 1 : firsts.size()); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < firsts.size(); k += n_threads) work(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  Visitor merged = std::move(parts[0]);
  if (max_len > 0) {
    for (std::size_t k = 1; k < parts.size(); ++k) merged.merge(parts[k]);
  }
  return merged;
}

}  // namespace ozlab::detail
