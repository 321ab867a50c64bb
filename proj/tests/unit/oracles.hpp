#pragma once

// Independent brute-force oracles. Deliberately naive: plain recursion over
// vertex lists with linear self-avoidance checks, no shared code with the
// library enumerators.

#include <cmath>
#include <functional>
#include <vector>

#include "ozlab/lattice.hpp"

namespace oracle {

using Walk = std::vector<ozlab::LatticePoint>;

inline void walks_rec(Walk& w, int max_len, const std::function<void(const Walk&)>& f) {
  f(w);
  if (static_cast<int>(w.size()) - 1 == max_len) return;
  const int d = w.back().dim();
  for (int i = 0; i < d; ++i)
    for (int s : {1, -1}) {
      ozlab::LatticePoint nxt = w.back();
      nxt[i] += s;
      bool seen = false;
      for (const auto& v : w) seen = seen || v == nxt;
      if (seen) continue;
      w.push_back(nxt);
      walks_rec(w, max_len, f);
      w.pop_back();
    }
}

// every self-avoiding walk from the origin with at most max_len steps
inline void for_each_walk(int dim, int max_len, const std::function<void(const Walk&)>& f) {
  Walk w{ozlab::LatticePoint(dim)};
  walks_rec(w, max_len, f);
}

inline long long count_walks(int dim, int n) {
  long long c = 0;
  for_each_walk(dim, n, [&](const Walk& w) { c += static_cast<int>(w.size()) - 1 == n; });
  return c;
}

}  // namespace oracle
