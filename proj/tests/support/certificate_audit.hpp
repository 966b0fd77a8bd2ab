#pragma once

// Process-wide tally of every certificate produced by a test, re-checked
// from the graph with the brute-force oracle.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <span>

#include "oracles.hpp"
#include "sze/partition.hpp"

namespace sze::audit {

struct Tally {
  std::atomic<std::size_t> checked{0};
  std::atomic<std::size_t> violations{0};
};

inline Tally& tally() {
  static Tally t;
  return t;
}

/// Re-checks one irregular verdict; returns false on a violation.
inline bool check(const Graph& g, const VertexSet& c_r, const VertexSet& c_s, const PairStatus& status,
                  double epsilon) {
  if (status.verdict != Verdict::irregular) return true;
  ++tally().checked;
  bool sound = status.certificate.has_value();
  if (sound) {
    const auto& cert = *status.certificate;
    const std::vector<Vertex> x(cert.x.begin(), cert.x.end());
    const std::vector<Vertex> y(cert.y.begin(), cert.y.end());
    const std::vector<Vertex> a(c_r.begin(), c_r.end());
    const std::vector<Vertex> b(c_s.begin(), c_s.end());
    const double e4 = std::pow(epsilon, 4);
    const double min_size = e4 / 16.0 * static_cast<double>(a.size());
    sound = !x.empty() && !y.empty() && std::includes(a.begin(), a.end(), x.begin(), x.end()) &&
            std::includes(b.begin(), b.end(), y.begin(), y.end()) &&
            static_cast<double>(x.size()) >= min_size && static_cast<double>(y.size()) >= min_size &&
            std::abs(oracle::density(g, x, y) - oracle::density(g, a, b)) >= e4;
  }
  if (!sound) ++tally().violations;
  return sound;
}

inline void check_all(const Graph& g, const EquitablePartition& p, std::span<const PairStatus> statuses,
                      double epsilon) {
  const std::size_t k = p.class_count();
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r + 1; s < k; ++s) check(g, p.classes[r], p.classes[s], statuses[pair_index(r, s, k)], epsilon);
  }
}

/// Observer for find_regular_partition that audits every round.
inline IterationObserver observer(double epsilon) {
  return [epsilon](const Graph& g, const EquitablePartition& p, std::span<const PairStatus> statuses) {
    check_all(g, p, statuses, epsilon);
  };
}

}  // namespace sze::audit
