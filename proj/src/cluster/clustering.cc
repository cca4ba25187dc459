// Copyright 2026 The fedrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedrec/cluster/clustering.h"

#include <algorithm>
#include <cmath>
#include <utility>

namespace fedrec::cluster {

std::vector<int> ClusterAssignment::Sizes() const {
  std::vector<int> sizes;
  sizes.reserve(clusters.size());
  for (const auto& c : clusters) sizes.push_back(static_cast<int>(c.size()));
  return sizes;
}

std::vector<int> ClusterAssignment::Labels(int num_points) const {
  std::vector<int> labels(num_points, -1);
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (int i : clusters[c]) labels[i] = static_cast<int>(c);
  }
  return labels;
}

ClusterAssignment Canonicalize(std::vector<std::vector<int>> clusters) {
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return ClusterAssignment{std::move(clusters)};
}

absl::StatusOr<ClusterAssignment> ClusterAverageLinkage(
    const nn::Matrix& points, double threshold) {
  const int n = static_cast<int>(points.rows());
  if (n == 0) return absl::InvalidArgumentError("no points to cluster");
  if (!(threshold >= 0)) {
    return absl::InvalidArgumentError("distance threshold must be >= 0");
  }
  if (!points.allFinite()) {
    return absl::InvalidArgumentError("non-finite coordinates");
  }

  // linkage_sum[a][b]: sum of point distances between active clusters a, b,
  // indexed by cluster slot. Slot a's representative is its smallest member
  // because merges always keep the lower slot.
  nn::Matrix linkage_sum(n, n);
  for (int i = 0; i < n; ++i) {
    linkage_sum(i, i) = 0;
    for (int j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      linkage_sum(i, j) = d;
      linkage_sum(j, i) = d;
    }
  }
  std::vector<std::vector<int>> members(n);
  std::vector<bool> active(n, true);
  for (int i = 0; i < n; ++i) members[i] = {i};

  while (true) {
    int best_a = -1;
    int best_b = -1;
    double best = 0;
    // Slots are scanned in ascending order and only strict improvements are
    // taken, which yields the lexicographic (a, b) tie-break.
    for (int a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double avg =
            linkage_sum(a, b) /
            (static_cast<double>(members[a].size()) * members[b].size());
        if (best_a < 0 || avg < best) {
          best = avg;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0 || best > threshold) break;

    for (int c = 0; c < n; ++c) {
      if (!active[c] || c == best_a || c == best_b) continue;
      const double merged = linkage_sum(best_a, c) + linkage_sum(best_b, c);
      linkage_sum(best_a, c) = merged;
      linkage_sum(c, best_a) = merged;
    }
    members[best_a].insert(members[best_a].end(), members[best_b].begin(),
                           members[best_b].end());
    members[best_b].clear();
    active[best_b] = false;
  }

  std::vector<std::vector<int>> clusters;
  for (int a = 0; a < n; ++a) {
    if (active[a]) clusters.push_back(std::move(members[a]));
  }
  return Canonicalize(std::move(clusters));
}

}  // namespace fedrec::cluster
