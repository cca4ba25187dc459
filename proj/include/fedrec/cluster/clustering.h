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

#ifndef FEDREC_CLUSTER_CLUSTERING_H_
#define FEDREC_CLUSTER_CLUSTERING_H_

#include <vector>

#include "absl/status/statusor.h"
#include "fedrec/nn/tensor.h"

namespace fedrec::cluster {

// Disjoint clusters covering all input rows. Members are sorted ascending and
// clusters are ordered by their smallest member.
struct ClusterAssignment {
  std::vector<std::vector<int>> clusters;

  int size() const { return static_cast<int>(clusters.size()); }
  std::vector<int> Sizes() const;
  // Cluster index of every input row.
  std::vector<int> Labels(int num_points) const;
  friend bool operator==(const ClusterAssignment&,
                         const ClusterAssignment&) = default;
};

// Average-linkage agglomerative clustering under Euclidean distance. Pairs of
// clusters are merged, closest average pairwise distance first, while that
// distance is <= `threshold`. Equal distances are resolved towards the pair
// whose smaller representative (smallest member) is lowest, then the larger
// representative.
absl::StatusOr<ClusterAssignment> ClusterAverageLinkage(
    const nn::Matrix& points, double threshold);

// Sorts members and clusters into the canonical order described above.
ClusterAssignment Canonicalize(std::vector<std::vector<int>> clusters);

}  // namespace fedrec::cluster

#endif  // FEDREC_CLUSTER_CLUSTERING_H_
