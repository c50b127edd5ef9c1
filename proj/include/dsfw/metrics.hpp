#pragma once

#include <span>

namespace dsfw {

enum class Unassigned {
  Exclude,  // score only objects with pred > 0
  AsCluster // label 0 is an ordinary cluster
};

/// Fraction of labels > 0.
double assignment_rate(std::span<const int> pred);

/// Adjusted Rand index (Hubert-Arabie). Returns 1 when both partitions are a
/// single block or all singletons, where the index is otherwise 0/0.
double ari(std::span<const int> pred, std::span<const int> truth,
           Unassigned mode = Unassigned::Exclude);

struct VMeasure {
  double homogeneity = 1.0;
  double completeness = 1.0;
  double v = 1.0;
};

VMeasure v_measure_parts(std::span<const int> pred, std::span<const int> truth,
                         Unassigned mode = Unassigned::Exclude);
double v_measure(std::span<const int> pred, std::span<const int> truth,
                 Unassigned mode = Unassigned::Exclude);

}  // namespace dsfw
