#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ignorance/functional.hpp"
#include "ignorance/tree.hpp"

// Brute-force cross-checks used by the scenario runner. They share no code
// with the closed forms they check.
namespace ignorance::oracle {

/// Every depth-`depth` proposition sequence from `root`'s frontier holding
/// both targets once and residuals elsewhere, as signatures ("~<depth>" for
/// residual steps), sorted.
std::vector<std::vector<std::string>> joint_signatures(const KnowledgeState& root,
                                                       const std::pair<std::string, std::string>& targets,
                                                       int depth);

/// Ordered path sum computed from slot names built independently of the tree.
double joint_sum(const KnowledgeState& root, const std::pair<std::string, std::string>& order, int depth,
                 const ProbabilityAssignment& a);

/// Maximizer of a one-dimensional function on [lo, hi]: a grid of `step`
/// refined around the best point until the spacing drops below 1e-10.
double grid_argmax(const std::function<double(double)>& f, double lo, double hi, double step = 1e-3);

/// Maximizer of f over the probability simplex in `dim` (<= 3) coordinates.
std::vector<double> simplex_argmax(const std::function<double(const std::vector<double>&)>& f, std::size_t dim,
                                   double step = 1e-3);

/// Stationary value of one slot of a separable H: H is scanned along that
/// slot with every other slot held at `base`.
double slot_argmax(const IgnoranceFunctional& h, const SlotId& slot, const ProbabilityAssignment& base);

/// H summed term by term without the library's evaluator.
double direct_evaluate(const IgnoranceFunctional& h, const ProbabilityAssignment& a);

}  // namespace ignorance::oracle
