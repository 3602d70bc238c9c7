#pragma once

#include <optional>
#include <vector>

namespace mcf::detail {

/// Dense two-phase simplex with Bland's rule for
///   minimise cᵀy  subject to  A y = b, y ≥ 0.
/// `a` is row-major with rows.size() == b.size(). Returns the optimal value,
/// or nullopt if the problem is infeasible or unbounded.
std::optional<double> simplex_minimize(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& c);

}  // namespace mcf::detail
