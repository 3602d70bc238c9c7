#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace mcf::detail {
namespace {

constexpr double kEps = 1e-12;

struct Tableau {
  std::size_t rows;
  std::size_t cols;  // structural + artificial, excluding rhs
  std::vector<std::vector<double>> t;  // rows x (cols + 1)
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    const double p = t[r][c];
    for (double& v : t[r]) { v /= p; }
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) { continue; }
      const double f = t[i][c];
      if (f == 0.0) { continue; }
      for (std::size_t j = 0; j <= cols; ++j) { t[i][j] -= f * t[r][j]; }
    }
    basis[r] = c;
  }

  // Minimises cost over columns [0, allowed). Returns false if unbounded.
  bool run(const std::vector<double>& cost, std::size_t allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        double reduced = cost[j];
        for (std::size_t i = 0; i < rows; ++i) { reduced -= cost[basis[i]] * t[i][j]; }
        if (reduced < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) { return true; }
      std::size_t leave = rows;
      double best       = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        if (t[i][enter] > kEps) {
          const double ratio = t[i][cols] / t[i][enter];
          const bool better = ratio < best - kEps;
          const bool tie    = leave < rows && std::abs(ratio - best) <= kEps && basis[i] < basis[leave];
          if (better || tie) {
            best  = std::min(best, ratio);
            leave = i;
          }
        }
      }
      if (leave == rows) { return false; }
      pivot(leave, enter);
    }
    return false;
  }
};

}  // namespace

std::optional<double> simplex_minimize(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& c) {
  const std::size_t m = b.size();
  const std::size_t n = c.size();
  Tableau tab{m, n + m, {}, {}};
  tab.t.assign(m, std::vector<double>(n + m + 1, 0.0));
  tab.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) { tab.t[i][j] = sign * a[i][j]; }
    tab.t[i][n + i] = 1.0;
    tab.t[i][n + m] = sign * b[i];
    tab.basis[i]    = n + i;
  }

  std::vector<double> phase1(n + m, 0.0);
  for (std::size_t i = 0; i < m; ++i) { phase1[n + i] = 1.0; }
  tab.run(phase1, n + m);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) { infeasibility += tab.t[i][n + m]; }
  }
  if (infeasibility > 1e-9) { return std::nullopt; }

  // Drive remaining (zero-valued) artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] < n) { continue; }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(tab.t[i][j]) > kEps) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  std::vector<double> phase2(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) { phase2[j] = c[j]; }
  if (!tab.run(phase2, n)) { return std::nullopt; }
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] < n) { value += c[tab.basis[i]] * tab.t[i][n + m]; }
  }
  return value;
}

}  // namespace mcf::detail
