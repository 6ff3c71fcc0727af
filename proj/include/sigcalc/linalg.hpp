#pragma once

// Sparse relations over F_ell and their dense Gaussian solver.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sigcalc/arith.hpp"

namespace sigcalc {

/// sum_i coeff_i * unknown_i = constant over F_ell. Column ids index into
/// the caller's unknown list; coefficients are kept reduced and nonzero.
struct Relation {
  std::vector<std::pair<std::size_t, i64>> terms;  // sorted by column, distinct
  i64 constant = 0;

  Relation() = default;

  Relation(const std::vector<std::pair<std::size_t, i64>>& raw, i64 rhs, i64 ell) : constant(mod(rhs, ell)) {
    std::map<std::size_t, i64> acc;
    for (auto [col, c] : raw) acc[col] = mod(acc[col] + mod(c, ell), ell);
    for (auto [col, c] : acc) {
      if (c != 0) terms.emplace_back(col, c);
    }
  }

  bool trivial() const { return terms.empty() && constant == 0; }

  /// Value of the left side under an assignment, minus the constant.
  i64 residual(const std::vector<i64>& values, i64 ell) const {
    i64 s = -constant;
    for (auto [col, c] : terms) s = mod(s + mulmod(c, values.at(col), ell), ell);
    return mod(s, ell);
  }
};

struct LinearSolution {
  std::vector<std::optional<i64>> values;  // per column; nullopt = not determined
  std::size_t rank = 0;
  std::size_t solution_dimension = 0;      // number of free columns
};

/// Gaussian elimination over F_ell. Throws Inconsistent when the relations
/// contradict each other, and RankDeficient when any column listed in
/// `required` is left undetermined.
inline LinearSolution solve_linear_mod_ell(const std::vector<Relation>& relations, std::size_t columns, i64 ell,
                                           const std::vector<std::size_t>& required = {},
                                           const std::vector<std::string>& names = {}) {
  if (ell < 2) throw Error(Errc::BadInput, "modulus must be a prime >= 2");
  const std::size_t width = columns + 1;
  std::vector<std::vector<i64>> m;
  m.reserve(relations.size());
  for (const auto& r : relations) {
    std::vector<i64> row(width, 0);
    for (auto [col, c] : r.terms) {
      if (col >= columns) throw Error(Errc::BadInput, "relation column out of range");
      row[col] = mod(c, ell);
    }
    row[columns] = mod(r.constant, ell);
    m.push_back(std::move(row));
  }

  std::vector<std::size_t> pivot_col_of_row;
  std::vector<bool> is_pivot(columns, false);
  std::size_t row = 0;
  for (std::size_t col = 0; col < columns && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    i64 inv = invmod(m[row][col], ell);
    for (std::size_t j = col; j < width; ++j) m[row][j] = mulmod(m[row][j], inv, ell);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      i64 f = m[r][col];
      for (std::size_t j = col; j < width; ++j) {
        if (m[row][j] != 0) m[r][j] = mod(m[r][j] - mulmod(f, m[row][j], ell), ell);
      }
    }
    is_pivot[col] = true;
    pivot_col_of_row.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < m.size(); ++r) {
    if (m[r][columns] != 0) throw Error(Errc::Inconsistent, "relations have no common solution");
  }

  LinearSolution sol;
  sol.values.assign(columns, std::nullopt);
  sol.rank = row;
  sol.solution_dimension = columns - row;
  for (std::size_t r = 0; r < row; ++r) {
    std::size_t col = pivot_col_of_row[r];
    bool determined = true;
    for (std::size_t j = col + 1; j < columns; ++j) {
      if (!is_pivot[j] && m[r][j] != 0) {
        determined = false;
        break;
      }
    }
    if (determined) sol.values[col] = m[r][columns];
  }

  std::vector<std::string> missing;
  for (std::size_t col : required) {
    if (col >= columns) throw Error(Errc::BadInput, "required column out of range");
    if (!sol.values[col]) missing.push_back(col < names.size() ? names[col] : "#" + std::to_string(col));
  }
  if (!missing.empty()) throw RankDeficientError(std::move(missing));
  return sol;
}

}  // namespace sigcalc
