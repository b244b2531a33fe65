#include "mimsynth/synth/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace mimsynth::synth {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr std::size_t kPivotCap = 5'000'000;

struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // excluding the rhs column
  std::vector<double> a;  // rows x (cols + 1), rhs last
  std::vector<double> z;  // reduced costs, -objective last
  std::vector<std::size_t> basis;
  std::size_t pivots = 0;

  double& at(std::size_t i, std::size_t j) { return a[i * (cols + 1) + j]; }
  double rhs(std::size_t i) const { return a[i * (cols + 1) + cols]; }

  void pivot(std::size_t r, std::size_t c)
  {
    const double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j <= cols; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = z[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= cols; ++j) z[j] -= f * at(r, j);
      z[c] = 0.0;
    }
    basis[r] = c;
    if (++pivots > kPivotCap) throw std::runtime_error("simplex pivot limit exceeded");
  }

  void price(const std::vector<double>& cost)
  {
    z.assign(cols + 1, 0.0);
    for (std::size_t j = 0; j < cols; ++j) z[j] = cost[j];
    for (std::size_t i = 0; i < rows; ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) z[j] -= cb * at(i, j);
    }
  }

  /// Returns false when unbounded.
  bool optimize(std::size_t allowed_cols)
  {
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (z[j] < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed_cols) return true;
      std::size_t leave = rows;
      double best = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        const double v = at(i, enter);
        if (v <= kPivotTol) continue;
        const double ratio = rhs(i) / v;
        if (leave == rows || ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

std::size_t LinearProgram::add_variable(double cost, double lo, double hi)
{
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return objective.size() - 1;
}

void LinearProgram::add_constraint(std::vector<std::pair<std::size_t, double>> terms, Sense sense, double rhs)
{
  constraints.push_back({std::move(terms), sense, rhs});
}

LpSolution solve(const LinearProgram& lp)
{
  const std::size_t n = lp.num_variables();
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j])) throw std::invalid_argument("lower bounds must be finite");
    if (lp.upper[j] < lp.lower[j]) return {};
  }

  // Rows over the shifted variables x' = x - lower, with nonnegative right-hand sides.
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    Sense sense;
    double rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : lp.constraints) {
    Row r{c.terms, c.sense, c.rhs};
    for (const auto& [j, v] : c.terms) r.rhs -= v * lp.lower[j];
    rows.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper[j])) rows.push_back({{{j, 1.0}}, Sense::Le, lp.upper[j] - lp.lower[j]});
  }
  for (auto& r : rows) {
    if (r.rhs < 0) {
      r.rhs = -r.rhs;
      for (auto& t : r.terms) t.second = -t.second;
      if (r.sense == Sense::Le) {
        r.sense = Sense::Ge;
      } else if (r.sense == Sense::Ge) {
        r.sense = Sense::Le;
      }
    }
  }

  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::Eq) ++slack_count;
    if (r.sense != Sense::Le) ++artificial_count;
  }
  Tableau t;
  t.rows = rows.size();
  const std::size_t real_cols = n + slack_count;
  t.cols = real_cols + artificial_count;
  t.a.assign(t.rows * (t.cols + 1), 0.0);
  t.basis.assign(t.rows, 0);
  std::size_t slack = n;
  std::size_t artificial = real_cols;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i].terms) t.at(i, j) += v;
    t.at(i, t.cols) = rows[i].rhs;
    if (rows[i].sense == Sense::Le) {
      t.at(i, slack) = 1.0;
      t.basis[i] = slack++;
    } else {
      if (rows[i].sense == Sense::Ge) t.at(i, slack++) = -1.0;
      t.at(i, artificial) = 1.0;
      t.basis[i] = artificial++;
    }
  }

  LpSolution out;
  if (artificial_count > 0) {
    std::vector<double> phase1(t.cols, 0.0);
    for (std::size_t j = real_cols; j < t.cols; ++j) phase1[j] = 1.0;
    t.price(phase1);
    t.optimize(t.cols);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i) {
      if (t.basis[i] >= real_cols) infeasibility += t.rhs(i);
    }
    if (infeasibility > 1e-8) {
      out.pivots = t.pivots;
      return out;
    }
    // Drive zero-level artificials out; rows where that fails are redundant.
    for (std::size_t i = 0; i < t.rows; ++i) {
      if (t.basis[i] < real_cols) continue;
      for (std::size_t j = 0; j < real_cols; ++j) {
        if (std::fabs(t.at(i, j)) > kPivotTol) {
          t.pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> cost(t.cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.objective[j];
  t.price(cost);
  if (!t.optimize(real_cols)) {
    out.status = LpStatus::Unbounded;
    out.pivots = t.pivots;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.pivots = t.pivots;
  out.x.assign(n, 0.0);
  for (std::size_t i = 0; i < t.rows; ++i) {
    if (t.basis[i] < n) out.x[t.basis[i]] = t.rhs(i);
  }
  out.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.x[j] += lp.lower[j];
    out.objective += lp.objective[j] * out.x[j];
  }
  return out;
}

}  // namespace mimsynth::synth
