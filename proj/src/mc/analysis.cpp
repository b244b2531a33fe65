#include "mimsynth/mc/analysis.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace mimsynth::mc {

namespace {

struct Predecessors {
  std::vector<std::size_t> start;
  std::vector<std::size_t> choice;  // choices with an edge into the state
};

std::vector<std::size_t> owner_of_choices(const SparseMdp& m)
{
  std::vector<std::size_t> owner(m.num_choices());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) owner[c] = s;
  }
  return owner;
}

Predecessors predecessors(const SparseMdp& m)
{
  Predecessors p;
  const std::size_t n = m.num_states();
  std::vector<std::size_t> count(n + 1, 0);
  for (std::size_t c = 0; c < m.num_choices(); ++c) {
    for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) {
      if (m.prob[e] > 0) ++count[m.target[e] + 1];
    }
  }
  for (std::size_t s = 0; s < n; ++s) count[s + 1] += count[s];
  p.start = count;
  p.choice.resize(count[n]);
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (std::size_t c = 0; c < m.num_choices(); ++c) {
    for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) {
      if (m.prob[e] > 0) p.choice[fill[m.target[e]]++] = c;
    }
  }
  return p;
}

// Backward closure from `seed`: s joins when some choice of s reaches the set and allowed[s].
StateSet exists_reach(const SparseMdp& m, const StateSet& seed, const StateSet& allowed)
{
  const auto pred = predecessors(m);
  const auto owner = owner_of_choices(m);
  StateSet in = seed;
  std::deque<std::size_t> work;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (in[s]) work.push_back(s);
  }
  while (!work.empty()) {
    const std::size_t t = work.front();
    work.pop_front();
    for (std::size_t k = pred.start[t]; k < pred.start[t + 1]; ++k) {
      const std::size_t s = owner[pred.choice[k]];
      if (!in[s] && allowed[s]) {
        in[s] = true;
        work.push_back(s);
      }
    }
  }
  return in;
}

StateSet complement(const StateSet& s)
{
  StateSet out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = !s[i];
  return out;
}

double choice_value(const SparseMdp& m, std::size_t c, const std::vector<double>& x)
{
  double v = 0.0;
  for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) v += m.prob[e] * x[m.target[e]];
  return v;
}

bool better(double candidate, double incumbent, Direction dir)
{
  return dir == Direction::Min ? candidate < incumbent : candidate > incumbent;
}

double tolerance(double x) { return 1e-9 * std::fabs(x) + 1e-14; }

// Gauss-Seidel iteration of x_s = cost_s + opt_c sum P x over `active` states.
ValueVector iterate(const SparseMdp& m, std::vector<double> x, const StateSet& active,
                    const std::vector<double>& cost, Direction dir, const ViOptions& options)
{
  ValueVector out;
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (active[s]) order.push_back(s);
  }
  double residual = 0.0;
  std::size_t it = 0;
  do {
    residual = 0.0;
    for (std::size_t s : order) {
      double best = dir == Direction::Min ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
      for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
        const double v = choice_value(m, c, x);
        if (better(v, best, dir)) best = v;
      }
      best += cost[s];
      const double delta = std::fabs(best - x[s]);
      if (delta > 0) residual = std::max(residual, best != 0 ? delta / std::fabs(best) : delta);
      x[s] = best;
    }
    ++it;
  } while (residual > options.epsilon && it < options.max_iterations);
  out.values = std::move(x);
  out.iterations = it;
  out.residual = residual;
  return out;
}

std::vector<std::size_t> argopt(const SparseMdp& m, const std::vector<double>& x, const StateSet& active,
                                Direction dir)
{
  std::vector<std::size_t> pick(m.num_states(), 0);
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (!active[s]) continue;
    double best = choice_value(m, m.row_start[s], x);
    for (std::size_t c = m.row_start[s] + 1; c < m.row_start[s + 1]; ++c) {
      const double v = choice_value(m, c, x);
      if (better(v, best, dir)) best = v;
    }
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
      if (std::fabs(choice_value(m, c, x) - best) <= tolerance(best)) {
        pick[s] = c - m.row_start[s];
        break;
      }
    }
  }
  return pick;
}

// Maximizing choices that make progress towards T, so end components are left.
std::vector<std::size_t> progressive_max(const SparseMdp& m, const std::vector<double>& x, const StateSet& T,
                                         const StateSet& active)
{
  std::vector<std::size_t> pick = argopt(m, x, active, Direction::Max);
  StateSet assigned = T;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      if (assigned[s] || !active[s] || x[s] <= 0) continue;
      for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
        if (std::fabs(choice_value(m, c, x) - x[s]) > 1e-8 * x[s] + 1e-12) continue;
        bool progress = false;
        for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) {
          progress = progress || (m.prob[e] > 0 && assigned[m.target[e]]);
        }
        if (progress) {
          pick[s] = c - m.row_start[s];
          assigned[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return pick;
}

void require_size(const SparseMdp& m, const StateSet& set)
{
  if (set.size() != m.num_states()) throw ModelError("state set size does not match the model");
}

}  // namespace

StateSet prob0(const SparseMdp& m, const StateSet& T, Direction dir)
{
  require_size(m, T);
  const std::size_t n = m.num_states();
  if (dir == Direction::Max) return complement(exists_reach(m, T, StateSet(n, true)));

  // R = T plus states all of whose choices can move into R.
  const auto pred = predecessors(m);
  const auto owner = owner_of_choices(m);
  StateSet in = T;
  std::vector<char> hit(m.num_choices(), 0);
  std::vector<std::size_t> missing(n);
  for (std::size_t s = 0; s < n; ++s) missing[s] = m.row_start[s + 1] - m.row_start[s];
  std::deque<std::size_t> work;
  for (std::size_t s = 0; s < n; ++s) {
    if (in[s]) work.push_back(s);
  }
  while (!work.empty()) {
    const std::size_t t = work.front();
    work.pop_front();
    for (std::size_t k = pred.start[t]; k < pred.start[t + 1]; ++k) {
      const std::size_t c = pred.choice[k];
      if (hit[c]) continue;
      hit[c] = 1;
      const std::size_t s = owner[c];
      if (--missing[s] == 0 && !in[s]) {
        in[s] = true;
        work.push_back(s);
      }
    }
  }
  return complement(in);
}

StateSet prob1(const SparseMdp& m, const StateSet& T, Direction dir)
{
  require_size(m, T);
  const std::size_t n = m.num_states();
  if (dir == Direction::Min) {
    return complement(exists_reach(m, prob0(m, T, Direction::Min), complement(T)));
  }
  StateSet u(n, true);
  while (true) {
    StateSet r = T;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t s = 0; s < n; ++s) {
        if (r[s] || !u[s]) continue;
        for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1] && !r[s]; ++c) {
          bool inside = true;
          bool hits = false;
          for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) {
            if (m.prob[e] <= 0) continue;
            inside = inside && u[m.target[e]];
            hits = hits || r[m.target[e]];
          }
          if (inside && hits) {
            r[s] = true;
            grew = true;
          }
        }
      }
    }
    if (r == u) return u;
    u = r;
  }
}

Solution reach_prob(const SparseMdp& m, const StateSet& T, Direction dir, const ViOptions& options)
{
  require_size(m, T);
  const std::size_t n = m.num_states();
  const StateSet zero = prob0(m, T, dir);
  const StateSet one = prob1(m, T, dir);
  std::vector<double> x(n, 0.0);
  StateSet active(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (one[s]) x[s] = 1.0;
    active[s] = !zero[s] && !one[s];
  }
  Solution sol;
  sol.value = iterate(m, std::move(x), active, std::vector<double>(n, 0.0), dir, options);
  StateSet choosing(n, false);
  for (std::size_t s = 0; s < n; ++s) choosing[s] = !T[s];
  sol.choice = dir == Direction::Max ? progressive_max(m, sol.value.values, T, choosing)
                                     : argopt(m, sol.value.values, choosing, dir);
  return sol;
}

Solution expected_cost(const SparseMdp& m, const StateSet& G, Direction dir, const ViOptions& options)
{
  require_size(m, G);
  const std::size_t n = m.num_states();
  const StateSet proper = prob1(m, G, Direction::Min);
  if (!proper[m.initial]) {
    throw ModelError("expected cost undefined: the goal is not reached almost surely from the initial state");
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (m.cost[s] < 0) throw ModelError("expected cost requires nonnegative state costs");
  }
  std::vector<double> x(n, 0.0);
  StateSet active(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (!proper[s]) x[s] = std::numeric_limits<double>::infinity();
    active[s] = proper[s] && !G[s];
  }
  Solution sol;
  sol.value = iterate(m, std::move(x), active, m.cost, dir, options);
  sol.choice = argopt(m, sol.value.values, active, dir);
  return sol;
}

double cost_bounded_reach(const SparseMdp& m, const StateSet& T, std::int64_t n, Direction dir,
                          const ViOptions& options)
{
  require_size(m, T);
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (m.cost[s] < 0 || std::floor(m.cost[s]) != m.cost[s]) {
      throw ModelError("cost-bounded reachability requires nonnegative integer costs");
    }
  }
  if (n <= 0) return 0.0;

  // Product over (state, accumulated cost < n); index 0 is the exhausted-budget sink.
  SparseMdp product;
  std::map<std::pair<std::size_t, std::int64_t>, std::size_t> index;
  std::vector<std::pair<std::size_t, std::int64_t>> states{{0, -1}};
  auto intern = [&](std::size_t s, std::int64_t c) {
    auto [it, inserted] = index.emplace(std::make_pair(s, c), states.size());
    if (inserted) states.emplace_back(s, c);
    return it->second;
  };
  product.initial = intern(m.initial, 0);
  StateSet target;
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto [s, c] = states[k];
    if (k == 0 || T[s]) {
      product.add_choice("", {{k, 1.0}});
      product.end_state(0.0);
      target.push_back(k != 0);
      continue;
    }
    target.push_back(false);
    const std::int64_t next = c + static_cast<std::int64_t>(m.cost[s]);
    if (next >= n) {
      product.add_choice("", {{0, 1.0}});
    } else {
      for (std::size_t ch = m.row_start[s]; ch < m.row_start[s + 1]; ++ch) {
        row.clear();
        for (std::size_t e = m.entry_start[ch]; e < m.entry_start[ch + 1]; ++e) {
          row.emplace_back(intern(m.target[e], next), m.prob[e]);
        }
        product.add_choice(m.action[ch], row);
      }
    }
    product.end_state(0.0);
  }
  return reach_prob(product, target, dir, options).at(product.initial);
}

Solution reach_prob(const ExplicitModel& m, const StateSet& T, Direction dir, const ViOptions& options)
{
  return reach_prob(SparseMdp::from_model(m), T, dir, options);
}

Solution expected_cost(const ExplicitModel& m, const StateSet& G, Direction dir, const ViOptions& options)
{
  return expected_cost(SparseMdp::from_model(m), G, dir, options);
}

double cost_bounded_reach(const ExplicitModel& m, const StateSet& T, std::int64_t n, Direction dir,
                          const ViOptions& options)
{
  return cost_bounded_reach(SparseMdp::from_model(m), T, n, dir, options);
}

}  // namespace mimsynth::mc
