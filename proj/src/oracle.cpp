#include "ignorance/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ignorance/error.hpp"

namespace ignorance::oracle {

namespace {

struct Sequence {
  std::vector<std::string> ids;
  std::vector<bool> residual;
};

// All anticipation sequences of length `depth`: the root offers its own
// edges; deeper nodes offer unused propositions plus a fresh residual.
std::vector<Sequence> all_sequences(const KnowledgeState& root, const std::vector<std::string>& extra, int depth) {
  std::vector<std::pair<std::string, bool>> top;
  std::vector<std::string> events;
  for (const auto& e : root.children) {
    top.emplace_back(e.proposition.id, e.proposition.is_residual());
    if (!e.proposition.is_residual()) events.push_back(e.proposition.id);
  }
  for (const auto& id : extra)
    if (std::find(events.begin(), events.end(), id) == events.end()) events.push_back(id);

  std::vector<Sequence> out;
  Sequence cur;
  auto grow = [&](auto&& self) -> void {
    const auto d = cur.ids.size();
    if (static_cast<int>(d) == depth) {
      out.push_back(cur);
      return;
    }
    std::vector<std::pair<std::string, bool>> options;
    if (d == 0) {
      options = top;
    } else {
      for (const auto& id : events)
        if (std::find(cur.ids.begin(), cur.ids.end(), id) == cur.ids.end()) options.emplace_back(id, false);
      options.emplace_back(fmt::format("E_M@{}", d), true);
    }
    for (const auto& [id, res] : options) {
      cur.ids.push_back(id);
      cur.residual.push_back(res);
      self(self);
      cur.ids.pop_back();
      cur.residual.pop_back();
    }
  };
  grow(grow);
  return out;
}

bool qualifies(const Sequence& s, const std::pair<std::string, std::string>& targets) {
  int a = 0, b = 0;
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    if (s.ids[i] == targets.first) ++a;
    else if (s.ids[i] == targets.second) ++b;
    else if (!s.residual[i]) return false;
  }
  return a == 1 && b == 1;
}

}  // namespace

std::vector<std::vector<std::string>> joint_signatures(const KnowledgeState& root,
                                                       const std::pair<std::string, std::string>& targets,
                                                       int depth) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : all_sequences(root, {targets.first, targets.second}, depth)) {
    if (!qualifies(s, targets)) continue;
    std::vector<std::string> sig;
    for (std::size_t i = 0; i < s.ids.size(); ++i) sig.push_back(s.residual[i] ? fmt::format("~{}", i) : s.ids[i]);
    out.push_back(std::move(sig));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double joint_sum(const KnowledgeState& root, const std::pair<std::string, std::string>& order, int depth,
                 const ProbabilityAssignment& a) {
  double total = 0.0;
  for (const auto& s : all_sequences(root, {order.first, order.second}, depth)) {
    if (!qualifies(s, order)) continue;
    auto first = std::find(s.ids.begin(), s.ids.end(), order.first);
    auto second = std::find(s.ids.begin(), s.ids.end(), order.second);
    if (first > second) continue;
    double product = 1.0;
    std::string given;
    for (const auto& id : s.ids) {
      const std::string name = fmt::format("P({}|{}{})", id, given, root.context);
      if (given.empty()) {
        // The root's own edges may be fixed (a verified branch).
        const Edge* e = root.edge(id);
        if (e && e->probability.is_fixed()) {
          product *= e->probability.fixed_value();
          given += id + ",";
          continue;
        }
      }
      product *= a.at(SlotId{name});
      given += id + ",";
    }
    total += product;
  }
  return total;
}

double grid_argmax(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = lo, best_value = -std::numeric_limits<double>::infinity();
  while (true) {
    const auto n = static_cast<long>(std::ceil((hi - lo) / step));
    for (long i = 0; i <= n; ++i) {
      const double p = std::min(hi, lo + static_cast<double>(i) * step);
      const double v = f(p);
      if (v > best_value) {
        best_value = v;
        best = p;
      }
    }
    if (step < 1e-10) return best;
    lo = std::max(lo, best - step);
    hi = std::min(hi, best + step);
    step /= 100.0;
  }
}

std::vector<double> simplex_argmax(const std::function<double(const std::vector<double>&)>& f, std::size_t dim,
                                   double step) {
  if (dim == 0 || dim > 3) reject(ErrorCode::InvalidArgument, "the simplex oracle handles 1 to 3 coordinates");
  if (dim == 1) return {1.0};
  if (dim == 2) {
    double p = grid_argmax([&](double t) { return f({t, 1.0 - t}); }, 0.0, 1.0, step);
    return {p, 1.0 - p};
  }
  double b1 = 0, b2 = 0, best = -std::numeric_limits<double>::infinity();
  double lo1 = 0, hi1 = 1, lo2 = 0, hi2 = 1;
  while (true) {
    const auto n1 = static_cast<long>(std::ceil((hi1 - lo1) / step));
    const auto n2 = static_cast<long>(std::ceil((hi2 - lo2) / step));
    for (long i = 0; i <= n1; ++i) {
      const double p1 = std::min(hi1, lo1 + static_cast<double>(i) * step);
      for (long j = 0; j <= n2; ++j) {
        const double p2 = std::min(hi2, lo2 + static_cast<double>(j) * step);
        const double p3 = 1.0 - p1 - p2;
        if (p3 < -1e-15) break;
        const double v = f({p1, p2, std::max(0.0, p3)});
        if (v > best) {
          best = v;
          b1 = p1;
          b2 = p2;
        }
      }
    }
    if (step < 1e-10) return {b1, b2, std::max(0.0, 1.0 - b1 - b2)};
    lo1 = std::max(0.0, b1 - step);
    hi1 = std::min(1.0, b1 + step);
    lo2 = std::max(0.0, b2 - step);
    hi2 = std::min(1.0, b2 + step);
    step /= 20.0;
  }
}

double slot_argmax(const IgnoranceFunctional& h, const SlotId& slot, const ProbabilityAssignment& base) {
  ProbabilityAssignment a = base;
  a.set_mode(AssignmentMode::Anticipation);
  auto f = [&](double p) {
    a.set(slot, p);
    return direct_evaluate(h, a);
  };
  double hi = 4.0;
  double best = grid_argmax(f, 0.0, hi);
  while (best > hi - 1e-2 && hi < 1e6) {
    hi *= 4.0;
    best = grid_argmax(f, 0.0, hi);
  }
  return best;
}

double direct_evaluate(const IgnoranceFunctional& h, const ProbabilityAssignment& a) {
  double total = 0.0;
  for (const auto* list : {&h.constraints, &h.memory}) {
    for (const auto& c : *list) {
      const double m = h.resolve(c.multiplier);
      if (m == 0.0) continue;
      double v = c.offset;
      for (const auto& t : c.coefficients) v += t.coefficient * a.at(t.slot);
      total += m * v;
    }
  }
  for (const auto& e : h.entropies) {
    const double lambda = h.resolve(e.multiplier);
    const double p = a.at(e.slot);
    if (lambda != 0.0 && p > 0.0) total -= lambda * p * std::log(p);
  }
  return total;
}

}  // namespace ignorance::oracle
