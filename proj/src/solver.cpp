#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ignorance/error.hpp"
#include "ignorance/functional.hpp"

namespace ignorance {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class ResidualSystem {
 public:
  ResidualSystem(const IgnoranceFunctional& h, std::span<const std::string> enforce)
      : h_(h), ids_(enforce.begin(), enforce.end()) {
    for (const auto& id : ids_) {
      auto it = std::find_if(h.constraints.begin(), h.constraints.end(),
                             [&](const LinearConstraint& c) { return c.multiplier.id == id; });
      if (it == h.constraints.end())
        reject(ErrorCode::Unregistered, fmt::format("'{}' is not the multiplier of an active constraint", id));
    }
    std::vector<std::string> sorted = ids_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      reject(ErrorCode::Duplicate, "a constraint is enforced twice");
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Residuals of the enforced constraints at the stationary point. Slots
  /// without a stationary value make the system unsolvable; that is reported
  /// through `missing`.
  Eigen::VectorXd operator()(const Eigen::VectorXd& u) const {
    std::map<std::string, double> values;
    for (std::size_t j = 0; j < ids_.size(); ++j) values[ids_[j]] = u[static_cast<Eigen::Index>(j)];
    auto fixed = h_.with_multipliers(values);
    auto stationary = stationary_assignment(fixed);
    Eigen::VectorXd r(static_cast<Eigen::Index>(ids_.size()));
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      const auto& c = constraint(fixed, ids_[j]);
      double v = c.offset;
      for (const auto& t : c.coefficients) {
        auto p = stationary.assignment.find(t.slot);
        if (!p) {
          missing_ = t.slot.name;
          v = kNaN;
          break;
        }
        v += t.coefficient * *p;
      }
      r[static_cast<Eigen::Index>(j)] = v;
    }
    return r;
  }

  const std::string& missing() const { return missing_; }

 private:
  static const LinearConstraint& constraint(const IgnoranceFunctional& h, const std::string& id) {
    for (const auto& c : h.constraints)
      if (c.multiplier.id == id) return c;
    reject(ErrorCode::Unregistered, id);
  }

  const IgnoranceFunctional& h_;
  std::vector<std::string> ids_;
  mutable std::string missing_;
};

double max_abs(const Eigen::VectorXd& r) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

// Sign-change search on one coordinate, then bisection. Returns false when no
// sign change exists within the search range.
bool bisect_coordinate(const ResidualSystem& system, Eigen::VectorXd& u, Eigen::Index j,
                       double tolerance) {
  auto f = [&](double t) {
    Eigen::VectorXd v = u;
    v[j] = t;
    return system(v)[j];
  };
  const double origin = u[j];
  const double f0 = f(origin);
  if (std::isnan(f0)) return false;
  if (std::abs(f0) <= tolerance) return true;

  double lo = origin, hi = origin, flo = f0;
  bool bracketed = false;
  for (int m = 0; m <= 40 && !bracketed; ++m) {
    const double step = std::ldexp(1.0, m);
    for (double dir : {1.0, -1.0}) {
      const double t = origin + dir * step;
      const double ft = f(t);
      if (std::isnan(ft)) continue;
      if ((ft > 0.0) != (f0 > 0.0) || ft == 0.0) {
        lo = std::min(origin, t);
        hi = std::max(origin, t);
        flo = dir > 0 ? f0 : ft;
        bracketed = true;
        break;
      }
    }
  }
  if (!bracketed) return false;

  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::isnan(fm)) return false;
    if (std::abs(fm) <= tolerance || mid == lo || mid == hi) {
      u[j] = mid;
      return true;
    }
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  u[j] = 0.5 * (lo + hi);
  return true;
}

}  // namespace

SolveResult solve_multipliers(const IgnoranceFunctional& h, std::span<const std::string> enforce,
                              const SolverOptions& options) {
  SolveResult result;
  if (enforce.empty()) return result;

  ResidualSystem system(h, enforce);
  const auto n = static_cast<Eigen::Index>(system.size());
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd r = system(u);

  auto finish = [&](std::optional<std::string> failure) {
    for (Eigen::Index j = 0; j < n; ++j) {
      result.multipliers[system.ids()[static_cast<std::size_t>(j)]] = u[j];
      result.residuals.emplace_back(system.ids()[static_cast<std::size_t>(j)], r[j]);
    }
    if (failure)
      result.infeasible = InfeasibilityReport{*failure, result.residuals, result.multipliers,
                                              result.iterations};
    return result;
  };

  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    if (!system.missing().empty())
      return finish(fmt::format("slot {} has no stationary value", system.missing()));
    const double norm = max_abs(r);
    if (norm <= options.tolerance) return finish(std::nullopt);

    // Central-difference Jacobian; ties make analytic forms awkward.
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(u[k]));
      Eigen::VectorXd up = u, down = u;
      up[k] += step;
      down[k] -= step;
      jac.col(k) = (system(up) - system(down)) / (2.0 * step);
    }

    bool advanced = false;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (jac.allFinite() && lu.rank() == n) {
      const Eigen::VectorXd delta = lu.solve(-r);
      double damping = 1.0;
      for (int halvings = 0; halvings < 40; ++halvings, damping *= 0.5) {
        Eigen::VectorXd trial = u + damping * delta;
        Eigen::VectorXd rt = system(trial);
        if (max_abs(rt) < norm) {
          u = trial;
          r = rt;
          advanced = true;
          break;
        }
      }
    }
    if (advanced) continue;

    // Newton stalled: one bisection sweep over the multipliers.
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!bisect_coordinate(system, u, j, options.tolerance)) {
        r = system(u);
        return finish(fmt::format(
            "residual of '{}' keeps one sign for every value of its multiplier in [{}, {}]",
            system.ids()[static_cast<std::size_t>(j)], u[j] - std::ldexp(1.0, 40),
            u[j] + std::ldexp(1.0, 40)));
      }
    }
    Eigen::VectorXd rn = system(u);
    if (max_abs(rn) >= norm && max_abs(rn) > options.tolerance) {
      r = rn;
      return finish("no progress from Newton or bisection");
    }
    r = rn;
  }
  if (max_abs(r) <= options.tolerance) return finish(std::nullopt);
  return finish(fmt::format("not converged after {} iterations", options.max_iterations));
}

}  // namespace ignorance
