#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "sumrate/errors.hpp"
#include "sumrate/solvers.hpp"

namespace sumrate {

namespace {

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  VectorXd power;
  bool set = false;

  void offer(double v, const VectorXd& p) {
    if (!set || v > value ||
        (v == value && std::lexicographical_compare(
                           p.data(), p.data() + p.size(), power.data(),
                           power.data() + power.size()))) {
      value = v;
      power = p;
      set = true;
    }
  }
};

class Evaluator {
 public:
  Evaluator(const Problem& pr, OracleObjective kind)
      : f_(pr.m.F), v_(pr.m.v), w_(pr.weights), kind_(kind),
        interference_(pr.slots()) {}

  // Returns -inf for log-SIR points with a zero SIR.
  double operator()(const VectorXd& p) {
    interference_.noalias() = f_ * p;
    double s = 0.0;
    for (Index l = 0; l < p.size(); ++l) {
      const double g = p[l] / (interference_[l] + v_[l]);
      if (kind_ == OracleObjective::kSumRate) {
        s += w_[l] * std::log1p(g);
      } else if (w_[l] > 0.0) {
        if (g <= 0.0) return -std::numeric_limits<double>::infinity();
        s += w_[l] * std::log(g);
      }
    }
    return s;
  }

 private:
  const MatrixXd& f_;
  const VectorXd& v_;
  const VectorXd& w_;
  OracleObjective kind_;
  VectorXd interference_;
};

// Evaluates the tensor grid axes[0] x ... x axes[n-1], splitting the first
// axis across threads; merging uses the total order of Best::offer, so the
// result does not depend on the thread count.
Best search(const Problem& pr, OracleObjective kind,
            const std::vector<std::vector<double>>& axes, unsigned threads) {
  const Index n = static_cast<Index>(axes.size());
  const std::size_t first = axes[0].size();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(first)));
  std::vector<Best> partial(threads);
  const auto work = [&](unsigned t) {
    Evaluator eval(pr, kind);
    VectorXd p(n);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t i0 = t; i0 < first; i0 += threads) {
      std::fill(idx.begin(), idx.end(), 0);
      idx[0] = i0;
      while (true) {
        for (Index k = 0; k < n; ++k) p[k] = axes[k][idx[k]];
        const double v = eval(p);
        if (std::isfinite(v)) partial[t].offer(v, p);
        Index k = 1;
        while (k < n && ++idx[k] == axes[k].size()) {
          idx[k] = 0;
          ++k;
        }
        if (k >= n) break;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (std::thread& th : pool) th.join();
  }
  Best out;
  for (const Best& b : partial)
    if (b.set) out.offer(b.value, b.power);
  return out;
}

}  // namespace

OracleResult oracle_grid(const Problem& pr, const OracleOptions& options) {
  if (!pr.is_box()) {
    throw DomainError("the grid oracle handles single-tone problems only");
  }
  const Index n = pr.slots();
  if (n > 4) {
    std::ostringstream msg;
    msg << "grid oracle is limited to 4 users (cost guard); got " << n;
    throw PreconditionError(msg.str(), static_cast<double>(n));
  }
  if (options.resolution < 11) {
    throw PreconditionError("grid oracle needs at least 11 points per axis",
                            static_cast<double>(options.resolution));
  }
  const double points = std::pow(static_cast<double>(options.resolution),
                                 static_cast<double>(n));
  if (points > options.max_points) {
    std::ostringstream msg;
    msg << "grid oracle would evaluate " << points << " points; limit is "
        << options.max_points << " (cost guard)";
    throw PreconditionError(msg.str(), points);
  }
  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const Index last = options.resolution - 1;
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    auto& axis = axes[k];
    for (Index j = 0; j < last; ++j) {
      axis.push_back(pr.slot_caps[k] * static_cast<double>(j) /
                     static_cast<double>(last));
    }
    axis.push_back(pr.slot_caps[k]);
  }
  Best best = search(pr, options.objective, axes, threads);
  if (!best.set) throw InfeasibleError("grid oracle found no finite value");

  OracleResult out;
  out.grid_resolution = options.resolution;
  if (options.refine) {
    std::vector<std::vector<double>> fine(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
      const double cap = pr.slot_caps[k];
      const double h = cap / static_cast<double>(last);
      for (int j = -10; j <= 10; ++j) {
        const double x = best.power[k] + h * static_cast<double>(j) / 10.0;
        if (x < 0.0 || x > cap) continue;
        fine[k].push_back(j == 0 ? best.power[k] : x);
      }
      // Keep the exact bounds reachable.
      if (best.power[k] + h >= cap) fine[k].push_back(cap);
      if (best.power[k] - h <= 0.0) fine[k].push_back(0.0);
      std::sort(fine[k].begin(), fine[k].end());
      fine[k].erase(std::unique(fine[k].begin(), fine[k].end()), fine[k].end());
    }
    const Best refined = search(pr, options.objective, fine, threads);
    if (refined.set) best.offer(refined.value, refined.power);
    out.refined = true;
  }
  out.best_power = best.power;
  out.best_value = best.value;
  return out;
}

}  // namespace sumrate
