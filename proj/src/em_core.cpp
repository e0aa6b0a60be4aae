#include "em_core.hpp"

#include <algorithm>
#include <cmath>

#include "gubm/errors.hpp"
#include "parallel.hpp"

namespace gubm::detail {

namespace {

constexpr double kFloor = 1e-6;
constexpr double kCeil = 1.0 - 1e-6;
constexpr std::size_t kLikelihoodChunk = 1 << 16;

// Observation ids grouped per parameter, insertion order kept within each
// group so per-parameter sums are worker-count independent.
struct Groups {
  std::vector<std::int64_t> offsets;
  std::vector<std::int32_t> items;
};

Groups build_groups(const std::vector<std::int32_t>& of_obs,
                    std::size_t n_params) {
  Groups g;
  g.offsets.assign(n_params + 1, 0);
  for (std::int32_t p : of_obs) ++g.offsets[p + 1];
  for (std::size_t i = 1; i <= n_params; ++i) g.offsets[i] += g.offsets[i - 1];
  g.items.resize(of_obs.size());
  std::vector<std::int64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (std::size_t obs = 0; obs < of_obs.size(); ++obs) {
    g.items[cursor[of_obs[obs]]++] = static_cast<std::int32_t>(obs);
  }
  return g;
}

}  // namespace

double clamp_unit_probability(double v) {
  if (v < kFloor) return kFloor;
  if (v > kCeil) return kCeil;
  return v;
}

double problem_log_likelihood(const EmProblem& problem,
                              const std::vector<double>& alpha,
                              const std::vector<double>& gamma, int workers) {
  const std::size_t n = problem.size();
  const std::size_t blocks = (n + kLikelihoodChunk - 1) / kLikelihoodChunk;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const std::size_t lo = b * kLikelihoodChunk;
      const std::size_t hi = std::min(n, lo + kLikelihoodChunk);
      double acc = 0.0;
      for (std::size_t obs = lo; obs < hi; ++obs) {
        const double q =
            alpha[problem.alpha_of_obs[obs]] * gamma[problem.gamma_of_obs[obs]];
        acc += problem.interacted[obs] ? std::log(q) : std::log1p(-q);
      }
      partial[b] = acc;
    }
  });
  // Fixed-size blocks summed in block order: the total does not depend on
  // how the blocks were distributed.
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

EmSolution run_em(const EmProblem& problem, int iterations, double init_value,
                  std::optional<double> init_gamma,
                  std::optional<double> convergence_epsilon, int workers) {
  if (iterations < 1) {
    throw DataError("EM iteration count must be at least 1");
  }
  if (!(init_value > 0.0 && init_value < 1.0)) {
    throw DataError("EM initial value must lie strictly inside (0,1)");
  }
  const double gamma_start = init_gamma.value_or(init_value);
  if (!(gamma_start > 0.0 && gamma_start <= 1.0)) {
    throw DataError("EM examination start value must lie inside (0,1]");
  }
  if (problem.size() == 0) {
    throw DataError("no training evidence: zero observations");
  }

  const Groups alpha_groups =
      build_groups(problem.alpha_of_obs, problem.alpha_count);
  const Groups gamma_groups =
      build_groups(problem.gamma_of_obs, problem.gamma_count);

  EmSolution sol;
  sol.alpha.assign(problem.alpha_count, clamp_unit_probability(init_value));
  sol.gamma.assign(problem.gamma_count, clamp_unit_probability(gamma_start));
  std::vector<double> next_alpha(sol.alpha.size());
  std::vector<double> next_gamma(sol.gamma.size());
  sol.initial_log_likelihood =
      problem_log_likelihood(problem, sol.alpha, sol.gamma, workers);

  for (int round = 0; round < iterations; ++round) {
    // Posterior that the image was relevant, averaged over the parameter's
    // observations: skips contribute a(1-g)/(1-ag), interactions 1. Each
    // observation's responsibilities sum to 1, so the denominator is the
    // group size.
    parallel_for(sol.alpha.size(), workers,
                 [&](std::size_t begin, std::size_t end) {
                   for (std::size_t p = begin; p < end; ++p) {
                     double num = 0.0;
                     for (std::int64_t k = alpha_groups.offsets[p];
                          k < alpha_groups.offsets[p + 1]; ++k) {
                       const std::int32_t obs = alpha_groups.items[k];
                       if (problem.interacted[obs]) {
                         num += 1.0;
                       } else {
                         const double a = sol.alpha[p];
                         const double g = sol.gamma[problem.gamma_of_obs[obs]];
                         num += a * (1.0 - g) / (1.0 - a * g);
                       }
                     }
                     const auto count =
                         alpha_groups.offsets[p + 1] - alpha_groups.offsets[p];
                     next_alpha[p] = clamp_unit_probability(
                         num / static_cast<double>(count));
                   }
                 });
    // Same with the roles swapped for examination.
    parallel_for(sol.gamma.size(), workers,
                 [&](std::size_t begin, std::size_t end) {
                   for (std::size_t p = begin; p < end; ++p) {
                     double num = 0.0;
                     for (std::int64_t k = gamma_groups.offsets[p];
                          k < gamma_groups.offsets[p + 1]; ++k) {
                       const std::int32_t obs = gamma_groups.items[k];
                       if (problem.interacted[obs]) {
                         num += 1.0;
                       } else {
                         const double a = sol.alpha[problem.alpha_of_obs[obs]];
                         const double g = sol.gamma[p];
                         num += g * (1.0 - a) / (1.0 - a * g);
                       }
                     }
                     const auto count =
                         gamma_groups.offsets[p + 1] - gamma_groups.offsets[p];
                     next_gamma[p] = clamp_unit_probability(
                         num / static_cast<double>(count));
                   }
                 });

    double abs_change = 0.0;
    for (std::size_t p = 0; p < sol.alpha.size(); ++p) {
      abs_change += std::abs(next_alpha[p] - sol.alpha[p]);
    }
    for (std::size_t p = 0; p < sol.gamma.size(); ++p) {
      abs_change += std::abs(next_gamma[p] - sol.gamma[p]);
    }
    sol.alpha.swap(next_alpha);
    sol.gamma.swap(next_gamma);
    sol.log_likelihood_per_iteration.push_back(
        problem_log_likelihood(problem, sol.alpha, sol.gamma, workers));
    sol.iterations_run = round + 1;
    if (convergence_epsilon &&
        abs_change /
                static_cast<double>(sol.alpha.size() + sol.gamma.size()) <
            *convergence_epsilon) {
      break;
    }
  }
  return sol;
}

}  // namespace gubm::detail
