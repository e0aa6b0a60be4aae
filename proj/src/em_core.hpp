#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace gubm::detail {

// Dense EM instance shared by the path model and the sequential baseline.
// Every observation couples one relevance parameter with one examination
// parameter; an interacted observation is positive evidence for both, a
// skipped one splits responsibility between "not relevant" and "not examined".
struct EmProblem {
  std::vector<std::int32_t> alpha_of_obs;
  std::vector<std::int32_t> gamma_of_obs;
  std::vector<std::uint8_t> interacted;
  std::size_t alpha_count = 0;
  std::size_t gamma_count = 0;

  void add(std::int32_t a, std::int32_t g, bool hit) {
    alpha_of_obs.push_back(a);
    gamma_of_obs.push_back(g);
    interacted.push_back(hit ? 1 : 0);
  }
  std::size_t size() const { return alpha_of_obs.size(); }
};

struct EmSolution {
  std::vector<double> alpha;
  std::vector<double> gamma;
  // Training-data likelihood after each update round; non-decreasing.
  std::vector<double> log_likelihood_per_iteration;
  double initial_log_likelihood = 0.0;
  int iterations_run = 0;
};

// Update loop with simultaneous alpha/gamma rounds. Bitwise deterministic
// for any worker count: work splits over parameters, each parameter's
// observations sum serially in insertion order. Examination entries start at
// init_gamma when given, otherwise at init_value like the relevance entries.
EmSolution run_em(const EmProblem& problem, int iterations, double init_value,
                  std::optional<double> init_gamma,
                  std::optional<double> convergence_epsilon, int workers);

double problem_log_likelihood(const EmProblem& problem,
                              const std::vector<double>& alpha,
                              const std::vector<double>& gamma, int workers);

// Probabilities the project stores never leave [1e-6, 1 - 1e-6].
double clamp_unit_probability(double v);

}  // namespace gubm::detail
