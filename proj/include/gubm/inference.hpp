#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gubm/grid.hpp"
#include "gubm/params.hpp"
#include "gubm/path.hpp"

namespace gubm {

struct EmConfig {
  int iterations = 40;
  double init_value = 0.5;
  // Examination starts here when set; relevance still starts at init_value.
  // Interior examination entries only ever see skip evidence, so their
  // estimates decay from wherever they start; pinning the start at a known
  // examination level (e.g. 1.0 against a simulator that examines every path
  // position) makes the relevance estimates identifiable.
  std::optional<double> init_gamma;
  int truncation = 100;  // recorded with the fit; sessions arrive truncated
  std::optional<double> convergence_epsilon;
  int workers = 0;  // 0 = all hardware threads
};

// One likelihood factor: position i on the path between adjacent signals at
// scan indices m and n. is_endpoint marks the interacted end (i == n); the
// path start emits nothing (it was the previous pair's endpoint) and the
// virtual session end emits no endpoint.
struct Occurrence {
  std::string query_id;
  std::string image_id;
  int i = 0;
  int m = 0;
  int n = 0;
  bool is_endpoint = false;
};

std::vector<Occurrence> extract_occurrences(
    const std::vector<Session>& sessions, const DirectionPolicy& policy);

struct FitResult {
  ParameterStore params;
  // Likelihood of the training data after each update round; non-decreasing.
  std::vector<double> log_likelihood_per_iteration;
  double initial_log_likelihood = 0.0;
  std::size_t occurrence_count = 0;
  int iterations_run = 0;
};

// Expectation-maximization over interaction paths. Parameters start at
// init_value and stay clamped inside [1e-6, 1 - 1e-6]. Deterministic:
// identical inputs give identical parameters for any worker count.
FitResult em_fit(const std::vector<Session>& sessions, const EmConfig& config,
                 const DirectionPolicy& policy);

// Probability of one adjacent-signal transition: skip factors (1 - alpha*gamma)
// strictly between the endpoints times alpha*gamma at the interacted end.
// Pairs that end at the virtual session end have skip factors only.
double pair_likelihood(const Session& session, const ImagePath& path,
                       const ParameterStore& params,
                       bool ends_at_virtual_end = false);

double log_likelihood(const std::vector<Session>& sessions,
                      const ParameterStore& params,
                      const DirectionPolicy& policy);

namespace detail {

// Shared path walk: invokes fn for every likelihood factor of the session in
// walk order. Used by occurrence extraction, fitting and prediction so the
// three never disagree on which positions carry evidence.
struct PathFactor {
  GridPosition position;
  int i, m, n;
  bool is_endpoint;
};

void walk_session_factors(const Session& session, const DirectionPolicy& policy,
                          const std::function<void(const PathFactor&)>& fn);

}  // namespace detail

}  // namespace gubm
