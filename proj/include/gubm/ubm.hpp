#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gubm/grid.hpp"
#include "gubm/inference.hpp"
#include "gubm/metrics.hpp"
#include "gubm/params.hpp"

namespace gubm {

// Sequential baseline over the grid flattened in Z-shape order. Examination
// of rank r depends on (r, r - r_last) with r_last the nearest interacted
// rank before r, -1 when none, so the distance lies in [1, rank count].
// Revisits cannot be expressed: ranks are processed ascending and the
// interaction timestamps are ignored. That gap is what the comparison with
// the path model measures.

struct UbmFitResult {
  UbmParameters params;
  std::vector<double> log_likelihood_per_iteration;
  double initial_log_likelihood = 0.0;
  std::size_t observation_count = 0;
  int iterations_run = 0;
};

UbmFitResult ubm_fit(const std::vector<Session>& sessions,
                     const EmConfig& config);

// Interaction probability per left-to-right rank, conditioned on the
// session's observed labels through r_last.
std::vector<double> ubm_predict_q(const Session& session,
                                  const UbmParameters& params);

InteractionPredictor make_ubm_predictor(const UbmParameters& params);

double ubm_log_likelihood(const std::vector<Session>& sessions,
                          const UbmParameters& params);

namespace detail {

// One rank of the sequential scan. Shared by fitting, likelihood and
// prediction so the three agree on labels and distances.
struct UbmObservation {
  int rank;
  int dist;
  GridPosition position;
  bool interacted;
};

void walk_ubm_observations(const Session& session,
                           const std::function<void(const UbmObservation&)>& fn);

}  // namespace detail

}  // namespace gubm
