#pragma once

#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "gubm/path.hpp"

namespace gubm {

using QueryImageKey = std::pair<std::string, std::string>;
using GammaKey = std::tuple<int, int, int>;  // (position i, path start m, end n)

// Fitted model parameters: relevance per (query, image) and examination per
// (position, path start, path end), all scan indices. Unseen keys read the
// default value.
class ParameterStore {
 public:
  double default_value = 0.5;

  double alpha_or_default(const std::string& query_id,
                          const std::string& image_id) const {
    auto it = alpha_.find({query_id, image_id});
    return it == alpha_.end() ? default_value : it->second;
  }

  double gamma_or_default(int i, int m, int n) const {
    auto it = gamma_.find({i, m, n});
    return it == gamma_.end() ? default_value : it->second;
  }

  void set_alpha(const std::string& query_id, const std::string& image_id,
                 double value);
  // Rejects keys with i outside [min(m,n), max(m,n)]: examination off the
  // path has probability zero and is never stored.
  void set_gamma(int i, int m, int n, double value);

  const std::map<QueryImageKey, double>& alpha() const { return alpha_; }
  const std::map<GammaKey, double>& gamma() const { return gamma_; }

 private:
  std::map<QueryImageKey, double> alpha_;
  std::map<GammaKey, double> gamma_;
};

// Baseline parameters over a sequential scan: examination keyed by
// (rank, distance from the previous interacted rank).
class UbmParameters {
 public:
  double default_value = 0.5;

  double alpha_or_default(const std::string& query_id,
                          const std::string& image_id) const {
    auto it = alpha_.find({query_id, image_id});
    return it == alpha_.end() ? default_value : it->second;
  }

  double gamma_or_default(int rank, int dist) const {
    auto it = gamma_.find({rank, dist});
    return it == gamma_.end() ? default_value : it->second;
  }

  void set_alpha(const std::string& query_id, const std::string& image_id,
                 double value);
  void set_gamma(int rank, int dist, double value);

  const std::map<QueryImageKey, double>& alpha() const { return alpha_; }
  const std::map<std::pair<int, int>, double>& gamma() const { return gamma_; }

 private:
  std::map<QueryImageKey, double> alpha_;
  std::map<std::pair<int, int>, double> gamma_;
};

// On-disk parameter table. Header records what produced it; A/G/GU lines are
// sorted by key and carry values with 9 significant digits, so a loaded file
// saves back byte-identical.
struct SavedParams {
  std::string model;  // gubm | gubm-c | ubm | truth
  DirectionPolicy policy;
  int truncation = 100;
  ParameterStore store;
  UbmParameters ubm;
};

void save_params(const SavedParams& params, const std::string& path);
SavedParams load_params(const std::string& path);

// %.9g rendering used for every value the project persists.
std::string format_value(double v);

}  // namespace gubm
