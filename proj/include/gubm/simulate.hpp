#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gubm/grid.hpp"
#include "gubm/params.hpp"
#include "gubm/path.hpp"
#include "gubm/rng.hpp"

namespace gubm {

// Examination probability as a function of how far a candidate sits from the
// current signal: scale * decay^(offset - 1), one pair of knobs per walk
// direction. The fitted model keys examination by the bounding pair instead,
// so recovery checks target relevance, not this family's raw values.
struct GammaFamily {
  double scale_down = 0.85;
  double decay_down = 0.70;
  double scale_up = 0.85;
  double decay_up = 0.70;

  double operator()(int offset, PathDirection direction) const;
};

// Scan order the simulated user walks in. Mixed cycles ltor, rtol, zshape
// by session index, giving one log that exercises every in-row direction.
enum class WalkPolicy { LtoR, RtoL, Zshape, Mixed };

WalkPolicy walk_policy_from_string(const std::string& text);
std::string walk_policy_to_string(WalkPolicy policy);

struct SimConfig {
  GridLayout layout;
  // Ground-truth relevance; each query's images fill its page row-major in
  // image-id order, so every query must map exactly layout.total() images.
  std::map<QueryImageKey, double> true_alpha;
  GammaFamily gamma_family;
  WalkPolicy walk_policy = WalkPolicy::Zshape;
  double p_down = 0.681;
  double click_given_interaction = 0.15;
  int max_signals = 20;
  int sessions_per_query = 1000;
  std::uint64_t seed = 1;

  SimConfig() : layout(default_sim_layout()) {}

  static GridLayout default_sim_layout(std::uint64_t seed = 0);
};

// Registers layout.total() images named <query>_i<index> with the given
// relevance values (cycled if fewer values than cells).
void add_query(SimConfig& config, const std::string& query_id,
               const std::vector<double>& alpha_values);

// One user walk: from the current signal, pick a direction (down with
// probability p_down, forced down from the virtual start), step through
// scan positions flipping examine then interact coins; the first interaction
// becomes the next signal, walking off either grid edge ends the session.
Session simulate_session(const SimConfig& config, const std::string& query_id,
                         const std::string& session_id,
                         const std::vector<std::string>& images,
                         const DirectionPolicy& policy, SplitMix64& rng);

struct SimResult {
  std::vector<Session> sessions;
  ParameterStore truth;  // relevance only; see GammaFamily note
};

// Full log: sessions_per_query walks for every query in true_alpha, with a
// per-(query, session) derived stream so output is byte-stable for a seed.
SimResult simulate_log(const SimConfig& config);

// Reads a JSON config; unknown keys are rejected. See README for the schema.
SimConfig parse_sim_config(const std::string& json_text);

}  // namespace gubm
