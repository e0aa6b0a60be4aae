#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gubm/grid.hpp"
#include "gubm/metrics.hpp"

namespace gubm {

// Session-log ingestion filters, applied in the order: position truncation,
// event filters (kind, hover dwell), empty-session drop, per-query cap,
// per-query minimum.
struct LoadFilters {
  int min_sessions_per_query = 10;
  int max_sessions_per_query = 1000;  // keep the first ones in file order
  bool clicks_only = false;
  std::int64_t min_hover_dwell_ms = 0;
  int truncation = 100;  // 0 disables
  bool drop_empty_sessions = false;
};

struct LoadStats {
  std::size_t sessions_read = 0;
  std::size_t sessions_kept = 0;
  std::size_t queries_kept = 0;
  std::size_t queries_dropped_min = 0;
  std::size_t sessions_dropped_min = 0;
  std::size_t sessions_dropped_cap = 0;
  std::size_t sessions_dropped_empty = 0;
  std::size_t events_dropped_truncation = 0;
  std::size_t events_dropped_kind = 0;
  std::size_t events_dropped_dwell = 0;
};

// Tab-separated, one session per line after a "#gubm-log<TAB>v1" header:
// session_id, query_id, row counts (csv), row-major image ids (csv), events
// (semicolon-joined "t_ms,kind,row,col" with kind C or H; may be empty).
// Events are sorted by timestamp on ingest, ties keep file order. Malformed
// input names the offending line.
std::vector<Session> load_sessions(const std::string& path,
                                   const LoadFilters& filters = {},
                                   LoadStats* stats = nullptr);

void save_sessions(const std::vector<Session>& sessions,
                   const std::string& path);

// Keeps the first k row-major positions; the last kept row may be partial.
// Events on dropped positions are dropped and counted.
Session truncate_session(const Session& session, int k,
                         std::size_t* dropped_events = nullptr);

// Tab-separated: query_id, image_id, topical (0..2), quality (0..4).
// "#"-prefixed lines are comments. Duplicate (query, image) pairs resolve
// to the most frequent label pair; frequency ties pick the larger topical,
// then the larger quality. Output sorted by (query, image).
std::vector<AnnotationRecord> load_annotations(const std::string& path);

void save_annotations(const std::vector<AnnotationRecord>& records,
                      const std::string& path);

enum class Fold { Train, Test };

Fold fold_from_string(const std::string& name);

// Session-id partition, stratified by query: every retained query keeps
// sessions in both folds whenever it has at least two.
struct SplitManifest {
  int ratio_train = 7;
  int ratio_test = 3;
  std::uint64_t seed = 0;
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
};

SplitManifest make_split(const std::vector<Session>& sessions, int ratio_train,
                         int ratio_test, std::uint64_t seed);

void save_split(const SplitManifest& manifest, const std::string& path);
SplitManifest load_split(const std::string& path);

std::vector<Session> apply_fold(const std::vector<Session>& sessions,
                                const SplitManifest& manifest, Fold fold);

}  // namespace gubm
