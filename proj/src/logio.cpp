#include "gubm/logio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "gubm/errors.hpp"
#include "gubm/rng.hpp"
#include "textio.hpp"

namespace gubm {

namespace {

using detail::parse_i64;
using detail::parse_int;
using detail::parse_u64;
using detail::split;

constexpr char kLogHeader[] = "#gubm-log\tv1";

// Identifiers live inside tab/comma/semicolon-structured lines; the comment
// marker is reserved too.
void validate_id(const std::string& text, const char* what, int line_no) {
  if (text.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": empty " + what);
  }
  for (char c : text) {
    if (c == '\t' || c == '\r' || c == '\n' || c == ',' || c == ';' ||
        c == '#') {
      throw DataError("line " + std::to_string(line_no) + ": " + what + " '" +
                      text + "' contains a reserved character");
    }
  }
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + path + "' for writing");
  }
  return out;
}

Session parse_log_line(const std::string& line, int line_no) {
  const std::vector<std::string> fields = split(line, '\t');
  if (fields.size() != 5) {
    throw DataError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                    std::to_string(fields.size()));
  }
  Session session;
  validate_id(fields[0], "session id", line_no);
  validate_id(fields[1], "query id", line_no);
  session.session_id = fields[0];
  session.query_id = fields[1];

  std::vector<int> rows;
  for (const std::string& part : split(fields[2], ',')) {
    rows.push_back(parse_int(part, line_no));
  }
  try {
    session.layout = GridLayout(rows);
  } catch (const DataError& e) {
    throw DataError("line " + std::to_string(line_no) + ": " + e.what());
  }

  for (const std::string& image : split(fields[3], ',')) {
    validate_id(image, "image id", line_no);
    session.images.push_back(image);
  }

  if (!fields[4].empty()) {
    for (const std::string& event_text : split(fields[4], ';')) {
      const std::vector<std::string> parts = split(event_text, ',');
      if (parts.size() != 4) {
        throw DataError("line " + std::to_string(line_no) +
                        ": event needs 4 parts, got '" + event_text + "'");
      }
      InteractionEvent event;
      event.t_ms = parse_i64(parts[0], line_no);
      if (parts[1] == "C") {
        event.kind = EventKind::Click;
      } else if (parts[1] == "H") {
        event.kind = EventKind::Hover;
      } else {
        throw DataError("line " + std::to_string(line_no) +
                        ": unknown event kind '" + parts[1] + "'");
      }
      event.position.row = parse_int(parts[2], line_no);
      event.position.col = parse_int(parts[3], line_no);
      session.events.push_back(event);
    }
  }

  std::stable_sort(session.events.begin(), session.events.end(),
                   [](const InteractionEvent& a, const InteractionEvent& b) {
                     return a.t_ms < b.t_ms;
                   });
  try {
    validate_session(session);
  } catch (const DataError& e) {
    throw DataError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return session;
}

}  // namespace

Session truncate_session(const Session& session, int k,
                         std::size_t* dropped_events) {
  if (k <= 0 || session.layout.total() <= k) {
    return session;
  }
  std::vector<int> rows;
  int used = 0;
  for (int r = 0; r < session.layout.num_rows() && used < k; ++r) {
    const int take = std::min(session.layout.row_count(r), k - used);
    rows.push_back(take);
    used += take;
  }
  Session out;
  out.session_id = session.session_id;
  out.query_id = session.query_id;
  out.layout = GridLayout(rows);
  out.images.assign(session.images.begin(), session.images.begin() + k);
  for (const InteractionEvent& event : session.events) {
    const int row_major =
        session.layout.row_prefix(event.position.row) + event.position.col;
    if (row_major < k) {
      out.events.push_back(event);
    } else if (dropped_events) {
      ++*dropped_events;
    }
  }
  return out;
}

std::vector<Session> load_sessions(const std::string& path,
                                   const LoadFilters& filters,
                                   LoadStats* stats) {
  LoadStats local;
  LoadStats& s = stats ? *stats : local;
  s = LoadStats{};

  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line != kLogHeader) {
    throw DataError("'" + path + "' is not a v1 session log");
  }
  ++line_no;

  std::vector<Session> loaded;
  std::unordered_set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty line");
    }
    Session session = parse_log_line(line, line_no);
    if (!seen_ids.insert(session.session_id).second) {
      throw DataError("line " + std::to_string(line_no) +
                      ": duplicate session id '" + session.session_id + "'");
    }
    ++s.sessions_read;

    // Filter events against the original timeline: a hover's dwell is the
    // gap to the next event of any kind, unbounded for the last one.
    const int k = filters.truncation;
    std::vector<InteractionEvent> kept;
    for (std::size_t e = 0; e < session.events.size(); ++e) {
      const InteractionEvent& event = session.events[e];
      const std::int64_t dwell =
          e + 1 < session.events.size()
              ? session.events[e + 1].t_ms - event.t_ms
              : std::numeric_limits<std::int64_t>::max();
      const int row_major =
          session.layout.row_prefix(event.position.row) + event.position.col;
      if (k > 0 && row_major >= k) {
        ++s.events_dropped_truncation;
      } else if (filters.clicks_only && event.kind == EventKind::Hover) {
        ++s.events_dropped_kind;
      } else if (event.kind == EventKind::Hover &&
                 filters.min_hover_dwell_ms > 0 &&
                 dwell < filters.min_hover_dwell_ms) {
        ++s.events_dropped_dwell;
      } else {
        kept.push_back(event);
      }
    }
    session.events = std::move(kept);
    if (k > 0 && session.layout.total() > k) {
      session = truncate_session(session, k, nullptr);
    }
    if (filters.drop_empty_sessions && session.events.empty()) {
      ++s.sessions_dropped_empty;
      continue;
    }
    loaded.push_back(std::move(session));
  }

  // Per-query cap keeps the first sessions in file order.
  std::vector<Session> capped;
  std::unordered_map<std::string, int> cap_count;
  for (Session& session : loaded) {
    if (filters.max_sessions_per_query > 0 &&
        ++cap_count[session.query_id] > filters.max_sessions_per_query) {
      ++s.sessions_dropped_cap;
    } else {
      capped.push_back(std::move(session));
    }
  }

  std::unordered_map<std::string, int> query_count;
  for (const Session& session : capped) {
    ++query_count[session.query_id];
  }
  std::vector<Session> result;
  std::unordered_set<std::string> kept_queries;
  for (Session& session : capped) {
    if (query_count[session.query_id] < filters.min_sessions_per_query) {
      ++s.sessions_dropped_min;
    } else {
      kept_queries.insert(session.query_id);
      result.push_back(std::move(session));
    }
  }
  s.queries_kept = kept_queries.size();
  s.queries_dropped_min = query_count.size() - kept_queries.size();
  s.sessions_kept = result.size();
  return result;
}

void save_sessions(const std::vector<Session>& sessions,
                   const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << kLogHeader << "\n";
  for (const Session& session : sessions) {
    validate_session(session);
    validate_id(session.session_id, "session id", 0);
    validate_id(session.query_id, "query id", 0);
    out << session.session_id << '\t' << session.query_id << '\t';
    const std::vector<int>& rows = session.layout.row_counts();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << (r ? "," : "") << rows[r];
    }
    out << '\t';
    for (std::size_t i = 0; i < session.images.size(); ++i) {
      validate_id(session.images[i], "image id", 0);
      out << (i ? "," : "") << session.images[i];
    }
    out << '\t';
    for (std::size_t e = 0; e < session.events.size(); ++e) {
      const InteractionEvent& event = session.events[e];
      out << (e ? ";" : "") << event.t_ms << ','
          << (event.kind == EventKind::Click ? 'C' : 'H') << ','
          << event.position.row << ',' << event.position.col;
    }
    out << "\n";
  }
  if (!out) {
    throw DataError("failed writing session log '" + path + "'");
  }
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  // (query, image) -> label pair -> count.
  std::map<std::pair<std::string, std::string>, std::map<std::pair<int, int>, int>>
      votes;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 4) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty id");
    }
    const int topical = parse_int(fields[2], line_no);
    const int quality = parse_int(fields[3], line_no);
    if (topical < 0 || topical > 2) {
      throw DataError("line " + std::to_string(line_no) +
                      ": topical relevance must be 0..2");
    }
    if (quality < 0 || quality > 4) {
      throw DataError("line " + std::to_string(line_no) +
                      ": image quality must be 0..4");
    }
    ++votes[{fields[0], fields[1]}][{topical, quality}];
  }

  std::vector<AnnotationRecord> records;
  for (const auto& [key, ballots] : votes) {
    // Most frequent label pair wins; ties take the larger topical, then the
    // larger quality.
    std::pair<int, int> best{};
    int best_count = 0;
    for (const auto& [labels, count] : ballots) {
      if (count > best_count ||
          (count == best_count && labels > best)) {
        best = labels;
        best_count = count;
      }
    }
    records.push_back(
        AnnotationRecord{key.first, key.second, best.first, best.second});
  }
  return records;
}

void save_annotations(const std::vector<AnnotationRecord>& records,
                      const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "#gubm-annotations\tv1\n";
  for (const AnnotationRecord& record : records) {
    out << record.query_id << '\t' << record.image_id << '\t' << record.topical
        << '\t' << record.quality << "\n";
  }
  if (!out) {
    throw DataError("failed writing annotations '" + path + "'");
  }
}

Fold fold_from_string(const std::string& name) {
  if (name == "train") return Fold::Train;
  if (name == "test") return Fold::Test;
  throw DataError("unknown fold '" + name + "' (expected train or test)");
}

SplitManifest make_split(const std::vector<Session>& sessions, int ratio_train,
                         int ratio_test, std::uint64_t seed) {
  if (ratio_train < 1 || ratio_test < 1) {
    throw DataError("split ratio parts must be positive");
  }
  SplitManifest manifest;
  manifest.ratio_train = ratio_train;
  manifest.ratio_test = ratio_test;
  manifest.seed = seed;

  // Query -> session ids in file order; the outer vector keeps query order
  // stable for reproducibility.
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  std::unordered_map<std::string, std::size_t> group_of;
  std::unordered_set<std::string> seen;
  for (const Session& session : sessions) {
    if (!seen.insert(session.session_id).second) {
      throw DataError("duplicate session id '" + session.session_id +
                      "' in split input");
    }
    auto [it, fresh] = group_of.try_emplace(session.query_id, groups.size());
    if (fresh) {
      groups.emplace_back(session.query_id, std::vector<std::string>{});
    }
    groups[it->second].second.push_back(session.session_id);
  }

  for (auto& [query_id, ids] : groups) {
    SplitMix64 rng = derive_stream(seed, fnv1a_hash(query_id), 0);
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[rng.below(i)]);
    }
    const auto n = static_cast<long long>(ids.size());
    long long train_n = 1;
    if (n >= 2) {
      train_n = std::llround(static_cast<double>(n) * ratio_train /
                             (ratio_train + ratio_test));
      train_n = std::clamp(train_n, 1LL, n - 1);
    }
    for (long long i = 0; i < n; ++i) {
      (i < train_n ? manifest.train_ids : manifest.test_ids).insert(ids[i]);
    }
  }
  return manifest;
}

void save_split(const SplitManifest& manifest, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "#gubm-split\tv1\tratio=" << manifest.ratio_train << ':'
      << manifest.ratio_test << "\tseed=" << manifest.seed << "\n";
  for (const std::string& id : manifest.train_ids) {
    out << "train\t" << id << "\n";
  }
  for (const std::string& id : manifest.test_ids) {
    out << "test\t" << id << "\n";
  }
  if (!out) {
    throw DataError("failed writing split manifest '" + path + "'");
  }
}

SplitManifest load_split(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw DataError("split manifest '" + path + "' is empty");
  }
  ++line_no;
  const std::vector<std::string> header = split(line, '\t');
  if (header.size() != 4 || header[0] != "#gubm-split" || header[1] != "v1" ||
      header[2].rfind("ratio=", 0) != 0 || header[3].rfind("seed=", 0) != 0) {
    throw DataError("'" + path + "' is not a v1 split manifest");
  }
  SplitManifest manifest;
  const std::vector<std::string> ratio = split(header[2].substr(6), ':');
  if (ratio.size() != 2) {
    throw DataError("malformed ratio in split manifest '" + path + "'");
  }
  manifest.ratio_train = parse_int(ratio[0], line_no);
  manifest.ratio_test = parse_int(ratio[1], line_no);
  manifest.seed = parse_u64(header[3].substr(5), line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty line");
    }
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 2) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected fold and session id");
    }
    const Fold fold = fold_from_string(fields[0]);
    auto& target =
        fold == Fold::Train ? manifest.train_ids : manifest.test_ids;
    auto& other = fold == Fold::Train ? manifest.test_ids : manifest.train_ids;
    if (other.count(fields[1]) || !target.insert(fields[1]).second) {
      throw DataError("line " + std::to_string(line_no) +
                      ": session id '" + fields[1] + "' listed twice");
    }
  }
  return manifest;
}

std::vector<Session> apply_fold(const std::vector<Session>& sessions,
                                const SplitManifest& manifest, Fold fold) {
  const std::set<std::string>& ids =
      fold == Fold::Train ? manifest.train_ids : manifest.test_ids;
  std::vector<Session> out;
  for (const Session& session : sessions) {
    if (ids.count(session.session_id)) {
      out.push_back(session);
    }
  }
  return out;
}

}  // namespace gubm
