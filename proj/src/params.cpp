#include "gubm/params.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "textio.hpp"

namespace gubm {

namespace {

using detail::parse_double;
using detail::parse_int;

void check_probability(double value, const std::string& what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DataError(what + " value " + std::to_string(value) +
                    " is outside [0,1]");
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  return detail::split(line, '\t');
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void ParameterStore::set_alpha(const std::string& query_id,
                               const std::string& image_id, double value) {
  check_probability(value, "alpha(" + query_id + "," + image_id + ")");
  alpha_[{query_id, image_id}] = value;
}

void ParameterStore::set_gamma(int i, int m, int n, double value) {
  if (i < std::min(m, n) || i > std::max(m, n)) {
    throw DataError("gamma key (" + std::to_string(i) + "," +
                    std::to_string(m) + "," + std::to_string(n) +
                    ") lies outside the path");
  }
  check_probability(value, "gamma");
  gamma_[{i, m, n}] = value;
}

void UbmParameters::set_alpha(const std::string& query_id,
                              const std::string& image_id, double value) {
  check_probability(value, "alpha(" + query_id + "," + image_id + ")");
  alpha_[{query_id, image_id}] = value;
}

void UbmParameters::set_gamma(int rank, int dist, double value) {
  if (rank < 0 || dist < 1) {
    throw DataError("ubm gamma key (" + std::to_string(rank) + "," +
                    std::to_string(dist) + ") is invalid");
  }
  check_probability(value, "ubm gamma");
  gamma_[{rank, dist}] = value;
}

void save_params(const SavedParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + path + "' for writing");
  }
  out << "#gubm-params\tv1\tmodel=" << params.model
      << "\tdirection=" << policy_to_string(params.policy)
      << "\tk=" << params.truncation << "\n";
  for (const auto& [key, value] : params.store.alpha()) {
    out << "A\t" << key.first << '\t' << key.second << '\t'
        << format_value(value) << "\n";
  }
  for (const auto& [key, value] : params.store.gamma()) {
    out << "G\t" << std::get<0>(key) << '\t' << std::get<1>(key) << '\t'
        << std::get<2>(key) << '\t' << format_value(value) << "\n";
  }
  for (const auto& [key, value] : params.ubm.alpha()) {
    out << "A\t" << key.first << '\t' << key.second << '\t'
        << format_value(value) << "\n";
  }
  for (const auto& [key, value] : params.ubm.gamma()) {
    out << "GU\t" << key.first << '\t' << key.second << '\t'
        << format_value(value) << "\n";
  }
  if (!out) {
    throw DataError("failed writing parameter file '" + path + "'");
  }
}

SavedParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open parameter file '" + path + "'");
  }
  SavedParams params;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw DataError("parameter file '" + path + "' is empty");
  }
  ++line_no;
  {
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() < 2 || fields[0] != "#gubm-params" || fields[1] != "v1") {
      throw DataError("'" + path + "' is not a v1 parameter file");
    }
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const std::string& f = fields[i];
      if (f.rfind("model=", 0) == 0) {
        params.model = f.substr(6);
      } else if (f.rfind("direction=", 0) == 0) {
        params.policy = policy_from_string(f.substr(10));
      } else if (f.rfind("k=", 0) == 0) {
        params.truncation = parse_int(f.substr(2), line_no);
      } else {
        throw DataError("unknown header field '" + f + "' in '" + path + "'");
      }
    }
  }
  const bool ubm_model = params.model == "ubm";
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    const std::string& kind = fields[0];
    if (kind == "A") {
      if (fields.size() != 4) {
        throw DataError("line " + std::to_string(line_no) +
                        ": A record needs 4 fields");
      }
      double v = parse_double(fields[3], line_no);
      if (ubm_model) {
        params.ubm.set_alpha(fields[1], fields[2], v);
      } else {
        params.store.set_alpha(fields[1], fields[2], v);
      }
    } else if (kind == "G") {
      if (fields.size() != 5) {
        throw DataError("line " + std::to_string(line_no) +
                        ": G record needs 5 fields");
      }
      params.store.set_gamma(parse_int(fields[1], line_no),
                             parse_int(fields[2], line_no),
                             parse_int(fields[3], line_no),
                             parse_double(fields[4], line_no));
    } else if (kind == "GU") {
      if (fields.size() != 4) {
        throw DataError("line " + std::to_string(line_no) +
                        ": GU record needs 4 fields");
      }
      params.ubm.set_gamma(parse_int(fields[1], line_no),
                           parse_int(fields[2], line_no),
                           parse_double(fields[3], line_no));
    } else {
      throw DataError("line " + std::to_string(line_no) +
                      ": unknown record kind '" + kind + "'");
    }
  }
  return params;
}

}  // namespace gubm
