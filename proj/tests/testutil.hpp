#pragma once

#include <gubm/grid.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

// Ranks with ties averaged, then Pearson on the ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman: need two equally sized samples");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += rx[i]; my += ry[i]; }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) throw std::invalid_argument("spearman: constant sample");
    return sxy / std::sqrt(sxx * syy);
}

inline double mean_abs_error(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("mean_abs_error: need equally sized samples");
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s / static_cast<double>(x.size());
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        const auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 64; ++attempt) {
            char name[64];
            std::snprintf(name, sizeof(name), "gubm-test-%016llx",
                          static_cast<unsigned long long>(rng()));
            auto candidate = base / name;
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("TempDir: could not create scratch directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_text: cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text: cannot open " + path);
    out << text;
}

// Session on the given layout with image ids img0, img1, ... in row-major order.
inline gubm::Session make_session(std::vector<int> rows,
                                  std::vector<std::pair<int, int>> positions,
                                  std::string query_id = "q0",
                                  std::string session_id = "s0") {
    gubm::Session s;
    s.session_id = std::move(session_id);
    s.query_id = std::move(query_id);
    s.layout = gubm::GridLayout(std::move(rows));
    s.images.reserve(static_cast<std::size_t>(s.layout.total()));
    for (int i = 0; i < s.layout.total(); ++i)
        s.images.push_back("img" + std::to_string(i));
    std::int64_t t = 100;
    for (auto [r, c] : positions) {
        gubm::InteractionEvent ev;
        ev.t_ms = t;
        t += 100;
        ev.kind = gubm::EventKind::Hover;
        ev.position = {r, c};
        s.events.push_back(ev);
    }
    return s;
}

// Reference EM, written independently of the library implementation: plain
// per-occurrence loops over string-keyed maps, no grouping or parallelism.
struct NaiveOcc {
    std::string alpha_key;
    std::string gamma_key;
    bool interacted = false;
};

struct NaiveFit {
    std::map<std::string, double> alpha;
    std::map<std::string, double> gamma;
    std::vector<double> log_likelihoods;
};

inline double naive_clamp(double v) {
    const double lo = 1e-6;
    const double hi = 1.0 - 1e-6;
    return v < lo ? lo : (v > hi ? hi : v);
}

inline double naive_ll(const std::vector<NaiveOcc>& occs,
                       const std::map<std::string, double>& alpha,
                       const std::map<std::string, double>& gamma) {
    double ll = 0.0;
    for (const auto& o : occs) {
        const double p = alpha.at(o.alpha_key) * gamma.at(o.gamma_key);
        ll += o.interacted ? std::log(p) : std::log(1.0 - p);
    }
    return ll;
}

inline NaiveFit naive_em(const std::vector<NaiveOcc>& occs, int iterations, double init) {
    NaiveFit fit;
    for (const auto& o : occs) {
        fit.alpha.emplace(o.alpha_key, init);
        fit.gamma.emplace(o.gamma_key, init);
    }
    for (int it = 0; it < iterations; ++it) {
        std::map<std::string, double> a_num, a_cnt, g_num, g_cnt;
        for (const auto& o : occs) {
            const double a = fit.alpha.at(o.alpha_key);
            const double g = fit.gamma.at(o.gamma_key);
            const double miss = 1.0 - a * g;
            a_num[o.alpha_key] += o.interacted ? 1.0 : a * (1.0 - g) / miss;
            a_cnt[o.alpha_key] += 1.0;
            g_num[o.gamma_key] += o.interacted ? 1.0 : g * (1.0 - a) / miss;
            g_cnt[o.gamma_key] += 1.0;
        }
        for (auto& [k, v] : fit.alpha) v = naive_clamp(a_num[k] / a_cnt[k]);
        for (auto& [k, v] : fit.gamma) v = naive_clamp(g_num[k] / g_cnt[k]);
        fit.log_likelihoods.push_back(naive_ll(occs, fit.alpha, fit.gamma));
    }
    return fit;
}

}  // namespace testutil
