#include "keyclip/bench.hpp"

#include "keyclip/error.hpp"
#include "keyclip/parallel.hpp"
#include "keyclip/random.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace keyclip {

SyntheticSignal synth_signal(const BenchScenario& sc) {
    if (sc.t == 0) throw InvalidInput("scenario timeline is empty");
    for (const auto& [a, b] : sc.truth_intervals) {
        if (a > b || b >= sc.t) throw InvalidInput("truth interval outside [0, t)");
    }

    std::vector<double> v(sc.t, sc.baseline);
    for (std::size_t n = 0; n < sc.truth_intervals.size(); ++n) {
        const auto [a, b] = sc.truth_intervals[n];
        const double amp = n < sc.bump_amplitudes.size() ? sc.bump_amplitudes[n] : 1.0;
        const double center = 0.5 * static_cast<double>(a + b);
        const double width = std::max(1.0, static_cast<double>(b - a + 1) / 4.0);
        for (std::size_t i = 0; i < sc.t; ++i) {
            const double d = (static_cast<double>(i) - center) / width;
            v[i] += amp * std::exp(-0.5 * d * d);
        }
    }
    if (sc.noise_std > 0.0) {
        std::mt19937_64 rng(sc.seed);
        for (double& x : v) x += sc.noise_std * standard_normal(rng);
    }
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return {{std::move(v), 1.0}, sc.truth_intervals};
}

BenchScenario two_bump_scenario(std::uint64_t seed, std::size_t t) {
    if (t < 40) throw InvalidParameter("two-bump scenarios need t >= 40");
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 1);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(hi - lo + 1));
    };
    const std::size_t min_len = std::max<std::size_t>(3, t / 40);
    const std::size_t max_len = std::max(min_len, t / 12);
    const std::size_t half = t / 2;

    BenchScenario sc;
    sc.t = t;
    sc.seed = seed;
    sc.baseline = 0.2;
    sc.noise_std = 0.05;
    for (std::size_t h = 0; h < 2; ++h) {
        const std::size_t len = pick(min_len, max_len);
        const std::size_t lo = h * half;
        const std::size_t start = pick(lo, lo + half - len - 1);
        sc.truth_intervals.emplace_back(start, start + len - 1);
        sc.bump_amplitudes.push_back(uniform_between(rng, 0.4, 0.7));
    }
    return sc;
}

SelectionMetrics evaluate_selection(const std::vector<FrameIndex>& selected,
                                    const std::vector<TruthInterval>& truth, std::size_t t) {
    SelectionMetrics m;
    if (!truth.empty()) {
        std::size_t hits = 0;
        for (const auto& [a, b] : truth) {
            const auto it = std::lower_bound(selected.begin(), selected.end(), a);
            if (it != selected.end() && *it <= b) ++hits;
        }
        m.hit_rate = static_cast<double>(hits) / static_cast<double>(truth.size());
    }
    if (!selected.empty()) {
        std::size_t inside = 0;
        for (FrameIndex f : selected) {
            if (std::any_of(truth.begin(), truth.end(), [f](const TruthInterval& iv) {
                    return f >= iv.first && f <= iv.second;
                })) {
                ++inside;
            }
        }
        m.in_interval_share = static_cast<double>(inside) / static_cast<double>(selected.size());
        m.max_gap = std::max(selected.front(), (t - 1) - selected.back());
        for (std::size_t i = 1; i < selected.size(); ++i) m.max_gap = std::max(m.max_gap, selected[i] - selected[i - 1]);
    } else {
        m.max_gap = t;
    }
    return m;
}

std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::tcs: return "tcs";
    case Strategy::topk: return "topk";
    case Strategy::uniform: return "uniform";
    }
    return "uniform";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "tcs") return Strategy::tcs;
    if (s == "topk") return Strategy::topk;
    if (s == "uniform") return Strategy::uniform;
    throw InvalidParameter("unknown strategy '" + s + "' (expected tcs, topk or uniform)");
}

namespace {

std::vector<double> parse_number_list(const std::string& text, const std::string& axis) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidParameter("bad " + axis + " value '" + item + "' in sweep");
        }
    }
    if (out.empty()) throw InvalidParameter("empty " + axis + " list in sweep");
    return out;
}

} // namespace

std::vector<SweepPoint> parse_sweep(const std::string& spec, SweepPoint base) {
    std::vector<double> ratios{base.fast_ratio};
    std::vector<double> alphas{base.alpha};

    if (spec.empty() || spec == "none") {
    } else if (spec == "fast_ratio") {
        ratios = kFastRatioGrid;
    } else if (spec == "alpha") {
        alphas = kAlphaGrid;
    } else if (spec == "grid") {
        ratios = kFastRatioGrid;
        alphas = kAlphaGrid;
    } else {
        std::stringstream in(spec);
        std::string clause;
        while (std::getline(in, clause, ';')) {
            const auto eq = clause.find('=');
            if (eq == std::string::npos) throw InvalidParameter("bad sweep clause '" + clause + "'");
            const std::string axis = clause.substr(0, eq);
            if (axis == "fast_ratio") ratios = parse_number_list(clause.substr(eq + 1), axis);
            else if (axis == "alpha") alphas = parse_number_list(clause.substr(eq + 1), axis);
            else throw InvalidParameter("unknown sweep axis '" + axis + "'");
        }
    }

    std::vector<SweepPoint> points;
    for (double r : ratios) {
        if (!(r >= 0.0 && r <= 1.0)) throw InvalidParameter("sweep fast_ratio must lie in [0, 1]");
        for (double a : alphas) {
            if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("sweep alpha must be > 0");
            points.push_back({r, a});
        }
    }
    return points;
}

BenchReport run_bench(const BenchSpec& spec) {
    if (spec.seeds.empty()) throw InvalidParameter("bench needs at least one seed");
    if (spec.strategies.empty()) throw InvalidParameter("bench needs at least one strategy");
    if (spec.sweep.empty()) throw InvalidParameter("bench needs at least one sweep point");
    if (spec.k < 1) throw InvalidParameter("frame budget k must be >= 1");

    const std::size_t per_seed = spec.strategies.size() * spec.sweep.size();
    BenchReport report;
    report.rows.resize(spec.seeds.size() * per_seed);

    parallel_for(spec.seeds.size(), spec.threads, [&](std::size_t s) {
        const BenchScenario scenario = two_bump_scenario(spec.seeds[s], spec.t);
        const SyntheticSignal synth = synth_signal(scenario);
        std::size_t slot = s * per_seed;
        for (Strategy strategy : spec.strategies) {
            for (const SweepPoint& point : spec.sweep) {
                BenchRow row;
                row.seed = spec.seeds[s];
                row.strategy = strategy;
                row.point = point;
                row.k = spec.k;

                const auto t0 = std::chrono::steady_clock::now();
                std::vector<FrameIndex> selected;
                if (strategy == Strategy::tcs) {
                    BudgetConfig cfg{spec.k, point.fast_ratio, point.alpha, spec.max_adaptations, spec.smoothing};
                    SamplingPlan plan = slow_fast_sample(synth.signal, cfg);
                    row.initial_clip_frames = plan.alpha_history.empty() ? 0 : plan.alpha_history.front().clip_frames;
                    row.slow = plan.slow_indices.size();
                    row.fast = plan.fast_indices.size();
                    row.fallback = plan.fallback_used;
                    selected = std::move(plan.selected);
                } else if (strategy == Strategy::topk) {
                    selected = topk_sample(synth.signal, spec.k);
                } else {
                    selected = uniform_sample(spec.t, spec.k);
                }
                const auto t1 = std::chrono::steady_clock::now();

                row.metrics = evaluate_selection(selected, synth.truth, spec.t);
                row.runtime_us = spec.timing ? std::chrono::duration<double, std::micro>(t1 - t0).count() : 0.0;
                report.rows[slot++] = row;
            }
        }
    });
    return report;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
    out << "seed,strategy,fast_ratio,alpha,k,hit_rate,in_interval_share,max_gap,initial_clip_frames,slow,fast,"
           "fallback,runtime_us\n";
    for (const auto& r : report.rows) {
        fmt::print(out, "{},{},{:.6f},{:.6f},{},{:.6f},{:.6f},{},{},{},{},{},{:.1f}\n", r.seed, to_string(r.strategy),
                   r.point.fast_ratio, r.point.alpha, r.k, r.metrics.hit_rate, r.metrics.in_interval_share,
                   r.metrics.max_gap, r.initial_clip_frames, r.slow, r.fast, to_string(r.fallback), r.runtime_us);
    }
}

void write_bench_table(const BenchReport& report, std::ostream& out) {
    struct Acc {
        double hit = 0, share = 0, gap = 0, runtime = 0;
        std::size_t n = 0;
    };
    std::vector<std::pair<std::string, SweepPoint>> order;
    std::map<std::tuple<std::string, double, double>, Acc> acc;
    for (const auto& r : report.rows) {
        const auto key = std::make_tuple(to_string(r.strategy), r.point.fast_ratio, r.point.alpha);
        auto [it, fresh] = acc.try_emplace(key);
        if (fresh) order.emplace_back(to_string(r.strategy), r.point);
        it->second.hit += r.metrics.hit_rate;
        it->second.share += r.metrics.in_interval_share;
        it->second.gap += static_cast<double>(r.metrics.max_gap);
        it->second.runtime += r.runtime_us;
        ++it->second.n;
    }
    fmt::print(out, "{:<9} {:>10} {:>7} {:>9} {:>12} {:>9} {:>13}\n", "strategy", "fast_ratio", "alpha", "hit_rate",
               "in_interval", "max_gap", "runtime_us");
    for (const auto& [name, point] : order) {
        const Acc& a = acc.at(std::make_tuple(name, point.fast_ratio, point.alpha));
        const double n = static_cast<double>(a.n);
        fmt::print(out, "{:<9} {:>10.5f} {:>7.3f} {:>9.4f} {:>12.4f} {:>9.1f} {:>13.1f}\n", name, point.fast_ratio,
                   point.alpha, a.hit / n, a.share / n, a.gap / n, a.runtime / n);
    }
}

} // namespace keyclip
