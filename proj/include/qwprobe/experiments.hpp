// experiments.hpp
// Scenario runner: configuration, sweeps over independent (sigma, theta)
// points on a worker pool, closed-form cross-checks and CSV emission.
//
// CSV schema (one header for every scenario, 12 significant digits, empty
// field where a column does not apply):
//   scenario,axis,D,sigma,theta,t,qfi,fi,qfi_closed,fi_closed,abs_dev

#pragma once

#include "coinspace.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "metrology.hpp"
#include "probes.hpp"
#include "topology.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

namespace qwprobe {

enum class scenario { line_sweep, enhanced_table, closed_form_check, custom };

inline std::string_view to_string(scenario s) {
    switch (s) {
    case scenario::line_sweep: return "line_sweep";
    case scenario::enhanced_table: return "enhanced_table";
    case scenario::closed_form_check: return "closed_form_check";
    case scenario::custom: return "custom";
    }
    return "?";
}

/// Badly approximable angle (pi over the golden ratio). For every t <= 80 the
/// phase t*theta stays >= 0.025 away from multiples of pi, so no site of an
/// enhanced graph has p(x) -> 0 where the position FI is singular.
inline constexpr double golden_theta = std::numbers::pi * (std::numbers::phi - 1.0);

/// Largest |simulated - closed form| tolerated before a row counts as failed.
inline constexpr double closed_form_tolerance = 1e-8;

struct experiment_config {
    scenario kind = scenario::line_sweep;
    axis rotation_axis = axis::y;
    std::vector<double> thetas;  // empty: scenario default
    std::vector<double> sigmas{1.0, 2.0, 5.0, 10.0};
    std::size_t steps = 20;
    std::size_t dim = 2;
    std::string coin;            // minus1 | plus1 | optimal | alpha; empty: scenario default
    double alpha = std::numbers::sqrt2 / 2.0;
    double gamma = 0.0;
    std::size_t ring_size = 0;   // 0: auto
    std::string topology;        // line | enhanced (custom scenario only)
    std::string graph_path;      // graph file (custom scenario only)
    std::size_t start = 0;       // 1-based start vertex, 0: centre of ring / root
    std::string output;          // empty or "-": stdout
    std::size_t measurements = 1;
    std::size_t workers = 0;     // 0: hardware concurrency
    double coin_perturbation = 0.0;
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim_copy(std::string_view s) { return std::string(trim(s)); }

inline double parse_real(const std::string& field, std::string_view text) {
    const auto s = trim_copy(text);
    if (s.empty()) throw config_error(field, "empty value");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v))
        throw config_error(field, "'" + s + "' is not a finite number");
    return v;
}

/// A number, or a multiple of pi written as [k*]pi[/m].
inline double parse_angle(const std::string& field, std::string_view text) {
    auto s = trim_copy(text);
    const auto pos = s.find("pi");
    if (pos == std::string::npos) return parse_real(field, s);
    double factor = 1.0;
    std::string head = s.substr(0, pos);
    if (!head.empty()) {
        if (head == "-") factor = -1.0;
        else if (head.back() == '*') factor = parse_real(field, head.substr(0, head.size() - 1));
        else throw config_error(field, "cannot read angle '" + s + "'");
    }
    std::string tail = s.substr(pos + 2);
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') throw config_error(field, "cannot read angle '" + s + "'");
        divisor = parse_real(field, tail.substr(1));
        if (divisor == 0.0) throw config_error(field, "division by zero");
    }
    return factor * std::numbers::pi / divisor;
}

inline std::size_t parse_count(const std::string& field, std::string_view text) {
    const auto s = trim_copy(text);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw config_error(field, "'" + s + "' is not a non-negative integer");
    return v;
}

template <class Parse>
auto parse_list(const std::string& field, std::string_view text, Parse parse) {
    std::vector<decltype(parse(field, text))> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = std::min(text.find(',', start), text.size());
        out.push_back(parse(field, text.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

} // namespace detail

inline scenario parse_scenario(std::string_view s) {
    if (s == "line_sweep") return scenario::line_sweep;
    if (s == "enhanced_table") return scenario::enhanced_table;
    if (s == "closed_form_check") return scenario::closed_form_check;
    if (s == "custom") return scenario::custom;
    throw config_error("scenario", "unknown scenario '" + std::string(s) + "'");
}

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "scenario", "axis",     "theta",  "sigma",  "steps",        "dim",
        "coin",     "alpha",    "gamma",  "ring_size", "topology",  "graph",
        "start",    "output",   "measurements", "workers", "coin_perturbation"};
    return keys;
}

/// Applies one key=value setting.
inline void apply_setting(experiment_config& cfg, const std::string& key, std::string_view value) {
    using namespace detail;
    try {
        if (key == "scenario") cfg.kind = parse_scenario(trim(value));
        else if (key == "axis") cfg.rotation_axis = parse_axis(trim(value));
        else if (key == "theta") cfg.thetas = parse_list(key, value, parse_angle);
        else if (key == "sigma") cfg.sigmas = parse_list(key, value, parse_real);
        else if (key == "steps") cfg.steps = parse_count(key, value);
        else if (key == "dim") cfg.dim = parse_count(key, value);
        else if (key == "coin") cfg.coin = trim_copy(value);
        else if (key == "alpha") cfg.alpha = parse_real(key, value);
        else if (key == "gamma") cfg.gamma = parse_angle(key, value);
        else if (key == "ring_size") cfg.ring_size = parse_count(key, value);
        else if (key == "topology") cfg.topology = trim_copy(value);
        else if (key == "graph") cfg.graph_path = trim_copy(value);
        else if (key == "start") cfg.start = parse_count(key, value);
        else if (key == "output") cfg.output = trim_copy(value);
        else if (key == "measurements") cfg.measurements = parse_count(key, value);
        else if (key == "workers") cfg.workers = parse_count(key, value);
        else if (key == "coin_perturbation") cfg.coin_perturbation = parse_real(key, value);
        else throw config_error(key, "unknown key");
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        throw config_error(key, e.what());
    }
}

/// Flat key=value text; '#' starts a comment.
inline void apply_config_text(experiment_config& cfg, std::string_view text) {
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        const auto end = std::min(text.find('\n', start), text.size());
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("line " + std::to_string(line_no), "expected key=value");
        apply_setting(cfg, detail::trim_copy(line.substr(0, eq)), line.substr(eq + 1));
    }
}

inline experiment_config load_config_file(const std::string& path,
                                          experiment_config cfg = {}) {
    std::ifstream in(path);
    if (!in) throw config_error("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
    return cfg;
}

inline std::vector<double> effective_thetas(const experiment_config& cfg) {
    if (!cfg.thetas.empty()) return cfg.thetas;
    switch (cfg.kind) {
    case scenario::line_sweep: return {std::numbers::pi / 2.0};
    default: return {golden_theta};
    }
}

inline std::string effective_coin(const experiment_config& cfg) {
    if (!cfg.coin.empty()) return cfg.coin;
    return cfg.kind == scenario::line_sweep ? "minus1" : "optimal";
}

inline void validate(const experiment_config& cfg) {
    if (cfg.steps < 1) throw config_error("steps", "must be >= 1");
    if (cfg.kind == scenario::line_sweep && cfg.sigmas.empty())
        throw config_error("sigma", "empty list");
    for (double s : cfg.sigmas)
        if (!(s > 0.0)) throw config_error("sigma", "values must be positive");
    if (cfg.measurements < 1) throw config_error("measurements", "must be >= 1");
    const auto coin = effective_coin(cfg);
    if (coin != "minus1" && coin != "plus1" && coin != "optimal" && coin != "alpha")
        throw config_error("coin", "expected minus1, plus1, optimal or alpha");
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw config_error("alpha", "must lie in [0, 1]");
    switch (cfg.kind) {
    case scenario::line_sweep:
        if (cfg.dim != 2) throw config_error("dim", "line sweeps use a D=2 coin");
        if (cfg.ring_size != 0 && cfg.ring_size < 3) throw config_error("ring_size", "must be >= 3");
        break;
    case scenario::enhanced_table:
        if (cfg.dim < 2 || cfg.dim > 6) throw config_error("dim", "must lie in [2, 6]");
        break;
    case scenario::closed_form_check: break;
    case scenario::custom:
        if (!cfg.graph_path.empty()) {
            if (!std::filesystem::exists(cfg.graph_path))
                throw config_error("graph", "file '" + cfg.graph_path + "' does not exist");
        } else if (cfg.topology != "line" && cfg.topology != "enhanced") {
            throw config_error("topology", "set topology=line|enhanced or graph=<file>");
        }
        if (cfg.dim < 2) throw config_error("dim", "must be >= 2");
        break;
    }
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

/// Worker count: `requested` (or the hardware concurrency when 0), capped by
/// the QWPROBE_WORKERS environment variable when it is set.
inline std::size_t resolve_workers(std::size_t requested) {
    std::size_t n = requested != 0 ? requested
                                   : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QWPROBE_WORKERS"); env && *env) {
        std::size_t cap = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
        if (ec != std::errc{} || ptr != s.data() + s.size() || cap == 0)
            throw config_error("QWPROBE_WORKERS", "must be a positive integer");
        n = std::min(n, cap);
    }
    return n;
}

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads and returns the
/// results in index order. The first exception thrown by a task is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t workers, Fn fn) {
    using result_t = decltype(fn(std::size_t{}));
    std::vector<std::optional<result_t>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    const std::size_t count = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < count; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<result_t> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Rows and CSV
// ---------------------------------------------------------------------------

struct csv_row {
    std::string scenario_name;
    axis rotation_axis = axis::z;
    std::size_t dim = 2;
    std::optional<double> sigma;
    double theta = 0.0;
    std::size_t t = 0;
    double qfi = 0.0;
    double fi = 0.0;
    std::optional<double> qfi_closed;
    std::optional<double> fi_closed;

    std::optional<double> abs_dev() const {
        std::optional<double> dev;
        if (qfi_closed) dev = std::abs(qfi - *qfi_closed);
        if (fi_closed) dev = std::max(dev.value_or(0.0), std::abs(fi - *fi_closed));
        return dev;
    }

    /// Closed-form deviation above tolerance, or FI above the QFI.
    bool failed() const {
        if (fi > qfi + 1e-8) return true;
        const auto dev = abs_dev();
        return dev && *dev > closed_form_tolerance;
    }
};

struct scenario_result {
    std::vector<csv_row> rows;

    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [](const csv_row& r) { return r.failed(); }));
    }
};

inline constexpr std::string_view csv_header =
    "scenario,axis,D,sigma,theta,t,qfi,fi,qfi_closed,fi_closed,abs_dev";

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

inline std::string to_csv(const std::vector<csv_row>& rows) {
    std::string out(csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += r.scenario_name;
        out += ',';
        out += to_string(r.rotation_axis);
        out += ',' + std::to_string(r.dim);
        out += ',' + format_optional(r.sigma);
        out += ',' + format_number(r.theta);
        out += ',' + std::to_string(r.t);
        out += ',' + format_number(r.qfi);
        out += ',' + format_number(r.fi);
        out += ',' + format_optional(r.qfi_closed);
        out += ',' + format_optional(r.fi_closed);
        out += ',' + format_optional(r.abs_dev());
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

namespace detail {

inline coin_vector make_probe_coin(const std::string& coin, axis a, std::size_t dim,
                                   double alpha, double gamma) {
    if (coin == "minus1") return basis_coin(0, dim);
    if (coin == "plus1") return basis_coin(dim - 1, dim);
    if (coin == "optimal") return optimal_coin_state(a, dim, gamma);
    if (coin == "alpha") return two_level_coin(alpha, gamma, dim);
    throw config_error("coin", "unknown coin preparation '" + coin + "'");
}

/// Coin with an optional fixed off-axis rotation, used for fault injection.
inline coin_operator make_sim_coin(axis a, double theta, std::size_t dim, double perturbation) {
    auto c = make_coin(a, theta, dim);
    if (perturbation == 0.0) return c;
    const axis other = a == axis::z ? axis::x : axis::z;
    return with_fixed_rotation(std::move(c), make_coin(other, perturbation, dim).matrix);
}

/// Runs one walk and emits a row per step t = 1..steps.
template <class Closed>
std::vector<csv_row> trajectory_rows(const walk_config& cfg, const walker_state& probe,
                                     const csv_row& tmpl, Closed closed) {
    std::vector<csv_row> rows;
    rows.reserve(cfg.steps);
    evolve_trajectory(cfg, probe, [&](const evolved_pair& p) {
        csv_row r = tmpl;
        r.t = p.t;
        r.theta = p.theta;
        r.qfi = qfi_pure(p);
        r.fi = position_fi(p);
        std::tie(r.qfi_closed, r.fi_closed) = closed(p.t);
        rows.push_back(std::move(r));
    });
    return rows;
}

inline csv_row row_template(std::string name, axis a, std::size_t dim,
                            std::optional<double> sigma = std::nullopt) {
    csv_row r;
    r.scenario_name = std::move(name);
    r.rotation_axis = a;
    r.dim = dim;
    r.sigma = sigma;
    return r;
}

inline auto no_closed_form() {
    return [](std::size_t) {
        return std::pair<std::optional<double>, std::optional<double>>{};
    };
}

template <class T>
std::vector<T> flatten(std::vector<std::vector<T>> chunks) {
    std::vector<T> out;
    for (auto& c : chunks) std::move(c.begin(), c.end(), std::back_inserter(out));
    return out;
}

} // namespace detail

/// Gaussian probes on the ring, one row per (sigma, theta, t), sorted by
/// sigma then theta then t. Defaults: C_y,
/// theta = pi/2, coin |-1> on every site.
inline scenario_result run_line_sweep(const experiment_config& cfg) {
    validate(cfg);
    auto sigmas = cfg.sigmas;
    auto thetas = effective_thetas(cfg);
    std::sort(sigmas.begin(), sigmas.end());
    std::sort(thetas.begin(), thetas.end());
    const auto coin_name = effective_coin(cfg);
    const auto coin = detail::make_probe_coin(coin_name, cfg.rotation_axis, 2, cfg.alpha, cfg.gamma);

    std::vector<std::pair<double, double>> points;
    for (double s : sigmas)
        for (double th : thetas) points.emplace_back(s, th);

    auto chunks = parallel_map(points.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
        const auto [sigma, theta] = points[i];
        const std::size_t n = cfg.ring_size ? cfg.ring_size : auto_ring_size(cfg.steps, sigma);
        walk_config walk(shift_from_graph(line_graph(n)),
                         detail::make_sim_coin(cfg.rotation_axis, theta, 2, cfg.coin_perturbation),
                         cfg.steps);
        const auto tmpl = detail::row_template("line_sweep", cfg.rotation_axis, 2, sigma);
        return detail::trajectory_rows(walk, gaussian_probe(n / 2, sigma, coin, n), tmpl,
                                       detail::no_closed_form());
    });
    return {detail::flatten(std::move(chunks))};
}

/// Probe localized at the root of the enhanced graph; rows carry the
/// saturated reference (D-1)^2 t^2 for optimal probes.
inline scenario_result run_enhanced_table(const experiment_config& cfg) {
    validate(cfg);
    auto thetas = effective_thetas(cfg);
    std::sort(thetas.begin(), thetas.end());
    const auto coin_name = effective_coin(cfg);
    const auto coin = detail::make_probe_coin(coin_name, cfg.rotation_axis, cfg.dim, cfg.alpha, cfg.gamma);
    const auto shift = shift_from_graph(enhanced_graph(cfg.dim, cfg.steps));
    const std::size_t dim = cfg.dim;
    const axis ax = cfg.rotation_axis;

    auto closed = [&](std::size_t t) {
        std::pair<std::optional<double>, std::optional<double>> c;
        if (coin_name == "optimal") {
            c.first = enhanced_max(dim, t);
            c.second = ax == axis::z ? 0.0 : enhanced_max(dim, t);
        } else if (dim == 2) {
            const double alpha = coin_name == "minus1" ? 1.0 : coin_name == "plus1" ? 0.0 : cfg.alpha;
            c.first = closed_form_enhanced(ax, alpha, cfg.gamma, t);
            if (ax == axis::z || *c.first < 1e-12) c.second = 0.0;
        } else if (ax == axis::z) {
            c.second = 0.0;
        }
        return c;
    };

    auto chunks = parallel_map(thetas.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
        walk_config walk(shift, detail::make_sim_coin(ax, thetas[i], dim, cfg.coin_perturbation),
                         cfg.steps);
        const auto tmpl = detail::row_template("enhanced_table", ax, dim);
        return detail::trajectory_rows(walk, localized_probe(0, coin, shift.n_positions), tmpl, closed);
    });
    return {detail::flatten(std::move(chunks))};
}

/// Simulation against every closed form:
///   line z-coin, localized alpha probes     vs t^2 [1 - (2 alpha^2 - 1)^2], FI = 0
///   line x/y coins at theta = pi            vs t^2/2 + (t mod 2)/2
///   enhanced D = 2, (alpha, gamma) grid     vs the cos^2 / sin^2 gamma surfaces
///   enhanced D = 2..5, optimal probes       vs (D-1)^2 t^2 for QFI and FI
inline scenario_result run_closed_form_check(const experiment_config& cfg) {
    validate(cfg);
    const std::size_t steps = cfg.steps;
    const double eps = cfg.coin_perturbation;
    const std::vector<double> alphas{0.0, 0.25, 0.5, std::numbers::sqrt2 / 2.0, 1.0};
    const std::vector<double> gammas{0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0,
                                     3.0 * std::numbers::pi / 4.0, std::numbers::pi};
    const double theta = cfg.thetas.empty() ? golden_theta : cfg.thetas.front();

    using job = std::function<std::vector<csv_row>()>;
    std::vector<job> jobs;

    const std::size_t ring = cfg.ring_size ? cfg.ring_size : auto_ring_size(steps);
    for (double alpha : alphas) {
        jobs.emplace_back([=] {
            walk_config walk(shift_from_graph(line_graph(ring)),
                             detail::make_sim_coin(axis::z, theta, 2, eps), steps);
            const double a2 = alpha * alpha;
            const branch_weight w{a2, 1.0 - a2};
            return detail::trajectory_rows(
                walk, localized_probe(ring / 2, alpha, 0.0, ring),
                detail::row_template("closed_form_check", axis::z, 2),
                [w](std::size_t t) {
                    return std::pair<std::optional<double>, std::optional<double>>{
                        closed_form_line_z(std::span(&w, 1), t), 0.0};
                });
        });
    }
    for (axis ax : {axis::x, axis::y}) {
        jobs.emplace_back([=] {
            walk_config walk(shift_from_graph(line_graph(ring)),
                             detail::make_sim_coin(ax, std::numbers::pi, 2, eps), steps);
            return detail::trajectory_rows(
                walk, localized_probe(ring / 2, optimal_coin_state(ax, 2), ring),
                detail::row_template("closed_form_check", ax, 2), [](std::size_t t) {
                    return std::pair<std::optional<double>, std::optional<double>>{
                        max_qfi_line_xy(t), std::nullopt};
                });
        });
    }
    for (axis ax : {axis::x, axis::y, axis::z}) {
        for (double alpha : alphas) {
            for (double gamma : gammas) {
                jobs.emplace_back([=] {
                    const auto shift = shift_from_graph(enhanced_graph(2, steps));
                    walk_config walk(shift, detail::make_sim_coin(ax, theta, 2, eps), steps);
                    return detail::trajectory_rows(
                        walk, localized_probe(0, alpha, gamma, shift.n_positions),
                        detail::row_template("closed_form_check", ax, 2), [=](std::size_t t) {
                            std::pair<std::optional<double>, std::optional<double>> c;
                            c.first = closed_form_enhanced(ax, alpha, gamma, t);
                            if (ax == axis::z || *c.first < 1e-12) c.second = 0.0;
                            return c;
                        });
                });
            }
        }
    }
    for (std::size_t dim = 2; dim <= 5; ++dim) {
        for (axis ax : {axis::x, axis::y}) {
            jobs.emplace_back([=] {
                const auto shift = shift_from_graph(enhanced_graph(dim, steps));
                walk_config walk(shift, detail::make_sim_coin(ax, theta, dim, eps), steps);
                return detail::trajectory_rows(
                    walk, localized_probe(0, optimal_coin_state(ax, dim), shift.n_positions),
                    detail::row_template("closed_form_check", ax, dim), [dim](std::size_t t) {
                        return std::pair<std::optional<double>, std::optional<double>>{
                            enhanced_max(dim, t), enhanced_max(dim, t)};
                    });
            });
        }
    }

    auto chunks = parallel_map(jobs.size(), resolve_workers(cfg.workers),
                               [&](std::size_t i) { return jobs[i](); });
    return {detail::flatten(std::move(chunks))};
}

/// Walk on a line, enhanced or user-supplied graph with a localized probe.
inline scenario_result run_custom(const experiment_config& cfg) {
    validate(cfg);
    auto thetas = effective_thetas(cfg);
    std::sort(thetas.begin(), thetas.end());

    std::optional<graph> g;
    std::size_t start = 0;
    if (!cfg.graph_path.empty()) {
        std::ifstream in(cfg.graph_path);
        std::stringstream buf;
        buf << in.rdbuf();
        g = parse_graph(buf.str());
        start = cfg.start ? cfg.start - 1 : 0;
    } else if (cfg.topology == "line") {
        const std::size_t n = cfg.ring_size ? cfg.ring_size : auto_ring_size(cfg.steps);
        g = line_graph(n);
        start = cfg.start ? cfg.start - 1 : n / 2;
    } else {
        g = enhanced_graph(cfg.dim, cfg.steps);
        start = cfg.start ? cfg.start - 1 : 0;
    }
    const std::size_t dim = g->coin_dim();
    if (start >= g->n_vertices()) throw config_error("start", "vertex outside the graph");
    const auto shift = shift_from_graph(*g);
    const auto coin = detail::make_probe_coin(effective_coin(cfg), cfg.rotation_axis, dim,
                                              cfg.alpha, cfg.gamma);

    auto chunks = parallel_map(thetas.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
        walk_config walk(shift,
                         detail::make_sim_coin(cfg.rotation_axis, thetas[i], dim, cfg.coin_perturbation),
                         cfg.steps);
        return detail::trajectory_rows(walk, localized_probe(start, coin, shift.n_positions),
                                       detail::row_template("custom", cfg.rotation_axis, dim),
                                       detail::no_closed_form());
    });
    return {detail::flatten(std::move(chunks))};
}

inline scenario_result run_scenario(const experiment_config& cfg) {
    switch (cfg.kind) {
    case scenario::line_sweep: return run_line_sweep(cfg);
    case scenario::enhanced_table: return run_enhanced_table(cfg);
    case scenario::closed_form_check: return run_closed_form_check(cfg);
    case scenario::custom: return run_custom(cfg);
    }
    throw config_error("scenario", "unhandled scenario");
}

} // namespace qwprobe
