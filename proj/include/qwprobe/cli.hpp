// cli.hpp
// Command-line front end. Exit codes: 0 success, 1 a closed-form or
// Cramer-Rao assertion failed, 2 configuration / parse error.

#pragma once

#include "experiments.hpp"
#include "metrology.hpp"
#include "topology.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qwprobe {

inline constexpr std::string_view version_string = "qwprobe 1.0.0";

namespace detail {

inline int emit(const experiment_config& cfg, const scenario_result& result, std::string_view label,
                std::ostream& out, std::ostream& err) {
    const auto csv = to_csv(result.rows);
    const bool to_stdout = cfg.output.empty() || cfg.output == "-";
    if (to_stdout) {
        out << csv;
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) throw config_error("output", "cannot write '" + cfg.output + "'");
        file << csv;
    }
    std::ostream& summary = to_stdout ? err : out;
    const auto failures = result.failures();
    summary << label << ": " << result.rows.size() << " rows";
    if (!to_stdout) summary << " -> " << cfg.output;
    if (!result.rows.empty()) {
        const auto& last = result.rows.back();
        summary << "; last t=" << last.t << " qfi=" << format_number(last.qfi)
                << " fi=" << format_number(last.fi);
        if (last.fi > 0.0 && last.qfi > 0.0)
            summary << " var>=" << format_number(cramer_rao(last.fi, cfg.measurements))
                    << ">=" << format_number(cramer_rao(last.qfi, cfg.measurements))
                    << " (M=" << cfg.measurements << ")";
    }
    summary << "; " << failures << " failed\n";
    return failures == 0 ? 0 : 1;
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Discrete-time quantum walk probes: quantum and position Fisher information",
                 "qwprobe"};
    app.require_subcommand(1);

    struct run_options {
        std::string config_path;
        std::map<std::string, std::string> overrides;
    };

    auto add_run = [&](const std::string& name, const std::string& help, run_options& opts) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config_path, "key=value configuration file");
        for (const auto& key : config_keys()) {
            if (key == "scenario") continue;
            std::string flag = "--" + key;
            if (key == "output") flag = "-o,--output";
            sub->add_option_function<std::string>(
                flag, [&opts, key](const std::string& v) { opts.overrides[key] = v; },
                "overrides the '" + key + "' config key");
        }
        return sub;
    };

    run_options simulate_opts, sweep_opts, enhanced_opts, check_opts;
    auto* simulate = add_run("simulate", "walk on a line, enhanced or custom graph", simulate_opts);
    auto* sweep = add_run("line-sweep", "Gaussian probes on the line (QFI/FI vs t per sigma)", sweep_opts);
    auto* enhanced = add_run("enhanced", "optimal probes on the enhanced topology", enhanced_opts);
    auto* check = add_run("check", "simulation against every closed form", check_opts);

    auto* graph_cmd = app.add_subcommand("graph", "graph file utilities");
    graph_cmd->require_subcommand(1);
    std::string graph_file;
    auto* validate_cmd = graph_cmd->add_subcommand("validate", "parse and compile a graph file");
    validate_cmd->add_option("file", graph_file, "graph file")->required();

    auto* version_cmd = app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (version_cmd->parsed()) {
            out << version_string << '\n';
            return 0;
        }
        if (validate_cmd->parsed()) {
            std::ifstream in(graph_file);
            if (!in) throw config_error("file", "cannot open '" + graph_file + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            const auto g = parse_graph(buf.str());
            const auto s = shift_from_graph(g);
            std::size_t active = 0;
            for (bool a : s.active) active += a ? 1 : 0;
            out << graph_file << ": ok, " << g.n_vertices() << " vertices, D=" << g.coin_dim()
                << ", " << g.edges().size() << " edges, kind=" << to_string(g.kind()) << ", "
                << active << " steppable vertices\n";
            return 0;
        }

        struct mode {
            CLI::App* sub;
            run_options* opts;
            scenario kind;
        };
        for (const auto& m : {mode{simulate, &simulate_opts, scenario::custom},
                              mode{sweep, &sweep_opts, scenario::line_sweep},
                              mode{enhanced, &enhanced_opts, scenario::enhanced_table},
                              mode{check, &check_opts, scenario::closed_form_check}}) {
            if (!m.sub->parsed()) continue;
            experiment_config cfg;
            if (!m.opts->config_path.empty()) cfg = load_config_file(m.opts->config_path);
            cfg.kind = m.kind;
            for (const auto& [key, value] : m.opts->overrides) apply_setting(cfg, key, value);
            const auto result = run_scenario(cfg);
            return detail::emit(cfg, result, m.sub->get_name(), out, err);
        }
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    err << app.help();
    return 2;
}

} // namespace qwprobe
