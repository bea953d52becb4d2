#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "meshsim/engine.hpp"
#include "meshsim/errors.hpp"
#include "meshsim/report_io.hpp"
#include "meshsim/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        meshsim::write_file_atomic(out_path, content);
    }
}

bool parse_pair(const std::string& text, char sep, double& a, double& b) {
    const char pattern[] = {'%', 'l', 'f', sep, '%', 'l', 'f', '\0'};
    return std::sscanf(text.c_str(), pattern, &a, &b) == 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slot-based mobile mesh relay simulator"};
    app.require_subcommand(1);

    std::string run_scenario_path, run_trace_path, run_out_path;
    auto* cmd_run = app.add_subcommand("run", "Run the relay protocol on a scenario file");
    cmd_run->add_option("--scenario", run_scenario_path, "Scenario JSON file")->required();
    cmd_run->add_option("--trace", run_trace_path, "Also write the full event trace CSV here");
    cmd_run->add_option("--out", run_out_path, "Report JSON path (default: stdout)");

    meshsim::GeneratorParams gen;
    std::string gen_area = "1000x1000", gen_speed = "0:20", gen_out;
    auto* cmd_gen = app.add_subcommand("generate", "Generate a random scenario file");
    cmd_gen->add_option("--nodes", gen.node_count, "Number of nodes")->required();
    cmd_gen->add_option("--sessions", gen.session_count, "Number of sessions")->required();
    cmd_gen->add_option("--seed", gen.seed, "Master seed")->required();
    cmd_gen->add_option("--range", gen.range, "Communication range (default 100)");
    cmd_gen->add_option("--area", gen_area, "World size WxH (default 1000x1000)");
    cmd_gen->add_option("--speed", gen_speed, "Speed bounds MIN:MAX (default 0:20)");
    cmd_gen->add_option("--slots", gen.max_slots, "Slot budget (default 200)");
    cmd_gen->add_option("--start-window", gen.start_window,
                        "Sessions start uniformly in [0, W] (default 0)");
    cmd_gen->add_option("--out", gen_out, "Output scenario path")->required();

    std::string cmp_scenario_path, cmp_out_path;
    auto* cmd_cmp = app.add_subcommand(
        "compare", "Run protocol and flooding baseline, emit side-by-side metrics");
    cmd_cmp->add_option("--scenario", cmp_scenario_path, "Scenario JSON file")->required();
    cmd_cmp->add_option("--out", cmp_out_path, "Comparison JSON path")->required();

    std::string val_scenario_path;
    auto* cmd_val = app.add_subcommand("validate", "Check a scenario file and exit");
    cmd_val->add_option("--scenario", val_scenario_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_run->parsed()) {
            const auto config = meshsim::parse_scenario(read_file(run_scenario_path));
            const auto report = meshsim::run_scenario(config);
            emit(meshsim::render_report_json(report), run_out_path);
            if (!run_trace_path.empty()) {
                meshsim::write_file_atomic(run_trace_path, meshsim::render_trace_csv(report));
            }
        } else if (cmd_gen->parsed()) {
            if (!parse_pair(gen_area, 'x', gen.width, gen.height)) {
                std::cerr << "--area: expected WxH, got '" << gen_area << "'\n";
                return 1;
            }
            if (!parse_pair(gen_speed, ':', gen.speed_min, gen.speed_max)) {
                std::cerr << "--speed: expected MIN:MAX, got '" << gen_speed << "'\n";
                return 1;
            }
            const auto config = meshsim::generate_scenario(gen);
            meshsim::write_file_atomic(gen_out, meshsim::serialize_scenario(config));
        } else if (cmd_cmp->parsed()) {
            const auto config = meshsim::parse_scenario(read_file(cmp_scenario_path));
            const auto protocol = meshsim::run_scenario(config);
            const auto flooding = meshsim::run_flooding_baseline(config);
            emit(meshsim::render_comparison_json(protocol, flooding), cmp_out_path);
        } else if (cmd_val->parsed()) {
            meshsim::parse_scenario(read_file(val_scenario_path));
            std::cout << "valid\n";
        }
    } catch (const meshsim::ScenarioParseError& e) {
        std::cerr << "scenario parse error: " << e.what() << '\n';
        return 1;
    } catch (const meshsim::ValidationError& e) {
        std::cerr << "invalid scenario:\n";
        for (const auto& issue : e.issues()) std::cerr << "  - " << issue << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
