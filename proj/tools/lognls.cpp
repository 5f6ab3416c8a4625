#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "lognls/config.hpp"
#include "lognls/errors.hpp"
#include "lognls/experiments.hpp"
#include "lognls/io.hpp"
#include "lognls/svg.hpp"

using namespace lognls;

namespace {

// exit codes: 0 success, 2 invalid input, 3 numerical failure
constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kNumerical = 3;

cfg::ParseResult load_config(const std::string& path) {
    return cfg::parse_config(io::read_file(path));
}

void print_problems(const cfg::ParseResult& parsed) {
    for (const auto& e : parsed.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
    for (const auto& w : parsed.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_run(const std::string& config_path) {
    const auto parsed = load_config(config_path);
    print_problems(parsed);
    if (!parsed.ok()) return kInvalid;

    const char* root = std::getenv("LOGNLS_OUTPUT_ROOT");
    const auto result = driver::run_experiment(*parsed.config, root ? root : "");
    std::fputs(result.summary_json.c_str(), stdout);
    return result.exit_code;
}

int cmd_validate(const std::string& config_path) {
    const auto parsed = load_config(config_path);
    print_problems(parsed);
    if (!parsed.ok()) return kInvalid;
    std::printf("ok: %s experiment\n", cfg::kind_name(parsed.config->kind));
    return kOk;
}

int cmd_plot(const std::string& csv_path, const std::string& spec_path,
             const std::string& out_path) {
    const auto spec = svg::parse_plot_spec(io::read_file(spec_path));
    const std::string written = svg::emit_plot(csv_path, spec, out_path);
    std::printf("%s\n", written.c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logarithmic Schrodinger laboratory: dilation ODEs, split-step runs, "
                 "rescaled diagnostics, relaxation references"};
    app.require_subcommand(1);

    std::string config_path, csv_path, spec_path, out_path;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "experiment config file")->required();

    auto* validate = app.add_subcommand("validate", "check a config and report every problem");
    validate->add_option("config", config_path, "experiment config file")->required();

    auto* plot = app.add_subcommand("plot", "render a line plot from a diagnostics CSV");
    plot->add_option("csv", csv_path, "input CSV")->required();
    plot->add_option("plotspec", spec_path, "plot spec (x/y columns, log flags, title)")
        ->required();
    plot->add_option("-o,--output", out_path, "output SVG path (default: CSV path with .svg)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config_path);
        if (validate->parsed()) return cmd_validate(config_path);
        return cmd_plot(csv_path, spec_path, out_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumerical;
    }
}
