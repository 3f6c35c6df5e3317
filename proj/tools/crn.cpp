#include <unistd.h>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crn/commands.hpp"

namespace {

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--c-inf", "'" + item + "' is not a number");
        }
        if (used != item.size()) throw CLI::ValidationError("--c-inf", "'" + item + "' is not a number");
        values.push_back(v);
    }
    return values;
}

std::vector<crn::Scheme> parse_scheme_list(const std::string& text) {
    std::vector<crn::Scheme> schemes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) schemes.push_back(crn::parse_scheme(item));
    return schemes;
}

void add_run_options(CLI::App* cmd, crn::RunConfig& run, std::string& c_inf_text) {
    cmd->add_option("--network", run.network_path, "network file")->required();
    cmd->add_option("--dt", run.dt, "time step")->required();
    cmd->add_option("--t-end", run.t_end, "final time")->required();
    cmd->add_option("--tol", run.tol, "Newton gradient tolerance (default relative 1e-12)");
    cmd->add_option("--c-inf", c_inf_text, "equilibrium override, comma separated");
    cmd->add_option("--max-energy-increase", run.thresholds.max_energy_increase, "audit threshold");
    cmd->add_option("--max-conservation", run.thresholds.max_conservation, "audit threshold");
    cmd->add_flag("--lma-predictor", run.lma_predictor, "start Newton from an explicit rate predictor");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mass-action reaction network simulator"};
    app.require_subcommand(1);

    std::string check_path;
    auto* check = app.add_subcommand("check", "validate a network and print its structure");
    check->add_option("file", check_path, "network file")->required();

    crn::RunConfig run;
    std::string scheme_name = "trajectory";
    std::string format_name = "csv";
    std::string c_inf_text;
    bool quiet = false;
    auto* simulate = app.add_subcommand("simulate", "integrate a network and audit the trajectory");
    add_run_options(simulate, run, c_inf_text);
    simulate->add_option("--scheme", scheme_name, "trajectory, explicit-euler or implicit-euler");
    simulate->add_option("--out", run.out_path, "output file (default stdout)");
    simulate->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_flag("--quiet", quiet, "do not print the audit summary");

    crn::CompareConfig compare_config;
    std::string schemes_text;
    bool no_timing = false;
    auto* compare = app.add_subcommand("compare", "run several schemes against a fine reference");
    add_run_options(compare, compare_config.run, c_inf_text);
    compare->add_option("--schemes", schemes_text, "comma separated scheme list")->required();
    compare->add_option("--levels", compare_config.levels, "dt halvings per scheme");
    compare->add_flag("--no-timing", no_timing, "omit wall-clock times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return crn::exit_code::invalid_input;
    }

    const bool color = crn::use_color(isatty(STDERR_FILENO) != 0);
    try {
        if (*check) return crn::cmd_check(check_path, std::cout, std::cerr, color);

        if (*simulate) {
            run.scheme = crn::parse_scheme(scheme_name);
            run.format = format_name == "json" ? crn::OutputFormat::Json : crn::OutputFormat::Csv;
            if (!c_inf_text.empty()) run.c_inf = parse_values(c_inf_text);
            run.print_audit = !quiet;
            return crn::cmd_simulate(run, std::cout, std::cerr, color);
        }

        compare_config.schemes = parse_scheme_list(schemes_text);
        compare_config.timing = !no_timing;
        if (!c_inf_text.empty()) compare_config.run.c_inf = parse_values(c_inf_text);
        return crn::cmd_compare(compare_config, std::cout, std::cerr, color && isatty(STDOUT_FILENO) != 0);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return crn::exit_code::invalid_input;
    } catch (const crn::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return crn::exit_code::invalid_input;
    }
}
