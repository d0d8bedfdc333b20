#include <CLI11.hpp>

#include <iostream>

#include "experiment.hpp"

namespace {

template <class T>
std::pair<T, T> two_values(const std::vector<T>& v) {
    return {v.at(0), v.at(1)};
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mixtopo::cli;

    CLI::App app{"Geometric phases and topological invariants of Bloch density matrices"};
    app.set_version_flag("--version", version());

    std::string config_path;
    std::string model;
    std::string experiment;
    double beta = 0.0;
    std::vector<double> bracket;
    std::vector<int> grid;
    int loop_points = 500;
    int slow_count = 500;
    std::string axis;
    double footpoint = 0.0;
    int subspace = 1;
    double min_gap = 0.0;
    double floor = 0.0;
    std::string out;
    std::string format;
    unsigned threads = 0;
    bool validate_only = false;

    app.add_option("--config", config_path, "Experiment config file (flags override its values)");
    app.add_option("--model", model, "Model file or builtin (aniso-qah)");
    app.add_option("--experiment", experiment, "chern|uhlmann-wind|uhlmann-chern|phase-profile|beta-scan|gap-scan|band-sum|repro");
    app.add_option("--beta", beta, "Inverse temperature");
    app.add_option("--beta-bracket", bracket, "Bisection bracket a,b")->delimiter(',')->expected(2);
    app.add_option("--grid", grid, "Grid NX,NY")->delimiter(',')->expected(2);
    app.add_option("--loop-points", loop_points, "Steps M per fast loop (default 500)");
    app.add_option("--slow-count", slow_count, "Slow-coordinate samples (default 500)");
    app.add_option("--axis", axis, "Slow axis x|y");
    app.add_option("--footpoint", footpoint, "Fast-loop start (default -pi)");
    app.add_option("--subspace", subspace, "Number n of largest rho eigenvalues");
    app.add_option("--min-gap", min_gap, "Required purity gap");
    app.add_option("--floor", floor, "rho floor eta in [0, 1)");
    app.add_option("--out", out, "Output path (stdout if omitted)");
    app.add_option("--format", format, "csv|json");
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");
    app.add_flag("--validate", validate_only, "Only validate the configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        auto given = [&](const char* name) { return app.count(name) > 0; };
        if (given("--model")) c.model = model;
        if (given("--experiment")) c.experiment = experiment;
        if (given("--beta")) c.beta = beta;
        if (given("--beta-bracket")) c.beta_bracket = two_values(bracket);
        if (given("--grid")) c.grid = two_values(grid);
        if (given("--loop-points")) c.loop_points = loop_points;
        if (given("--slow-count")) c.slow_count = slow_count;
        if (given("--axis")) c.axis = axis;
        if (given("--footpoint")) c.footpoint = footpoint;
        if (given("--subspace")) c.subspace = subspace;
        if (given("--min-gap")) c.min_gap = min_gap;
        if (given("--floor")) c.floor = floor;
        if (given("--out")) c.out = out;
        if (given("--format")) c.format = format;
        if (given("--threads")) c.threads = threads;

        if (validate_only) {
            const auto diags = validate(c);
            for (const auto& d : diags) std::cerr << d.field << ": " << d.message << "\n";
            return diags.empty() ? kOk : kConfigError;
        }

        const ResultEnvelope env = run(c);
        write_outputs(env);
        for (const auto& w : env.warnings) std::cerr << "warning: " << w << "\n";
        return env.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
