#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace promptbo::cli;

    CLI::App app{"Bayesian optimisation of discrete prompts for black-box language models", "promptbo"};
    app.require_subcommand(1);

    OptimizeOptions optimize;
    std::uint64_t seed = 0;
    double beta = 0.0;
    auto* opt = app.add_subcommand("optimize", "Run one optimisation from a config file");
    opt->add_option("--config", optimize.config_path, "Run configuration (JSON)")->required();
    auto* seed_opt = opt->add_option("--seed", seed, "Override the run seed");
    auto* beta_opt = opt->add_option("--beta", beta, "Override the UCB exploration weight");

    CompareOptions compare;
    std::string methods = "bo,random";
    std::string seeds;
    auto* cmp = app.add_subcommand("compare", "Run several methods on matched seeds");
    cmp->add_option("--config", compare.config_path, "Run configuration (JSON)")->required();
    cmp->add_option("--methods", methods, "Comma-separated methods: bo, random")->capture_default_str();
    cmp->add_option("--seeds", seeds, "Comma-separated seeds (default: the config seed)");

    PlotOptions plot;
    std::string output;
    auto* plt = app.add_subcommand("plot", "Best-seen versus elapsed time, as SVG or tidy CSV");
    plt->add_option("traces", plot.inputs, "Trace CSVs or tidy series CSVs")->required();
    plt->add_flag("--data-only", plot.data_only, "Write the series as CSV instead of SVG");
    plt->add_option("-o,--output", output, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*opt) {
        if (*seed_opt) optimize.seed = seed;
        if (*beta_opt) optimize.beta = beta;
        optimize.scorer_url = scorer_url_from_env();
        return cmd_optimize(optimize, std::cout, std::cerr);
    }
    if (*cmp) {
        compare.methods = split_list(methods);
        try {
            for (const auto& s : split_list(seeds)) {
                std::size_t used = 0;
                const auto v = std::stoull(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                compare.seeds.push_back(v);
            }
        } catch (const std::exception&) {
            std::cerr << "error: --seeds must be a comma-separated list of non-negative integers\n";
            return kExitConfig;
        }
        compare.scorer_url = scorer_url_from_env();
        return cmd_compare(compare, std::cout, std::cerr);
    }
    if (!output.empty()) plot.output = output;
    return cmd_plot(plot, std::cout, std::cerr);
}
