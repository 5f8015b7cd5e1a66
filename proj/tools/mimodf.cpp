// Command-line front end: sweep, plot, bound.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mimodf/cli.hpp"
#include "mimodf/inversion.hpp"

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decision-fusion CROC simulator and MGF analyzer"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sweep = app.add_subcommand("sweep", "run the scenarios of a config file and write CSV tables");
    sweep->add_option("config", config_path, "key = value configuration file")->required();

    std::vector<std::string> csvs;
    std::string svg_path;
    std::string title = "CROC";
    auto* plot = app.add_subcommand("plot", "render CSV tables as a log-log CROC figure");
    plot->add_option("csv", csvs, "result tables")->required();
    plot->add_option("-o,--output", svg_path, "SVG file to write")->required();
    plot->add_option("--title", title, "figure title");

    int K = 2;
    double pf = 0.05, pd = 0.5;
    auto* bound = app.add_subcommand("bound", "print the observation bound (g, q_f, q_m)");
    bound->add_option("--K", K, "number of secondary users")->check(CLI::PositiveNumber);
    bound->add_option("--pf", pf, "local false-alarm probability")->check(CLI::Range(0.0, 1.0));
    bound->add_option("--pd", pd, "local detection probability")->check(CLI::Range(0.0, 1.0));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            const auto cfg = mimodf::load_config(config_path);
            const auto report = mimodf::run_sweep(cfg);
            for (const auto& f : report.files) std::cout << f.string() << '\n';
            for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
            return report.ok() ? 0 : 2;
        }
        if (*plot) {
            mimodf::ResultTable table;
            for (const auto& path : csvs) {
                auto part = mimodf::parse_csv(slurp(path));
                table.insert(table.end(), part.begin(), part.end());
            }
            std::ofstream out(svg_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + svg_path);
            out << mimodf::render_plot(table, title);
            return out ? 0 : 1;
        }
        if (*bound) {
            std::cout << "g,q_f,q_m\n";
            for (const auto& b : mimodf::observation_bound(K, pf, pd))
                std::cout << b.g << ',' << mimodf::format_double(b.q_f) << ',' << mimodf::format_double(b.q_m)
                          << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
