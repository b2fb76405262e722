#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "windlab/acceptance.hpp"

#ifndef WINDLAB_GIT_VERSION
#define WINDLAB_GIT_VERSION "unknown"
#endif

using windlab::cli::Config;
using windlab::cli::ConfigError;
using windlab::cli::json;

namespace {

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::string out;
    std::string format;
};

Config load(const std::string& experiment, const GlobalFlags& f)
{
    json doc = json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in)
            throw ConfigError("cannot read config file " + f.config);
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    Config c = windlab::cli::parse_config(doc, experiment);
    if (f.seed)
        c.run.seed = *f.seed;
    if (f.samples)
        c.run.samples = *f.samples;
    if (!f.out.empty())
        c.output.path = f.out;
    if (!f.format.empty())
        c.output.format = f.format;
    windlab::cli::validate_config(c);
    return c;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

int run_one(const std::string& experiment, const GlobalFlags& f)
{
    Config c;
    try {
        c = load(experiment, f);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    windlab::cli::ExperimentResult res;
    try {
        res = windlab::cli::run_experiment(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << experiment << " failed: " << e.what() << "\n";
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::string body;
    if (c.output.format == "json")
        body = json{{"table", windlab::cli::table_to_json(res.table)}, {"summary", res.summary}}.dump(2) + "\n";
    else
        body = windlab::cli::table_to_csv(res.table);
    json manifest = {{"experiment", c.experiment},
                     {"config", windlab::cli::config_to_json(c)},
                     {"config_hash", windlab::cli::config_hash(c)},
                     {"seed", c.run.seed},
                     {"version", WINDLAB_GIT_VERSION},
                     {"wall_seconds", wall},
                     {"ok", res.ok},
                     {"summary", res.summary}};
    if (c.output.path.empty()) {
        std::cout << body;
        std::cerr << manifest.dump(2) << "\n";
    } else {
        try {
            write_file(c.output.path, body);
            write_file(c.output.path + ".manifest.json", manifest.dump(2) + "\n");
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
        std::cerr << c.experiment << ": " << res.summary.dump() << "\n";
    }
    if (!res.ok) {
        std::cerr << c.experiment << " failed: " << res.failure << "\n";
        return 1;
    }
    return 0;
}

int run_acceptance(const std::string& suite, const std::string& out)
{
    json report = json::array();
    bool all_pass = true;
    const auto results = windlab::run_acceptance(suite, [](const windlab::CriterionResult& r) {
        std::printf("%s\n", windlab::format_result_line(r).c_str());
        std::fflush(stdout);
    });
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        report.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    if (!out.empty())
        write_file(out, json{{"suite", suite}, {"version", WINDLAB_GIT_VERSION}, {"criteria", report}}.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"windlab: UST branch winding experiments"};
    app.require_subcommand(1);
    GlobalFlags flags;
    app.add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "master seed");
    app.add_option("--samples", flags.samples, "number of samples or paths");
    app.add_option("--out", flags.out, "results file; a manifest is written next to it");
    app.add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string chosen;
    for (const auto& name : windlab::cli::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->fallthrough();
        sub->callback([&chosen, name] { chosen = name; });
    }
    std::string suite = "all";
    auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
    acc->add_option("suite", suite, "exact, mc, sde or all")->check(CLI::IsMember({"exact", "mc", "sde", "all"}));
    acc->fallthrough();
    acc->callback([&chosen] { chosen = "acceptance"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (chosen == "acceptance")
            return run_acceptance(suite, flags.out);
        return run_one(chosen, flags);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
