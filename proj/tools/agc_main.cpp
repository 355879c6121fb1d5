// agc: construct | sweep | bounds | train | validate
#include "commands.hpp"

#include "agc/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Approximate gradient coding toolkit"};
    app.require_subcommand(1);
    agc::cli::Options opts;
    std::uint64_t seed = 0;

    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const agc::cli::Options&);
    };
    const Entry entries[] = {
        {"construct", "Build an assignment (and optional encoding) matrix and validate it", agc::cli::cmd_construct},
        {"sweep", "Monte Carlo approximation-error sweep with bounds", agc::cli::cmd_sweep},
        {"bounds", "Evaluate closed-form error bounds over a grid", agc::cli::cmd_bounds},
        {"train", "Simulate distributed gradient descent with stragglers", agc::cli::cmd_train},
        {"validate", "Run invariant checks on a construction", agc::cli::cmd_validate},
    };
    std::vector<std::pair<CLI::App*, const Entry*>> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("--config", opts.config, "JSON config file")->required();
        sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_flag("--svg", opts.svg, "Also write an SVG chart");
        subs.emplace_back(sub, &e);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (auto [sub, entry] : subs) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed")) opts.seed = seed;
        try {
            return entry->run(opts);
        } catch (const agc::Error& e) {
            std::cerr << "agc " << entry->name << ": " << agc::to_string(e.kind()) << ": " << e.what() << '\n';
            switch (e.kind()) {
                case agc::ErrorKind::InvalidArgument:
                case agc::ErrorKind::DimensionMismatch:
                case agc::ErrorKind::Io: return 2;
                default: return 1;
            }
        } catch (const std::exception& e) {
            std::cerr << "agc " << entry->name << ": " << e.what() << '\n';
            return 2;
        }
    }
    return 2;
}
