// Searches cyclic planar difference sets and writes them as JSON.
//   find_difference_set --order 2 --order 3 --order 9 --out data/difference_sets.json
#include "agc/designs.hpp"
#include "agc/error.hpp"
#include "agc/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Cyclic (q^2+q+1, q+1, 1) difference set search"};
    std::vector<int> orders{2, 3, 9};
    std::string out;
    app.add_option("--order", orders, "Projective plane order q (repeatable)")->capture_default_str();
    app.add_option("--out", out, "Write JSON here instead of stdout");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::vector<agc::DifferenceSet> found;
    for (int q : orders) {
        const int v = q * q + q + 1;
        const auto t0 = std::chrono::steady_clock::now();
        auto ds = agc::search_planar_difference_set(v, q + 1);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!ds) {
            std::cerr << "no planar difference set for v = " << v << '\n';
            return 1;
        }
        std::cerr << "v = " << v << ": {";
        for (std::size_t i = 0; i < ds->set.size(); ++i) std::cerr << (i ? ", " : "") << ds->set[i];
        std::cerr << "} in " << secs << " s\n";
        found.push_back(std::move(*ds));
    }
    try {
        const std::string text = agc::difference_sets_to_json(found).dump(2) + "\n";
        if (out.empty()) std::cout << text;
        else agc::write_text(out, text);
    } catch (const agc::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return 0;
}
