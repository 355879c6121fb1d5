#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace agc::cli {

struct Options {
    std::filesystem::path config;
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    bool svg = false;
};

// Each returns the process exit code (0 ok, 1 check failure).
int cmd_construct(const Options& o);
int cmd_sweep(const Options& o);
int cmd_bounds(const Options& o);
int cmd_train(const Options& o);
int cmd_validate(const Options& o);

}  // namespace agc::cli
