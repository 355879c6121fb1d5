#pragma once

#include "agc/experiments.hpp"
#include "agc/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agc {

struct Dataset {
    Matrix x;                 // N x (dim + 1), last column is the bias feature
    std::vector<int> labels;  // in [0, classes)
    int classes = 0;
};

struct SyntheticSpec {
    int samples = 600;
    int dim = 10;
    int classes = 3;
    // Class means are drawn N(0, separation^2 I); points add N(0, I) noise.
    double separation = 1.5;
    std::uint64_t seed = 0;
};

Dataset make_synthetic(const SyntheticSpec& spec);

// Numeric features per line, final column an integer label >= 0.
Dataset load_csv_dataset(const std::string& path);

// Mean cross-entropy of softmax(X W); W is (dim + 1) x classes.
double logistic_loss(const Dataset& data, const Matrix& w, std::size_t rows);

// Per-subset gradients: subset i covers rows [i*size, (i+1)*size), scaled by
// 1/(k*size) so that they sum to the full-batch gradient. Each gradient is W
// flattened column-major.
std::vector<std::vector<double>> subset_gradients(const Dataset& data, const Matrix& w, std::size_t k);

enum class TrainMode { Coded, Exact };

struct TrainScheme {
    std::string name;
    TrainMode mode = TrainMode::Coded;
    SchemeSpec spec;
};

struct TrainConfig {
    std::optional<std::string> csv_path;
    SyntheticSpec synthetic;
    AssignmentSpec assignment;
    std::vector<TrainScheme> schemes;
    int m = 2;
    double learning_rate = 0.5;
    int iterations = 200;
    double q = 0.25;
    int repetitions = 20;
    // Standard deviation of the Gaussian initial weights; 0 means zeros.
    double init_scale = 0.0;
    // Divide the learning rate by beta_hat from a warm-up estimate.
    bool rescale_lr = false;
    int warmup_trials = 2000;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

struct Trajectory {
    std::string scheme;
    std::uint64_t seed = 0;
    std::vector<double> loss;  // loss[t] after t updates
    bool diverged = false;
    double lr_used = 0.0;
};

// One trajectory per (scheme, repetition), schemes outermost.
std::vector<Trajectory> simulate_training(const TrainConfig& cfg);

}  // namespace agc
