#include "agc/training.hpp"

#include "agc/error.hpp"
#include "agc/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace agc {
namespace {

constexpr std::uint64_t kDataStream = 0x64617461ULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kIterStream = 0x69746572ULL;
constexpr std::uint64_t kWarmStream = 0x7761726dULL;
constexpr double kDivergence = 1e6;

// Row-wise softmax probabilities of X W for the first `rows` samples.
Matrix softmax_probs(const Dataset& data, const Matrix& w, std::size_t rows) {
    Matrix p(rows, w.cols());
    for (std::size_t r = 0; r < rows; ++r) {
        auto out = p.row(r);
        for (std::size_t c = 0; c < w.cols(); ++c) {
            double z = 0.0;
            for (std::size_t f = 0; f < w.rows(); ++f) z += data.x(r, f) * w(f, c);
            out[c] = z;
        }
        const double mx = *std::max_element(out.begin(), out.end());
        double sum = 0.0;
        for (auto& v : out) sum += (v = std::exp(v - mx));
        for (auto& v : out) v /= sum;
    }
    return p;
}

std::size_t used_rows(const Dataset& data, std::size_t k) {
    const std::size_t per = data.x.rows() / k;
    require(per >= 1, ErrorKind::InvalidArgument,
            "dataset has " + std::to_string(data.x.rows()) + " samples, fewer than k = " + std::to_string(k));
    return per * k;
}

}  // namespace

Dataset make_synthetic(const SyntheticSpec& spec) {
    require(spec.samples >= 1 && spec.dim >= 1 && spec.classes >= 2, ErrorKind::InvalidArgument,
            "synthetic dataset needs samples >= 1, dim >= 1, classes >= 2");
    Rng rng = make_rng(spec.seed, {kDataStream});
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> cls(0, spec.classes - 1);
    Matrix means(static_cast<std::size_t>(spec.classes), static_cast<std::size_t>(spec.dim));
    for (auto& v : means.data()) v = spec.separation * gauss(rng);
    Dataset d{Matrix(static_cast<std::size_t>(spec.samples), static_cast<std::size_t>(spec.dim) + 1), {}, spec.classes};
    for (int i = 0; i < spec.samples; ++i) {
        const int y = cls(rng);
        d.labels.push_back(y);
        for (int f = 0; f < spec.dim; ++f) d.x(i, f) = means(y, f) + gauss(rng);
        d.x(i, spec.dim) = 1.0;
    }
    return d;
}

Dataset load_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open dataset " + path);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            double v = 0.0;
            const char* first = b == std::string::npos ? cell.data() : cell.data() + b;
            const char* last = b == std::string::npos ? cell.data() : cell.data() + e + 1;
            auto [p, ec] = std::from_chars(first, last, v);
            require(ec == std::errc{} && p == last && std::isfinite(v), ErrorKind::InvalidArgument,
                    path + ":" + std::to_string(lineno) + ": non-numeric field '" + cell + "'");
            vals.push_back(v);
        }
        require(vals.size() >= 2, ErrorKind::InvalidArgument,
                path + ":" + std::to_string(lineno) + ": need at least one feature and a label");
        const double lab = vals.back();
        require(lab >= 0.0 && lab == std::floor(lab), ErrorKind::InvalidArgument,
                path + ":" + std::to_string(lineno) + ": label must be a nonnegative integer");
        labels.push_back(static_cast<int>(lab));
        vals.pop_back();
        require(rows.empty() || vals.size() == rows.front().size(), ErrorKind::InvalidArgument,
                path + ":" + std::to_string(lineno) + ": inconsistent column count");
        rows.push_back(std::move(vals));
    }
    require(!rows.empty(), ErrorKind::InvalidArgument, "dataset " + path + " is empty");
    const std::size_t dim = rows.front().size();
    Dataset d{Matrix(rows.size(), dim + 1), std::move(labels), 0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t f = 0; f < dim; ++f) d.x(i, f) = rows[i][f];
        d.x(i, dim) = 1.0;
    }
    d.classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
    require(d.classes >= 2, ErrorKind::InvalidArgument, "dataset needs at least two classes");
    return d;
}

double logistic_loss(const Dataset& data, const Matrix& w, std::size_t rows) {
    const Matrix p = softmax_probs(data, w, rows);
    double loss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) loss -= std::log(std::max(p(r, data.labels[r]), 1e-300));
    return loss / static_cast<double>(rows);
}

std::vector<std::vector<double>> subset_gradients(const Dataset& data, const Matrix& w, std::size_t k) {
    const std::size_t used = used_rows(data, k);
    const std::size_t per = used / k;
    const Matrix p = softmax_probs(data, w, used);
    const std::size_t feats = w.rows();
    const std::size_t classes = w.cols();
    std::vector<std::vector<double>> g(k, std::vector<double>(feats * classes, 0.0));
    const double scale = 1.0 / static_cast<double>(used);
    for (std::size_t r = 0; r < used; ++r) {
        auto& gi = g[r / per];
        for (std::size_t c = 0; c < classes; ++c) {
            const double resid = (p(r, c) - (data.labels[r] == static_cast<int>(c) ? 1.0 : 0.0)) * scale;
            for (std::size_t f = 0; f < feats; ++f) gi[c * feats + f] += data.x(r, f) * resid;
        }
    }
    return g;
}

std::vector<Trajectory> simulate_training(const TrainConfig& cfg) {
    require(cfg.iterations >= 0 && cfg.repetitions >= 1, ErrorKind::InvalidArgument,
            "iterations must be >= 0 and repetitions >= 1");
    require(cfg.learning_rate >= 0.0, ErrorKind::InvalidArgument, "learning rate must be >= 0");
    require(!cfg.schemes.empty(), ErrorKind::InvalidArgument, "no training schemes configured");
    require(cfg.q >= 0.0 && cfg.q < 1.0, ErrorKind::InvalidArgument, "q must lie in [0, 1)");
    const Dataset data = cfg.csv_path ? load_csv_dataset(*cfg.csv_path) : make_synthetic(cfg.synthetic);
    const auto a = build_assignment(cfg.assignment);
    const std::size_t k = a->k();
    const std::size_t n = a->n();
    const std::size_t used = used_rows(data, k);
    const std::size_t m = static_cast<std::size_t>(cfg.m);
    const std::size_t feats = data.x.cols();
    const auto classes = static_cast<std::size_t>(data.classes);

    std::vector<double> lr(cfg.schemes.size(), cfg.learning_rate);
    if (cfg.rescale_lr) {
        for (std::size_t sc = 0; sc < cfg.schemes.size(); ++sc) {
            if (cfg.schemes[sc].mode == TrainMode::Exact) continue;
            const auto est = estimate_unbiasedness(a, cfg.schemes[sc].spec, cfg.m, cfg.q, cfg.warmup_trials,
                                                   derive_seed(cfg.seed, {kWarmStream, sc}), {}, cfg.threads);
            require(!est.flagged, ErrorKind::Validation,
                    "warm-up estimate of beta for scheme " + cfg.schemes[sc].name + " is indistinguishable from 0");
            lr[sc] = cfg.learning_rate / est.beta_hat;
        }
    }

    const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);
    std::vector<Trajectory> out(cfg.schemes.size() * reps);
    parallel_for(
        out.size(),
        [&](std::size_t idx) {
            const std::size_t sc = idx / reps;
            const std::size_t rep = idx % reps;
            const auto& scheme = cfg.schemes[sc];
            auto& traj = out[idx];
            traj.scheme = scheme.name;
            traj.seed = derive_seed(cfg.seed, {rep});
            traj.lr_used = lr[sc];

            Matrix w(feats, classes);
            if (cfg.init_scale > 0.0) {
                Rng init = make_rng(traj.seed, {kInitStream});
                std::normal_distribution<double> gauss(0.0, cfg.init_scale);
                for (auto& v : w.data()) v = gauss(init);
            }
            // Schemes without per-iteration randomness keep one encoding.
            std::optional<EncodingMatrix> fixed;
            if (scheme.mode == TrainMode::Coded && scheme.spec.scheme != Scheme::RandomDiagonal)
                fixed = build_encoding(scheme.spec, a, cfg.m, traj.seed);

            traj.loss.push_back(logistic_loss(data, w, used));
            for (int it = 0; it < cfg.iterations; ++it) {
                const auto parts = subset_gradients(data, w, k);
                std::vector<double> grad;
                if (scheme.mode == TrainMode::Exact) {
                    grad.assign(parts.front().size(), 0.0);
                    for (const auto& g : parts)
                        for (std::size_t j = 0; j < g.size(); ++j) grad[j] += g[j];
                } else {
                    // Same straggler draws across schemes for a given repetition.
                    Rng rng = make_rng(traj.seed, {kIterStream, static_cast<std::uint64_t>(it)});
                    const auto set = sample_straggler_set(StragglerModel::bernoulli(cfg.q), n, rng);
                    const EncodingMatrix enc =
                        fixed ? *fixed
                              : build_encoding(scheme.spec, a, cfg.m,
                                               derive_seed(traj.seed, {kIterStream, static_cast<std::uint64_t>(it), 1}));
                    const auto z = split_gradients(parts, m);
                    const auto rec = reconstruct(z, enc, set);
                    grad = assemble_gradient(rec.approx, z.d);
                }
                for (std::size_t c = 0; c < classes; ++c)
                    for (std::size_t f = 0; f < feats; ++f) w(f, c) -= lr[sc] * grad[c * feats + f];
                const double loss = logistic_loss(data, w, used);
                if (!std::isfinite(loss) || loss > kDivergence) {
                    traj.diverged = true;
                    break;
                }
                traj.loss.push_back(loss);
            }
        },
        cfg.threads);
    return out;
}

}  // namespace agc
