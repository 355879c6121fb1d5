#pragma once

#include "agc/bounds.hpp"
#include "agc/decoder.hpp"
#include "agc/designs.hpp"
#include "agc/encoders.hpp"
#include "agc/rng.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace agc {

struct StragglerModel {
    enum class Kind { FixedCount, Bernoulli };
    Kind kind = Kind::FixedCount;
    int s = 0;
    double q = 0.0;

    static StragglerModel fixed(int s) { return {Kind::FixedCount, s, 0.0}; }
    static StragglerModel bernoulli(double q) { return {Kind::Bernoulli, 0, q}; }
};

NonStragglerSet sample_straggler_set(const StragglerModel& model, std::size_t n, Rng& rng);

// How an assignment matrix is obtained.
struct BibdSpec {
    DifferenceSet difference_set;
};
struct PaleySpec {
    int q = 0;
};
using AssignmentSpec = std::variant<BibdSpec, PaleySpec, CosetParams, BiRegularParams>;

std::shared_ptr<const AssignmentMatrix> build_assignment(const AssignmentSpec& spec);
std::string family_name(const AssignmentSpec& spec);

struct SchemeSpec {
    Scheme scheme = Scheme::RandomDiagonal;
    double epsilon = 0.0;
    V1Policy v1_policy = V1Policy::AllOnes;
    bool constrain_pm1 = false;
};

// Random-diagonal schemes draw D from `seed`; null-space schemes use it for
// v_1 and the null-space combinations; baseline ignores it.
EncodingMatrix build_encoding(const SchemeSpec& spec, std::shared_ptr<const AssignmentMatrix> a, int m,
                              std::uint64_t seed);

enum class XKind { Stragglers, Probability };

std::string_view to_string(XKind x) noexcept;

struct SweepConfig {
    AssignmentSpec assignment;
    SchemeSpec scheme;
    int m = 2;
    XKind x_kind = XKind::Stragglers;
    std::vector<double> grid;  // s values or q values
    int matrix_draws = 1;
    int set_draws = 1;
    // Enumerate every straggler set of size s instead of sampling.
    bool exhaustive = false;
    // Sets sampled for the Lemma 1 bound where the bound depends on F.
    int bound_draws = 200;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

struct SweepRow {
    std::string scheme;
    std::string family;
    int m = 0;
    double epsilon = 0.0;
    XKind x_kind = XKind::Stragglers;
    double x = 0.0;
    double mean_err = 0.0;
    double std_err = 0.0;  // standard error of the mean over all samples
    double min_err = 0.0;
    double max_err = 0.0;
    double upper_bound = 0.0;  // NaN when no bound applies
    double lower_bound = 0.0;  // NaN for probability grids
    std::uint64_t seed = 0;
    std::size_t samples = 0;
};

std::vector<SweepRow> sweep_error(const SweepConfig& cfg);

// Upper bound matching the family and scheme at s stragglers, or NaN.
// Lemma 1 maxima are taken over `bound_draws` sampled sets.
double scheme_upper_bound(const AssignmentMatrix& a, const SchemeSpec& scheme, int m, int s,
                          int bound_draws, std::uint64_t seed);

struct UnbiasednessEstimate {
    double beta_hat = 0.0;
    double rel_residual = 0.0;
    double beta_se = 0.0;
    std::size_t trials = 0;
    // beta_hat is within 10 standard errors of zero.
    bool flagged = false;
};

UnbiasednessEstimate estimate_unbiasedness(std::shared_ptr<const AssignmentMatrix> a, const SchemeSpec& scheme,
                                           int m, double q, int trials, std::uint64_t seed,
                                           const Tolerance& tol = {}, std::size_t threads = 0);

}  // namespace agc
