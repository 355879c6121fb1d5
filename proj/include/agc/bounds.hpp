#pragma once

#include "agc/decoder.hpp"
#include "agc/designs.hpp"
#include "agc/encoders.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace agc {

enum class BoundKind { Lemma1, BibdUpper, SrgUpper, CosetUpper, DiagDomUpper, Lower, BaselineBibd };

std::string_view to_string(BoundKind k) noexcept;

struct BoundReport {
    BoundKind kind = BoundKind::Lemma1;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> inputs;

    double input(std::string_view name) const;
};

// E[X^2] E[1/X^2] for X uniform on [1-eps, 1+eps] U [-1-eps, -1+eps],
// i.e. (1 + eps^2/3) / (1 - eps^2).
double compute_c(double epsilon);

// mk - m 1^T A_F K^{-1} A_F^T 1 with K = Delta_F + c(m-1) diag(Delta_F),
// Delta_F = A_F^T A_F.
BoundReport bound_lemma1(const AssignmentMatrix& a, const NonStragglerSet& set, int m, double c);

// Largest Lemma 1 value over `draws` uniformly random sets with s stragglers.
BoundReport bound_lemma1_max(const AssignmentMatrix& a, int m, double c, int s, int draws,
                             std::uint64_t seed);

BoundReport bound_bibd(const BibdParams& p, int m, int s);
BoundReport bound_srg(const SrgParams& p, int m, int s);
BoundReport bound_coset(const CosetParams& p, int s, double c);

// mk - sum_i sum_u (1^T A_i,F)_u^2 / Sigma~_uu with Sigma~ the diagonal
// dominance majorant of Sigma_F = B_F^T B_F. Throws Singular when Sigma_F is
// not invertible.
BoundReport bound_diag_dominant(const EncodingMatrix& e, const NonStragglerSet& set,
                                const Tolerance& tol = {});

// max over u in [m] of floor(k(s+m-u)/(n delta)) * u. The maximizing u is
// echoed as input "u".
BoundReport lower_bound(int n, int k, int delta, int m, int s);

// Complement of a straggler set covering the workers of the
// floor(k(s+m-u)/(n delta)) lowest-degree subsets. Ties go to lower indices,
// padding uses the lowest unused workers.
NonStragglerSet adversarial_straggler_set(const AssignmentMatrix& a, int m, int s, int u);

struct AdversarialOutcome {
    int u = 1;
    NonStragglerSet set;
    double err = 0.0;
};

// Decodes on the adversarial set for every u and keeps the worst.
AdversarialOutcome worst_adversarial(const EncodingMatrix& e, int s, const Tolerance& tol = {});

// Exact error of the baseline (stacked copies) scheme on a BIBD transpose:
// mk - delta^2 (n-s) / (delta + (n-s-1) lambda).
BoundReport baseline_bibd_error(const BibdParams& p, int m, int s);

}  // namespace agc
