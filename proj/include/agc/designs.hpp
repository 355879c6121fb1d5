#pragma once

#include "agc/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace agc {

enum class Family { BibdTranspose, SrgAdjacency, CosetBipartite, BiRegular };

std::string_view to_string(Family f) noexcept;

struct BibdParams {
    int n = 0;  // points (workers)
    int k = 0;  // blocks (data subsets)
    int gamma = 0;
    int delta = 0;
    int lambda = 0;
};

struct SrgParams {
    int n = 0;
    int delta = 0;
    int lambda = 0;
    int mu = 0;
};

struct CosetParams {
    int k = 0;
    int m = 0;
    int delta = 0;
    std::vector<int> generating_set;
};

struct BiRegularParams {
    int n = 0;
    int k = 0;
    int delta = 0;
    int gamma = 0;
    std::uint64_t seed = 0;
};

using FamilyParams = std::variant<BibdParams, SrgParams, CosetParams, BiRegularParams>;

// Binary k x n matrix: A(i, j) = 1 iff worker j holds data subset i. Column
// sums are delta (computation load), row sums gamma (replication).
struct AssignmentMatrix {
    Matrix mat;
    int delta = 0;
    int gamma = 0;
    Family family = Family::BiRegular;
    FamilyParams params;

    std::size_t k() const noexcept { return mat.rows(); }
    std::size_t n() const noexcept { return mat.cols(); }
};

struct Cell {
    std::size_t row = 0;
    std::size_t col = 0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> messages;
    std::optional<Cell> first_violation;

    void flag(std::string msg);
    void flag_cell(std::size_t i, std::size_t j, std::string msg);
};

struct DifferenceSet {
    int v = 0;
    std::vector<int> set;
};

// Row i of the result is {(d + i) mod v : d in set}; the set must be a cyclic
// (v, |set|, lambda) difference set, which is checked by counting differences.
AssignmentMatrix bibd_transpose_from_difference_set(const DifferenceSet& ds);

// Checks M^T M = (delta - lambda) I + lambda J in integer arithmetic, the row
// and column sums, and delta > lambda.
ValidationReport validate_bibd(const AssignmentMatrix& a, const BibdParams& p);

// Paley graph on Z_q, q prime with q = 1 (mod 4).
AssignmentMatrix srg_paley(int q);

ValidationReport validate_srg(const AssignmentMatrix& a, const SrgParams& p);

// Bi-adjacency of the (k, m, delta) coset bipartite graph.
AssignmentMatrix coset_bipartite(const CosetParams& p);

// The k x k circulant block C of A = [C | ... | C].
Matrix coset_base_block(const CosetParams& p);

// True iff every eigenvalue of the base circulant is nonzero (relative to
// delta = lambda_0).
bool coset_is_invertible_base(const CosetParams& p, const Tolerance& tol = {});

// Configuration-model pairing with rejection of repeated edges.
AssignmentMatrix biregular_random(int n, int k, int delta, int gamma, std::uint64_t seed);

// Row sums equal gamma and column sums equal delta, entries in {0,1}.
ValidationReport validate_regular(const AssignmentMatrix& a);

// Runs the validator that matches a.family.
ValidationReport validate_assignment(const AssignmentMatrix& a);

bool is_prime(int q) noexcept;

// Residues mod q that are nonzero squares.
std::vector<int> quadratic_residues(int q);

// Difference-count check: every nonzero residue must occur the same number
// of times as d1 - d2. Returns lambda, or throws naming the offending residue.
int difference_set_lambda(const DifferenceSet& ds);

// Backtracking search for a cyclic (v, size, 1) planar difference set that
// contains 0 and 1. Returns nullopt if none exists.
std::optional<DifferenceSet> search_planar_difference_set(int v, int size);

// Built-in sets: {0,1,3} mod 7, {0,1,3,9} mod 13 and a Singer set mod 91.
std::optional<DifferenceSet> builtin_difference_set(int v);

}  // namespace agc
