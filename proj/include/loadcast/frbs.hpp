#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/matrix.hpp"
#include "loadcast/pipeline.hpp"

namespace loadcast {

// Subtractive clustering: every data point is a candidate center scored by a
// density potential; centers are picked greedily while potentials are
// squashed around each accepted center.
struct SbcParams {
    double radius = 0.5;        // r_a, in normalized units
    double squash = 1.5;        // revision radius r_b = squash * r_a
    double accept_ratio = 0.5;  // accept while P > accept_ratio * P1
    double reject_ratio = 0.15; // stop once P < reject_ratio * P1

    // Throws ToolkitError on radius/squash <= 0, accept_ratio outside (0,1],
    // reject_ratio outside [0,1), or reject_ratio >= accept_ratio.
    void validate() const;
};

struct ClusterSet {
    Matrix centers;                       // c x D, every row is a data point
    std::vector<double> potentials;       // potential at selection time, strictly decreasing
    std::vector<std::size_t> indices;     // source row of each center
};

struct FcmParams {
    double m = 2.0;        // fuzzifier, > 1
    double tol = 1e-5;     // stop when the largest center movement drops below
    std::size_t max_iter = 100;

    void validate() const;
};

struct FcmResult {
    Matrix centers;                      // refined, same count as the input set
    Matrix memberships;                  // n x c, rows sum to 1
    std::vector<double> objective_trace; // one value per iteration, non-increasing
};

// One zero-order rule: Gaussian antecedent per input dimension, constant
// consequent.
struct FuzzyRule {
    std::vector<double> center;
    std::vector<double> width;
    double consequent = 0.0;
};

struct FuzzyRuleBase {
    std::vector<FuzzyRule> rules;
    std::size_t input_dim = 0;
};

// Potentials P_i = sum_j exp(-alpha |x_i-x_j|^2) with alpha = 4/r_a^2;
// revision subtracts P* exp(-beta |x_i-x*|^2) with beta = 4/(squash*r_a)^2.
// Acceptance per candidate with top potential P: accept above the accept
// ratio, stop below the reject ratio, and in the gray zone accept iff
// d_min/r_a + P/P1 >= 1, else zero that candidate and move on.
// Throws EmptyData.
ClusterSet subtractive_cluster(const Matrix& X, const SbcParams& p);

// Alternating membership/center updates at fixed cluster count. The
// objective sum u^m d^2 is recorded once per iteration (memberships against
// the centers they produced), which makes the trace non-increasing.
// Throws EmptyData, FewerPointsThanClusters.
FcmResult fcm_refine(const Matrix& X, const ClusterSet& init, const FcmParams& p);

// Clusters live in the joint (input, output) space: antecedent = input
// coordinates, consequent = output coordinate, width r_a/sqrt(8) everywhere.
// Throws DimensionMismatch (centers not input_dim+1 wide), EmptyData.
FuzzyRuleBase build_rulebase(const Matrix& centers, double r_a, std::size_t input_dim);

// Weighted-average inference: mu_r = prod_d exp(-(x_d-a_d)^2 / (2 w_d^2)),
// output = sum mu q / sum mu; if every firing strength underflows (below
// 1e-300) the nearest rule's consequent is returned. Throws DimensionMismatch.
double predict_frbs(const FuzzyRuleBase& rb, std::span<const double> x);

// Full pipeline used by the benchmark: cluster the joint space with SBC,
// refine with FCM, read off the rules.
FuzzyRuleBase train_frbs(const SupervisedSet& data, const SbcParams& sbc, const FcmParams& fcm);

// Versioned text records with a "FRB1" magic line, %.17g doubles.
void save_frbs(const FuzzyRuleBase& rb, const std::string& path);
FuzzyRuleBase load_frbs(const std::string& path);

} // namespace loadcast
