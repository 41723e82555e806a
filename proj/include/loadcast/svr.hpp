#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadcast/kernels.hpp"
#include "loadcast/matrix.hpp"
#include "loadcast/pipeline.hpp"

namespace loadcast {

struct SvrHyperParams {
    double C = 1.0;
    double epsilon = 0.1;     // insensitive-tube half width, normalized units
    double tol = 1e-3;        // KKT stopping tolerance
    std::size_t max_iter = 100000;            // pair updates
    std::size_t cache_bytes = 64ull << 20;    // kernel row cache budget

    // Throws ToolkitError when C <= 0, epsilon < 0, tol <= 0, or max_iter == 0.
    void validate() const;
};

struct SvrTrainingMeta {
    std::size_t n = 0;           // training samples
    std::size_t iterations = 0;  // pair updates performed
    double final_kkt = 0.0;      // max per-sample violation at termination
    bool converged = false;      // stopped by tolerance rather than max_iter
    std::vector<std::size_t> sv_indices;  // training rows retained as support vectors
};

// Trained epsilon-SVR in the signed-coefficient form: each support vector
// carries beta = alpha - alpha*, and f(x) = sum_i beta_i k(sv_i, x) + bias.
struct SvrModel {
    Matrix support_vectors;     // one row per retained vector
    std::vector<double> beta;   // same length as support_vectors.rows, all nonzero
    double bias = 0.0;
    KernelSpec kernel;
    SvrHyperParams hyper;       // as trained; kkt_report needs C and epsilon
    std::size_t input_dim = 0;
    SvrTrainingMeta meta;
};

// Solves the epsilon-SVR dual
//   max  -1/2 b'Kb + y'b - epsilon*|b|_1   s.t.  sum(b)=0, |b_i| <= C
// by sequential minimal optimization: repeatedly pick the maximal violating
// pair (most ascent from raising one coefficient and lowering another) and
// solve that two-variable subproblem exactly, kinks and box included. Stops
// when the summed pair gain drops to tol or max_iter updates have run.
// Deterministic: ties break to the lowest index; `seed` is accepted for
// interface symmetry with the other models and not consumed.
// Throws DegenerateData (n < 2), NonFiniteValue, ToolkitError (bad hyper).
SvrModel train_svr(const SupervisedSet& data, const SvrHyperParams& hyper,
                   const KernelSpec& kernel, std::uint64_t seed);

// f(x) = sum_i beta_i k(sv_i, x) + bias. Throws DimensionMismatch when the
// model holds support vectors and x disagrees with their dimension.
double predict_svr(const SvrModel& model, std::span<const double> x);

struct KktReport {
    double max_violation = 0.0;
    std::vector<double> per_sample;  // one magnitude per training row
};

// Recomputes the optimality-condition violations of `model` on its training
// set (beta taken as zero for rows not retained as support vectors). A
// converged model reports max_violation <= tol.
KktReport kkt_report(const SvrModel& model, const SupervisedSet& data);

// Versioned text records with a "SVR1" magic line; doubles are written with
// %.17g so a round trip is value-exact. Throws IoError / FileNotFound /
// BadModelFile.
void save_svr(const SvrModel& model, const std::string& path);
SvrModel load_svr(const std::string& path);

} // namespace loadcast
