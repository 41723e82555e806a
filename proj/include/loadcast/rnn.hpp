#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/matrix.hpp"
#include "loadcast/pipeline.hpp"

namespace loadcast {

enum class NetKind { ffnn, brnn };

const char* net_kind_name(NetKind k);
NetKind net_kind_from_name(const std::string& name); // throws TypeMismatch

struct NetworkArch {
    NetKind kind = NetKind::brnn;
    std::size_t hidden = 16;   // units per direction
    std::size_t lookback = 10; // sequence length, brnn only
    std::size_t input_dim = 0; // attributes per step (brnn) or per row (ffnn)

    void validate() const; // hidden >= 1, input_dim >= 1, lookback >= 1 for brnn
    std::size_t param_count() const;
};

// One flat parameter vector; block layout (documented here and mirrored by
// the BRNN1 file format):
//   brnn: fwd Wx (hidden x input_dim, row-major) | fwd Wh (hidden x hidden)
//         | fwd bias (hidden) | bwd Wx | bwd Wh | bwd bias
//         | readout weights (2*hidden: forward block then backward block)
//         | readout bias (1)
//   ffnn: W (hidden x input_dim) | bias (hidden) | readout weights (hidden)
//         | readout bias (1)
struct NeuralModel {
    NetworkArch arch;
    std::vector<double> params;
};

struct TrainHyper {
    std::size_t epochs = 50;
    std::size_t batch = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9; // first-moment decay
    double beta2 = 0.999;
    std::size_t patience = 5; // epochs without verification improvement
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainLog {
    std::vector<double> train_loss; // one entry per completed epoch
    std::vector<double> verif_loss;
    std::size_t stopped_epoch = 0; // 1-based index of the last epoch run
    std::size_t best_epoch = 0;    // 1-based argmin of verif_loss
};

struct GradientResult {
    double mse = 0.0;
    std::vector<double> grad; // same layout as NeuralModel::params
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] drawn sequentially
// in parameter-layout order from the seeded generator; biases zero.
NeuralModel init_network(const NetworkArch& arch, std::uint64_t seed);

// One bidirectional pass: h_t = tanh(Wx x_t + Wh h_{t-1} + b) per direction,
// prediction = readout over [last forward state ; final backward state].
// seq is a flat lookback x input_dim block. cache (optional) receives the
// per-step states for backpropagation. Throws ShapeMismatch.
struct ForwardCache {
    Matrix hf; // lookback x hidden, row t = forward state after step t
    Matrix hb; // lookback x hidden, row t = backward state after step t
};
double forward_sequence(const NeuralModel& model, std::span<const double> seq,
                        ForwardCache* cache = nullptr);

// Mean squared error and its gradient, averaged over the whole batch, by
// backpropagation through time. Throws EmptyBatch, ShapeMismatch.
GradientResult loss_and_gradients(const NeuralModel& model, const SequenceSet& batch);
// Feed-forward flavor on row features. Throws EmptyBatch, ShapeMismatch.
GradientResult loss_and_gradients(const NeuralModel& model, const SupervisedSet& batch);

// Mini-batch adaptive-moment training with verification-based early
// stopping: after each epoch both losses are logged; when verification loss
// has not improved for `patience` epochs training stops, and the returned
// model is the snapshot from the best verification epoch. Batch order is
// reshuffled every epoch from streams of hyper.seed. Throws EmptySet.
std::pair<NeuralModel, TrainLog> train_network(const NetworkArch& arch,
                                               const SequenceSet& trainset,
                                               const SequenceSet& verifset,
                                               const TrainHyper& hyper);
std::pair<NeuralModel, TrainLog> train_ffnn(const NetworkArch& arch,
                                            const SupervisedSet& trainset,
                                            const SupervisedSet& verifset,
                                            const TrainHyper& hyper);

// forward_sequence without cache retention; for ffnn models `seq` is a
// single feature row of input_dim values.
double predict_nn(const NeuralModel& model, std::span<const double> seq);

// Convenience baseline: carves the verification share off the tail of
// `train`, trains a feed-forward net, and predicts every row of `eval`.
// With fewer than two training rows verification falls back to the training
// rows themselves. Throws EmptySet.
std::vector<double> ffnn_train_predict(const SupervisedSet& train, const SupervisedSet& eval,
                                       const NetworkArch& arch, const TrainHyper& hyper,
                                       double verification_fraction = 0.5,
                                       TrainLog* log = nullptr);

// Versioned text records, magic "BRNN1": arch line, then the flat parameter
// vector in layout order, %.17g doubles.
void save_nn(const NeuralModel& model, const std::string& path);
NeuralModel load_nn(const std::string& path);

} // namespace loadcast
