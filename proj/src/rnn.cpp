#include "loadcast/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "loadcast/rng.hpp"

namespace loadcast {

const char* net_kind_name(NetKind k) { return k == NetKind::ffnn ? "ffnn" : "brnn"; }

NetKind net_kind_from_name(const std::string& name) {
    if (name == "ffnn") return NetKind::ffnn;
    if (name == "brnn") return NetKind::brnn;
    throw TypeMismatch("network", "unknown kind '" + name + "'");
}

void NetworkArch::validate() const {
    if (hidden == 0) throw ToolkitError("network needs at least one hidden unit");
    if (input_dim == 0) throw ToolkitError("network needs at least one input attribute");
    if (kind == NetKind::brnn && lookback == 0)
        throw ToolkitError("recurrent network needs lookback of at least 1");
}

std::size_t NetworkArch::param_count() const {
    const std::size_t cell = hidden * input_dim + hidden * hidden + hidden;
    if (kind == NetKind::brnn) return 2 * cell + 2 * hidden + 1;
    return hidden * input_dim + hidden + hidden + 1;
}

void TrainHyper::validate() const {
    if (epochs == 0) throw ToolkitError("training needs at least one epoch");
    if (batch == 0) throw ToolkitError("batch size must be at least 1");
    if (!(learning_rate > 0.0)) throw ToolkitError("learning rate must be positive");
    if (!(beta1 > 0.0) || !(beta1 < 1.0) || !(beta2 > 0.0) || !(beta2 < 1.0))
        throw ToolkitError("moment decay rates must lie in (0, 1)");
    if (patience == 0) throw ToolkitError("patience must be at least 1");
}

namespace {

// Offsets into the flat parameter vector; see the layout comment in rnn.hpp.
struct Blocks {
    std::size_t h, in;
    bool brnn;

    std::size_t cell() const { return h * in + h * h + h; }
    std::size_t wx(std::size_t dir) const { return dir * cell(); }
    std::size_t wh(std::size_t dir) const { return dir * cell() + h * in; }
    std::size_t cb(std::size_t dir) const { return dir * cell() + h * in + h * h; }
    std::size_t ro_w() const { return brnn ? 2 * cell() : h * in + h; }
    std::size_t ro_b() const { return ro_w() + (brnn ? 2 * h : h); }
};

Blocks blocks_of(const NetworkArch& a) {
    return Blocks{a.hidden, a.input_dim, a.kind == NetKind::brnn};
}

// One direction of the recurrent pass. `order` maps pass step s to the time
// index consumed at that step; states land in cache row order[s].
void run_direction(const NetworkArch& arch, const double* p, const Blocks& bk, std::size_t dir,
                   std::span<const double> seq, Matrix& states, bool backward) {
    const std::size_t H = arch.hidden;
    const std::size_t D = arch.input_dim;
    const std::size_t L = arch.lookback;
    const double* wx = p + bk.wx(dir);
    const double* wh = p + bk.wh(dir);
    const double* cb = p + bk.cb(dir);
    std::vector<double> prev(H, 0.0);
    for (std::size_t s = 0; s < L; ++s) {
        const std::size_t t = backward ? L - 1 - s : s;
        const double* x = seq.data() + t * D;
        auto out = states.row(t);
        for (std::size_t i = 0; i < H; ++i) {
            double a = cb[i];
            const double* wxi = wx + i * D;
            for (std::size_t d = 0; d < D; ++d) a += wxi[d] * x[d];
            const double* whi = wh + i * H;
            for (std::size_t j = 0; j < H; ++j) a += whi[j] * prev[j];
            out[i] = std::tanh(a);
        }
        std::copy(out.begin(), out.end(), prev.begin());
    }
}

double forward_brnn(const NeuralModel& m, std::span<const double> seq, ForwardCache& c) {
    const NetworkArch& a = m.arch;
    const Blocks bk = blocks_of(a);
    if (c.hf.rows != a.lookback || c.hf.cols != a.hidden) {
        c.hf = Matrix(a.lookback, a.hidden);
        c.hb = Matrix(a.lookback, a.hidden);
    }
    run_direction(a, m.params.data(), bk, 0, seq, c.hf, false);
    run_direction(a, m.params.data(), bk, 1, seq, c.hb, true);

    const double* w = m.params.data() + bk.ro_w();
    double out = m.params[bk.ro_b()];
    auto hf_last = c.hf.row(a.lookback - 1);
    auto hb_last = c.hb.row(0); // the backward pass finishes at time index 0
    for (std::size_t i = 0; i < a.hidden; ++i) out += w[i] * hf_last[i];
    for (std::size_t i = 0; i < a.hidden; ++i) out += w[a.hidden + i] * hb_last[i];
    return out;
}

double forward_ffnn(const NeuralModel& m, std::span<const double> x, std::vector<double>& h) {
    const NetworkArch& a = m.arch;
    const Blocks bk = blocks_of(a);
    const double* w0 = m.params.data();
    const double* b0 = m.params.data() + bk.h * bk.in;
    const double* w = m.params.data() + bk.ro_w();
    h.resize(a.hidden);
    double out = m.params[bk.ro_b()];
    for (std::size_t i = 0; i < a.hidden; ++i) {
        double acc = b0[i];
        const double* wi = w0 + i * a.input_dim;
        for (std::size_t d = 0; d < a.input_dim; ++d) acc += wi[d] * x[d];
        h[i] = std::tanh(acc);
        out += w[i] * h[i];
    }
    return out;
}

// Backpropagation through one direction. dh_final is the readout gradient
// reaching that direction's last state; gradients accumulate into g.
void backprop_direction(const NetworkArch& arch, const double* p, double* g, const Blocks& bk,
                        std::size_t dir, std::span<const double> seq, const Matrix& states,
                        bool backward, std::vector<double>& dh, std::vector<double>& da) {
    const std::size_t H = arch.hidden;
    const std::size_t D = arch.input_dim;
    const std::size_t L = arch.lookback;
    const double* wh = p + bk.wh(dir);
    double* gwx = g + bk.wx(dir);
    double* gwh = g + bk.wh(dir);
    double* gcb = g + bk.cb(dir);

    for (std::size_t s = L; s-- > 0;) {
        // walk the pass in reverse: last consumed time index first
        const std::size_t t = backward ? L - 1 - s : s;
        auto ht = states.row(t);
        for (std::size_t i = 0; i < H; ++i) da[i] = dh[i] * (1.0 - ht[i] * ht[i]);

        const double* x = seq.data() + t * D;
        const bool has_prev = s > 0;
        const std::size_t tprev = backward ? t + 1 : t - 1;
        for (std::size_t i = 0; i < H; ++i) {
            gcb[i] += da[i];
            double* gxi = gwx + i * D;
            for (std::size_t d = 0; d < D; ++d) gxi[d] += da[i] * x[d];
            if (has_prev) {
                auto hp = states.row(tprev);
                double* ghi = gwh + i * H;
                for (std::size_t j = 0; j < H; ++j) ghi[j] += da[i] * hp[j];
            }
        }
        if (!has_prev) break;
        for (std::size_t j = 0; j < H; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < H; ++i) acc += da[i] * wh[i * H + j];
            dh[j] = acc;
        }
    }
}

// Scratch buffers reused across samples of a batch.
struct BrnnWork {
    ForwardCache cache;
    std::vector<double> dh, da;
};

// Adds one sample's contribution (already scaled by dloss) to the gradient.
void accumulate_brnn(const NeuralModel& m, std::span<const double> seq, double dloss,
                     BrnnWork& w, double* g) {
    const NetworkArch& a = m.arch;
    const Blocks bk = blocks_of(a);
    const std::size_t H = a.hidden;
    const double* ro = m.params.data() + bk.ro_w();
    double* gro = g + bk.ro_w();

    auto hf_last = w.cache.hf.row(a.lookback - 1);
    auto hb_last = w.cache.hb.row(0);
    for (std::size_t i = 0; i < H; ++i) gro[i] += dloss * hf_last[i];
    for (std::size_t i = 0; i < H; ++i) gro[H + i] += dloss * hb_last[i];
    g[bk.ro_b()] += dloss;

    w.dh.assign(H, 0.0);
    w.da.assign(H, 0.0);
    for (std::size_t i = 0; i < H; ++i) w.dh[i] = dloss * ro[i];
    backprop_direction(a, m.params.data(), g, bk, 0, seq, w.cache.hf, false, w.dh, w.da);
    for (std::size_t i = 0; i < H; ++i) w.dh[i] = dloss * ro[H + i];
    backprop_direction(a, m.params.data(), g, bk, 1, seq, w.cache.hb, true, w.dh, w.da);
}

void check_brnn_batch(const NeuralModel& m, const SequenceSet& batch) {
    if (m.arch.kind != NetKind::brnn)
        throw ShapeMismatch("sequence batches require a recurrent architecture");
    if (m.params.size() != m.arch.param_count())
        throw ShapeMismatch("parameter vector does not match the architecture");
    if (batch.y.size() != batch.samples)
        throw LengthMismatch("sequence targets out of step with samples");
    if (batch.lookback != m.arch.lookback || batch.attributes != m.arch.input_dim)
        throw ShapeMismatch("sequence block is " + std::to_string(batch.lookback) + "x" +
                            std::to_string(batch.attributes) + " but the network expects " +
                            std::to_string(m.arch.lookback) + "x" +
                            std::to_string(m.arch.input_dim));
}

GradientResult brnn_loss_grad(const NeuralModel& m, const SequenceSet& set,
                              std::span<const std::size_t> idx, BrnnWork& work) {
    GradientResult r;
    r.grad.assign(m.params.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (std::size_t s : idx) {
        const double pred = forward_brnn(m, set.sample(s), work.cache);
        const double residual = pred - set.y[s];
        r.mse += residual * residual * inv;
        accumulate_brnn(m, set.sample(s), 2.0 * residual * inv, work, r.grad.data());
    }
    return r;
}

void check_ffnn_batch(const NeuralModel& m, const SupervisedSet& batch) {
    if (m.arch.kind != NetKind::ffnn)
        throw ShapeMismatch("row batches require the feed-forward architecture");
    if (m.params.size() != m.arch.param_count())
        throw ShapeMismatch("parameter vector does not match the architecture");
    if (batch.y.size() != batch.X.rows)
        throw LengthMismatch("row targets out of step with samples");
    if (batch.X.cols != m.arch.input_dim)
        throw ShapeMismatch("rows have " + std::to_string(batch.X.cols) +
                            " attributes but the network expects " +
                            std::to_string(m.arch.input_dim));
}

GradientResult ffnn_loss_grad(const NeuralModel& m, const SupervisedSet& set,
                              std::span<const std::size_t> idx, std::vector<double>& h) {
    const NetworkArch& a = m.arch;
    const Blocks bk = blocks_of(a);
    GradientResult r;
    r.grad.assign(m.params.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(idx.size());
    const double* w = m.params.data() + bk.ro_w();
    for (std::size_t s : idx) {
        auto x = set.X.row(s);
        const double pred = forward_ffnn(m, x, h);
        const double residual = pred - set.y[s];
        r.mse += residual * residual * inv;
        const double dloss = 2.0 * residual * inv;

        double* gw0 = r.grad.data();
        double* gb0 = r.grad.data() + bk.h * bk.in;
        double* gw = r.grad.data() + bk.ro_w();
        for (std::size_t i = 0; i < a.hidden; ++i) {
            gw[i] += dloss * h[i];
            const double da = dloss * w[i] * (1.0 - h[i] * h[i]);
            gb0[i] += da;
            double* gi = gw0 + i * a.input_dim;
            for (std::size_t d = 0; d < a.input_dim; ++d) gi[d] += da * x[d];
        }
        r.grad[bk.ro_b()] += dloss;
    }
    return r;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

// Everything train_network / train_ffnn share: Adam, shuffling, early
// stopping. `batch_grad` evaluates one index subset, `full_loss` one whole
// set (0 = train, 1 = verification).
template <typename BatchGrad, typename FullLoss>
std::pair<NeuralModel, TrainLog> optimize(NeuralModel model, std::size_t train_n,
                                          const TrainHyper& hp, BatchGrad&& batch_grad,
                                          FullLoss&& full_loss) {
    hp.validate();
    TrainLog log;
    const std::size_t np = model.params.size();
    std::vector<double> m1(np, 0.0), m2(np, 0.0);
    double b1t = 1.0, b2t = 1.0; // running beta powers for bias correction
    const Rng root(hp.seed);

    std::vector<std::size_t> order = all_indices(train_n);
    NeuralModel best = model;
    double best_verif = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
        Rng shuffle = root.stream(epoch);
        for (std::size_t i = train_n; i > 1; --i)
            std::swap(order[i - 1], order[shuffle.next_below(i)]);

        for (std::size_t start = 0; start < train_n; start += hp.batch) {
            const std::size_t len = std::min(hp.batch, train_n - start);
            GradientResult g = batch_grad(model, std::span<const std::size_t>(
                                                     order.data() + start, len));
            b1t *= hp.beta1;
            b2t *= hp.beta2;
            for (std::size_t k = 0; k < np; ++k) {
                m1[k] = hp.beta1 * m1[k] + (1.0 - hp.beta1) * g.grad[k];
                m2[k] = hp.beta2 * m2[k] + (1.0 - hp.beta2) * g.grad[k] * g.grad[k];
                const double mhat = m1[k] / (1.0 - b1t);
                const double vhat = m2[k] / (1.0 - b2t);
                model.params[k] -= hp.learning_rate * mhat / (std::sqrt(vhat) + 1e-8);
            }
        }

        log.train_loss.push_back(full_loss(model, 0));
        log.verif_loss.push_back(full_loss(model, 1));
        log.stopped_epoch = epoch;

        if (log.verif_loss.back() < best_verif) {
            best_verif = log.verif_loss.back();
            best = model;
            log.best_epoch = epoch;
            stale = 0;
        } else if (++stale >= hp.patience) {
            break;
        }
    }
    return {std::move(best), std::move(log)};
}

} // namespace

NeuralModel init_network(const NetworkArch& arch, std::uint64_t seed) {
    arch.validate();
    NeuralModel m;
    m.arch = arch;
    m.params.assign(arch.param_count(), 0.0);
    const Blocks bk = blocks_of(arch);
    Rng rng(seed);
    auto fill = [&](std::size_t off, std::size_t count, std::size_t fan_in) {
        const double lim = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t k = 0; k < count; ++k) m.params[off + k] = rng.uniform(-lim, lim);
    };
    const std::size_t H = arch.hidden, D = arch.input_dim;
    if (arch.kind == NetKind::brnn) {
        for (std::size_t dir = 0; dir < 2; ++dir) {
            fill(bk.wx(dir), H * D, D);
            fill(bk.wh(dir), H * H, H);
            // cell biases stay zero
        }
        fill(bk.ro_w(), 2 * H, 2 * H);
    } else {
        fill(0, H * D, D);
        fill(bk.ro_w(), H, H);
    }
    return m;
}

double forward_sequence(const NeuralModel& model, std::span<const double> seq,
                        ForwardCache* cache) {
    model.arch.validate();
    if (model.params.size() != model.arch.param_count())
        throw ShapeMismatch("parameter vector does not match the architecture");
    if (model.arch.kind == NetKind::brnn) {
        if (seq.size() != model.arch.lookback * model.arch.input_dim)
            throw ShapeMismatch("sequence block has " + std::to_string(seq.size()) +
                                " values, expected " +
                                std::to_string(model.arch.lookback * model.arch.input_dim));
        ForwardCache local;
        ForwardCache& c = cache ? *cache : local;
        return forward_brnn(model, seq, c);
    }
    if (seq.size() != model.arch.input_dim)
        throw ShapeMismatch("feature row has " + std::to_string(seq.size()) +
                            " values, expected " + std::to_string(model.arch.input_dim));
    std::vector<double> h;
    return forward_ffnn(model, seq, h);
}

GradientResult loss_and_gradients(const NeuralModel& model, const SequenceSet& batch) {
    if (batch.samples == 0) throw EmptyBatch{};
    check_brnn_batch(model, batch);
    BrnnWork work;
    const auto idx = all_indices(batch.samples);
    return brnn_loss_grad(model, batch, idx, work);
}

GradientResult loss_and_gradients(const NeuralModel& model, const SupervisedSet& batch) {
    if (batch.X.rows == 0) throw EmptyBatch{};
    check_ffnn_batch(model, batch);
    std::vector<double> h;
    const auto idx = all_indices(batch.X.rows);
    return ffnn_loss_grad(model, batch, idx, h);
}

std::pair<NeuralModel, TrainLog> train_network(const NetworkArch& arch,
                                               const SequenceSet& trainset,
                                               const SequenceSet& verifset,
                                               const TrainHyper& hyper) {
    if (trainset.samples == 0 || verifset.samples == 0)
        throw EmptySet("training and verification sets must both be non-empty");
    NeuralModel model = init_network(arch, hyper.seed);
    check_brnn_batch(model, trainset);
    check_brnn_batch(model, verifset);

    BrnnWork work;
    auto batch_grad = [&](const NeuralModel& m, std::span<const std::size_t> idx) {
        return brnn_loss_grad(m, trainset, idx, work);
    };
    auto full_loss = [&](const NeuralModel& m, int which) {
        const SequenceSet& s = which == 0 ? trainset : verifset;
        double mse = 0.0;
        const double inv = 1.0 / static_cast<double>(s.samples);
        for (std::size_t k = 0; k < s.samples; ++k) {
            const double r = forward_brnn(m, s.sample(k), work.cache) - s.y[k];
            mse += r * r * inv;
        }
        return mse;
    };
    return optimize(std::move(model), trainset.samples, hyper, batch_grad, full_loss);
}

std::pair<NeuralModel, TrainLog> train_ffnn(const NetworkArch& arch,
                                            const SupervisedSet& trainset,
                                            const SupervisedSet& verifset,
                                            const TrainHyper& hyper) {
    if (trainset.X.rows == 0 || verifset.X.rows == 0)
        throw EmptySet("training and verification sets must both be non-empty");
    NetworkArch a = arch;
    a.kind = NetKind::ffnn;
    NeuralModel model = init_network(a, hyper.seed);
    check_ffnn_batch(model, trainset);
    check_ffnn_batch(model, verifset);

    std::vector<double> h;
    auto batch_grad = [&](const NeuralModel& m, std::span<const std::size_t> idx) {
        return ffnn_loss_grad(m, trainset, idx, h);
    };
    auto full_loss = [&](const NeuralModel& m, int which) {
        const SupervisedSet& s = which == 0 ? trainset : verifset;
        double mse = 0.0;
        const double inv = 1.0 / static_cast<double>(s.X.rows);
        for (std::size_t k = 0; k < s.X.rows; ++k) {
            const double r = forward_ffnn(m, s.X.row(k), h) - s.y[k];
            mse += r * r * inv;
        }
        return mse;
    };
    return optimize(std::move(model), trainset.X.rows, hyper, batch_grad, full_loss);
}

double predict_nn(const NeuralModel& model, std::span<const double> seq) {
    return forward_sequence(model, seq, nullptr);
}

std::vector<double> ffnn_train_predict(const SupervisedSet& train, const SupervisedSet& eval,
                                       const NetworkArch& arch, const TrainHyper& hyper,
                                       double verification_fraction, TrainLog* log) {
    const std::size_t n = train.X.rows;
    if (n == 0) throw EmptySet("cannot train on an empty set");

    SupervisedSet fit = train, verif = train;
    if (n >= 2) {
        std::size_t n_verif = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * verification_fraction + 0.5));
        n_verif = std::clamp<std::size_t>(n_verif, 1, n - 1);
        const std::size_t n_fit = n - n_verif;
        fit.X = Matrix(n_fit, train.X.cols);
        fit.y.assign(train.y.begin(), train.y.begin() + static_cast<std::ptrdiff_t>(n_fit));
        std::copy(train.X.data.begin(),
                  train.X.data.begin() + static_cast<std::ptrdiff_t>(n_fit * train.X.cols),
                  fit.X.data.begin());
        verif.X = Matrix(n_verif, train.X.cols);
        verif.y.assign(train.y.begin() + static_cast<std::ptrdiff_t>(n_fit), train.y.end());
        std::copy(train.X.data.begin() + static_cast<std::ptrdiff_t>(n_fit * train.X.cols),
                  train.X.data.end(), verif.X.data.begin());
    }

    auto [model, tl] = train_ffnn(arch, fit, verif, hyper);
    if (log) *log = tl;
    std::vector<double> out(eval.X.rows);
    std::vector<double> h;
    for (std::size_t k = 0; k < eval.X.rows; ++k) out[k] = forward_ffnn(model, eval.X.row(k), h);
    return out;
}

// ---- serialization ----

void save_nn(const NeuralModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[64];
    out << "BRNN1\n";
    out << "arch " << net_kind_name(model.arch.kind) << ' ' << model.arch.hidden << ' '
        << model.arch.lookback << ' ' << model.arch.input_dim << '\n';
    out << "params " << model.params.size() << '\n';
    for (std::size_t k = 0; k < model.params.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", model.params[k]);
        out << buf << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

NeuralModel load_nn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    std::string magic;
    if (!std::getline(in, magic) || magic != "BRNN1")
        throw BadModelFile("expected BRNN1 header in " + path);

    NeuralModel m;
    std::string tag, kind;
    std::size_t count = 0;
    if (!(in >> tag >> kind >> m.arch.hidden >> m.arch.lookback >> m.arch.input_dim) ||
        tag != "arch")
        throw BadModelFile("bad arch record in " + path);
    try {
        m.arch.kind = net_kind_from_name(kind);
        m.arch.validate();
    } catch (const ToolkitError& e) {
        throw BadModelFile("bad arch record in " + path + ": " + e.what());
    }
    if (!(in >> tag >> count) || tag != "params" || count != m.arch.param_count())
        throw BadModelFile("bad params record in " + path);
    m.params.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        if (!(in >> m.params[k]))
            throw BadModelFile("truncated parameter block in " + path);
    return m;
}

} // namespace loadcast
