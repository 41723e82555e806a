#include "loadcast/svr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>
#include <unordered_map>

namespace loadcast {

void SvrHyperParams::validate() const {
    if (!(C > 0.0)) throw ToolkitError("svr C must be positive");
    if (!(epsilon >= 0.0)) throw ToolkitError("svr epsilon must be nonnegative");
    if (!(tol > 0.0)) throw ToolkitError("svr tol must be positive");
    if (max_iter == 0) throw ToolkitError("svr max_iter must be >= 1");
}

namespace {

// LRU cache of full kernel rows. A row is all k(x_i, x_j) for fixed i; the
// SMO inner loop touches two rows per update and revisits a small working
// set, so even a modest budget removes nearly all kernel recomputation.
class KernelCache {
public:
    KernelCache(const Matrix& X, const KernelSpec& spec, std::size_t budget_bytes)
        : X_(X), spec_(spec) {
        const std::size_t row_bytes = X_.rows * sizeof(double);
        cap_rows_ = std::max<std::size_t>(2, row_bytes ? budget_bytes / row_bytes : 2);
        cap_rows_ = std::min(cap_rows_, X_.rows);
        slots_.reserve(cap_rows_);
    }

    std::span<const double> row(std::size_t i) {
        auto hit = where_.find(i);
        if (hit != where_.end()) {
            lru_.splice(lru_.begin(), lru_, hit->second);
            return slots_[hit->second->second];
        }
        std::size_t slot;
        if (slots_.size() < cap_rows_) {
            slot = slots_.size();
            slots_.emplace_back(X_.rows);
        } else {
            const auto& victim = lru_.back();
            slot = victim.second;
            where_.erase(victim.first);
            lru_.pop_back();
        }
        auto dst = slots_[slot].data();
        const auto xi = X_.row(i);
        for (std::size_t k = 0; k < X_.rows; ++k) dst[k] = kernel_eval(spec_, xi, X_.row(k));
        lru_.emplace_front(i, slot);
        where_[i] = lru_.begin();
        return slots_[slot];
    }

private:
    const Matrix& X_;
    KernelSpec spec_;
    std::size_t cap_rows_;
    std::vector<std::vector<double>> slots_;
    std::list<std::pair<std::size_t, std::size_t>> lru_;  // (sample, slot), front = hottest
    std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::size_t>>::iterator>
        where_;
};

// Ascent rate from raising beta_i; the |beta| kink makes the rate depend on
// the current sign. F_i is the biasless model output (K beta)_i.
inline double up_gain(double y, double F, double beta, double eps) {
    return beta >= 0.0 ? y - F - eps : y - F + eps;
}

// Ascent rate from lowering beta_i.
inline double down_gain(double y, double F, double beta, double eps) {
    return beta > 0.0 ? F - y + eps : F - y - eps;
}

struct PairPick {
    std::size_t i = 0, j = 0;
    double u = 0.0, d = 0.0;  // best up / down gains
};

PairPick pick_pair(const std::vector<double>& y, const std::vector<double>& F,
                   const std::vector<double>& beta, double C, double eps) {
    PairPick p;
    p.u = -std::numeric_limits<double>::infinity();
    p.d = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < beta.size(); ++k) {
        if (beta[k] < C) {
            const double g = up_gain(y[k], F[k], beta[k], eps);
            if (g > p.u) {
                p.u = g;
                p.i = k;
            }
        }
        if (beta[k] > -C) {
            const double g = down_gain(y[k], F[k], beta[k], eps);
            if (g > p.d) {
                p.d = g;
                p.j = k;
            }
        }
    }
    return p;
}

// Exact maximizer of the two-variable subproblem along beta_i += t,
// beta_j -= t for t in [0, t_max]. The objective restricted to this line is
// concave and piecewise quadratic with kinks where either coefficient
// crosses zero; walk the segments until the slope changes sign.
double solve_pair(double beta_i, double beta_j, double G, double eta, double eps, double t_max) {
    double bps[4] = {0.0, t_max, t_max, t_max};
    std::size_t nb = 2;
    if (beta_i < 0.0 && -beta_i < t_max) bps[nb++] = -beta_i;
    if (beta_j > 0.0 && beta_j < t_max) bps[nb++] = beta_j;
    std::sort(bps, bps + nb);

    for (std::size_t s = 0; s + 1 < nb; ++s) {
        const double l = bps[s], r = bps[s + 1];
        if (!(r > l)) continue;
        const double m = 0.5 * (l + r);
        const double s_i = (beta_i + m >= 0.0) ? 1.0 : -1.0;
        const double s_j = (beta_j - m >= 0.0) ? 1.0 : -1.0;
        const double c = G - eps * s_i + eps * s_j;  // slope extrapolated to t=0
        if (c - eta * l <= 0.0) return l;            // concave: peak at segment start
        if (c - eta * r >= 0.0) continue;            // still climbing at segment end
        return std::clamp(c / eta, l, r);            // interior stationary point
    }
    return t_max;
}

double max_violation_given_bias(const std::vector<double>& y, const std::vector<double>& F,
                                const std::vector<double>& beta, double C, double eps, double b,
                                std::vector<double>* per_sample) {
    double worst = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) {
        double v = 0.0;
        if (beta[k] < C) v = std::max(v, up_gain(y[k], F[k], beta[k], eps) - b);
        if (beta[k] > -C) v = std::max(v, down_gain(y[k], F[k], beta[k], eps) + b);
        if (per_sample) (*per_sample)[k] = v;
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace

SvrModel train_svr(const SupervisedSet& data, const SvrHyperParams& hyper,
                   const KernelSpec& kernel, std::uint64_t /*seed: optimizer is deterministic*/) {
    hyper.validate();
    kernel.validate();
    const std::size_t n = data.X.rows;
    if (n < 2) throw DegenerateData("svr needs at least 2 samples, got " + std::to_string(n));
    if (data.y.size() != n)
        throw DimensionMismatch("svr target length " + std::to_string(data.y.size()) +
                                " vs " + std::to_string(n) + " rows");
    for (double v : data.X.data)
        if (!std::isfinite(v)) throw NonFiniteValue("svr input contains a non-finite value");
    for (double v : data.y)
        if (!std::isfinite(v)) throw NonFiniteValue("svr target contains a non-finite value");

    const double C = hyper.C, eps = hyper.epsilon;
    std::vector<double> beta(n, 0.0);
    std::vector<double> F(n, 0.0);  // (K beta)_i, maintained incrementally
    std::vector<double> diag(n);
    for (std::size_t k = 0; k < n; ++k) diag[k] = kernel_eval(kernel, data.X.row(k), data.X.row(k));

    KernelCache cache(data.X, kernel, hyper.cache_bytes);

    std::size_t iter = 0;
    PairPick p;
    bool converged = false;
    while (true) {
        p = pick_pair(data.y, F, beta, C, eps);
        if (p.u + p.d <= hyper.tol) {
            converged = true;
            break;
        }
        if (iter >= hyper.max_iter) break;

        const auto Ki = cache.row(p.i);
        const auto Kj = cache.row(p.j);
        const double eta = std::max(diag[p.i] + diag[p.j] - 2.0 * Ki[p.j], 1e-12);
        const double t_max = std::min(C - beta[p.i], beta[p.j] + C);
        const double G = (data.y[p.i] - F[p.i]) - (data.y[p.j] - F[p.j]);
        const double t = solve_pair(beta[p.i], beta[p.j], G, eta, eps, t_max);
        if (t <= 0.0) break;  // numerically stuck; gains said ascent exists but the line is flat

        beta[p.i] = std::clamp(beta[p.i] + t, -C, C);
        beta[p.j] = std::clamp(beta[p.j] - t, -C, C);
        for (std::size_t k = 0; k < n; ++k) F[k] += t * (Ki[k] - Kj[k]);
        ++iter;

#ifndef NDEBUG
        double sum = 0.0;
        for (double b : beta) {
            assert(std::fabs(b) <= C);
            sum += b;
        }
        assert(std::fabs(sum) <= 1e-9);
#endif
    }

    const double bias = 0.5 * (p.u - p.d);  // midpoint of the feasible bias interval

    SvrModel model;
    model.kernel = kernel;
    model.hyper = hyper;
    model.bias = bias;
    model.input_dim = data.X.cols;
    model.meta.n = n;
    model.meta.iterations = iter;
    model.meta.converged = converged;
    model.meta.final_kkt = max_violation_given_bias(data.y, F, beta, C, eps, bias, nullptr);

    for (std::size_t k = 0; k < n; ++k)
        if (beta[k] != 0.0) model.meta.sv_indices.push_back(k);
    model.support_vectors = Matrix(model.meta.sv_indices.size(), data.X.cols);
    model.beta.resize(model.meta.sv_indices.size());
    for (std::size_t s = 0; s < model.meta.sv_indices.size(); ++s) {
        const std::size_t k = model.meta.sv_indices[s];
        model.beta[s] = beta[k];
        const auto src = data.X.row(k);
        std::copy(src.begin(), src.end(), model.support_vectors.row(s).begin());
    }
    return model;
}

double predict_svr(const SvrModel& model, std::span<const double> x) {
    if (model.support_vectors.rows > 0 && x.size() != model.support_vectors.cols)
        throw DimensionMismatch("svr input dimension " + std::to_string(x.size()) +
                                " vs model " + std::to_string(model.support_vectors.cols));
    double f = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.rows; ++s)
        f += model.beta[s] * kernel_eval(model.kernel, model.support_vectors.row(s), x);
    return f;
}

KktReport kkt_report(const SvrModel& model, const SupervisedSet& data) {
    const std::size_t n = data.X.rows;
    std::vector<double> beta(n, 0.0);
    for (std::size_t s = 0; s < model.meta.sv_indices.size(); ++s) {
        const std::size_t k = model.meta.sv_indices[s];
        if (k < n) beta[k] = model.beta[s];
    }
    // biasless outputs on the training rows
    std::vector<double> F(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        F[k] = predict_svr(model, data.X.row(k)) - model.bias;

    KktReport rep;
    rep.per_sample.resize(n);
    rep.max_violation = max_violation_given_bias(data.y, F, beta, model.hyper.C,
                                                 model.hyper.epsilon, model.bias,
                                                 &rep.per_sample);
    return rep;
}

// ---- serialization ----

void save_svr(const SvrModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    out << "SVR1\n";
    out << "kernel " << kernel_kind_name(model.kernel.kind) << ' ';
    emit(model.kernel.sigma);
    out << ' ' << model.kernel.degree << '\n';
    out << "hyper ";
    emit(model.hyper.C);
    out << ' ';
    emit(model.hyper.epsilon);
    out << ' ';
    emit(model.hyper.tol);
    out << ' ' << model.hyper.max_iter << ' ' << model.hyper.cache_bytes << '\n';
    out << "input_dim " << model.input_dim << '\n';
    out << "bias ";
    emit(model.bias);
    out << '\n';
    out << "meta " << model.meta.n << ' ' << model.meta.iterations << ' ';
    emit(model.meta.final_kkt);
    out << ' ' << (model.meta.converged ? 1 : 0) << '\n';
    out << "sv " << model.support_vectors.rows << '\n';
    for (std::size_t s = 0; s < model.support_vectors.rows; ++s) {
        out << model.meta.sv_indices[s] << ' ';
        emit(model.beta[s]);
        for (std::size_t d = 0; d < model.support_vectors.cols; ++d) {
            out << ' ';
            emit(model.support_vectors.at(s, d));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

SvrModel load_svr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    std::string magic;
    if (!std::getline(in, magic) || magic != "SVR1")
        throw BadModelFile("expected SVR1 header in " + path);

    SvrModel m;
    std::string tag, kind;
    std::size_t sv_count = 0;
    int converged = 0;
    if (!(in >> tag >> kind >> m.kernel.sigma >> m.kernel.degree) || tag != "kernel")
        throw BadModelFile("bad kernel record in " + path);
    m.kernel.kind = kernel_kind_from_name(kind);
    if (!(in >> tag >> m.hyper.C >> m.hyper.epsilon >> m.hyper.tol >> m.hyper.max_iter >>
          m.hyper.cache_bytes) ||
        tag != "hyper")
        throw BadModelFile("bad hyper record in " + path);
    if (!(in >> tag >> m.input_dim) || tag != "input_dim")
        throw BadModelFile("bad input_dim record in " + path);
    if (!(in >> tag >> m.bias) || tag != "bias") throw BadModelFile("bad bias record in " + path);
    if (!(in >> tag >> m.meta.n >> m.meta.iterations >> m.meta.final_kkt >> converged) ||
        tag != "meta")
        throw BadModelFile("bad meta record in " + path);
    m.meta.converged = converged != 0;
    if (!(in >> tag >> sv_count) || tag != "sv") throw BadModelFile("bad sv record in " + path);

    m.support_vectors = Matrix(sv_count, m.input_dim);
    m.beta.resize(sv_count);
    m.meta.sv_indices.resize(sv_count);
    for (std::size_t s = 0; s < sv_count; ++s) {
        if (!(in >> m.meta.sv_indices[s] >> m.beta[s]))
            throw BadModelFile("truncated support vector " + std::to_string(s) + " in " + path);
        for (std::size_t d = 0; d < m.input_dim; ++d)
            if (!(in >> m.support_vectors.at(s, d)))
                throw BadModelFile("truncated support vector " + std::to_string(s) + " in " + path);
    }
    return m;
}

} // namespace loadcast
