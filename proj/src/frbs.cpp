#include "loadcast/frbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace loadcast {

void SbcParams::validate() const {
    if (!(radius > 0.0)) throw ToolkitError("cluster radius must be positive");
    if (!(squash > 0.0)) throw ToolkitError("squash factor must be positive");
    if (!(accept_ratio > 0.0) || accept_ratio > 1.0)
        throw ToolkitError("accept_ratio must lie in (0, 1]");
    if (reject_ratio < 0.0 || !(reject_ratio < 1.0))
        throw ToolkitError("reject_ratio must lie in [0, 1)");
    if (!(reject_ratio < accept_ratio))
        throw ToolkitError("reject_ratio must be below accept_ratio");
}

void FcmParams::validate() const {
    if (!(m > 1.0)) throw ToolkitError("fuzzifier m must exceed 1");
    if (!(tol > 0.0)) throw ToolkitError("fcm tol must be positive");
    if (max_iter == 0) throw ToolkitError("fcm max_iter must be at least 1");
}

ClusterSet subtractive_cluster(const Matrix& X, const SbcParams& p) {
    p.validate();
    if (X.rows == 0 || X.cols == 0) throw EmptyData{};
    const std::size_t n = X.rows;
    const double alpha = 4.0 / (p.radius * p.radius);
    const double rb = p.squash * p.radius;
    const double beta = 4.0 / (rb * rb);

    std::vector<double> pot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += std::exp(-alpha * squared_distance(X.row(i), X.row(j)));
        pot[i] = s;
    }

    ClusterSet out;
    out.centers.cols = X.cols;
    double first_potential = 0.0;

    while (out.indices.size() < n) {
        std::size_t k = 0; // strict > keeps the lowest row on ties
        for (std::size_t i = 1; i < n; ++i)
            if (pot[i] > pot[k]) k = i;
        const double pk = pot[k];
        if (!(pk > 0.0)) break; // no density left anywhere

        if (out.indices.empty()) {
            // the global maximum always seeds the first cluster
        } else if (pk > p.accept_ratio * first_potential) {
            // comfortably dense: accept outright
        } else if (pk < p.reject_ratio * first_potential) {
            break;
        } else {
            double d2min = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < out.centers.rows; ++c)
                d2min = std::min(d2min, squared_distance(X.row(k), out.centers.row(c)));
            if (std::sqrt(d2min) / p.radius + pk / first_potential < 1.0) {
                pot[k] = 0.0; // too close to an existing center and not dense enough
                continue;
            }
        }

        out.indices.push_back(k);
        out.potentials.push_back(pk);
        out.centers.data.insert(out.centers.data.end(), X.row(k).begin(), X.row(k).end());
        out.centers.rows += 1;
        if (out.indices.size() == 1) first_potential = pk;

        for (std::size_t i = 0; i < n; ++i)
            pot[i] -= pk * std::exp(-beta * squared_distance(X.row(i), X.row(k)));
        // the chosen row subtracted exactly pk from itself, so it cannot win again
    }
    return out;
}

FcmResult fcm_refine(const Matrix& X, const ClusterSet& init, const FcmParams& p) {
    p.validate();
    if (X.rows == 0 || X.cols == 0) throw EmptyData{};
    const std::size_t n = X.rows;
    const std::size_t c = init.centers.rows;
    if (c == 0) throw EmptyData{};
    if (init.centers.cols != X.cols)
        throw DimensionMismatch("cluster centers are " + std::to_string(init.centers.cols) +
                                "-dimensional but data has " + std::to_string(X.cols) +
                                " columns");
    if (n < c)
        throw FewerPointsThanClusters(std::to_string(n) + " points cannot support " +
                                      std::to_string(c) + " clusters");

    FcmResult res;
    res.centers = init.centers;
    res.memberships = Matrix(n, c);
    const double expo = 1.0 / (p.m - 1.0);

    Matrix next(c, X.cols);
    std::vector<double> d2(c);
    std::vector<double> mass(c);

    for (std::size_t iter = 0; iter < p.max_iter; ++iter) {
        // membership update against the current centers
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t hit = c; // first center coincident with the point, if any
            for (std::size_t i = 0; i < c; ++i) {
                d2[i] = squared_distance(X.row(k), res.centers.row(i));
                if (d2[i] == 0.0 && hit == c) hit = i;
            }
            auto u = res.memberships.row(k);
            if (hit < c) {
                std::fill(u.begin(), u.end(), 0.0);
                u[hit] = 1.0;
                continue;
            }
            for (std::size_t i = 0; i < c; ++i) {
                double denom = 0.0;
                for (std::size_t j = 0; j < c; ++j)
                    denom += std::pow(d2[i] / d2[j], expo);
                u[i] = 1.0 / denom;
            }
        }

        // center update from the fresh memberships
        std::fill(next.data.begin(), next.data.end(), 0.0);
        std::fill(mass.begin(), mass.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            auto u = res.memberships.row(k);
            auto x = X.row(k);
            for (std::size_t i = 0; i < c; ++i) {
                const double w = std::pow(u[i], p.m);
                mass[i] += w;
                auto v = next.row(i);
                for (std::size_t d = 0; d < X.cols; ++d) v[d] += w * x[d];
            }
        }
        double moved = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            auto v = next.row(i);
            if (mass[i] > 0.0) {
                for (std::size_t d = 0; d < X.cols; ++d) v[d] /= mass[i];
            } else {
                // a center starved of membership (duplicate seed) stays put
                auto old = res.centers.row(i);
                std::copy(old.begin(), old.end(), v.begin());
            }
            moved = std::max(moved, std::sqrt(squared_distance(v, res.centers.row(i))));
        }
        std::swap(res.centers.data, next.data);

        // objective of the pair (fresh memberships, fresh centers); evaluating
        // after both half-steps is what makes the trace non-increasing
        double J = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            auto u = res.memberships.row(k);
            for (std::size_t i = 0; i < c; ++i)
                J += std::pow(u[i], p.m) * squared_distance(X.row(k), res.centers.row(i));
        }
        res.objective_trace.push_back(J);

        if (moved < p.tol) break;
    }
    return res;
}

FuzzyRuleBase build_rulebase(const Matrix& centers, double r_a, std::size_t input_dim) {
    if (centers.rows == 0) throw EmptyData{};
    if (!(r_a > 0.0)) throw ToolkitError("cluster radius must be positive");
    if (input_dim == 0 || centers.cols != input_dim + 1)
        throw DimensionMismatch("rule construction needs centers with " +
                                std::to_string(input_dim + 1) + " coordinates, got " +
                                std::to_string(centers.cols));

    const double w = r_a / std::sqrt(8.0);
    FuzzyRuleBase rb;
    rb.input_dim = input_dim;
    rb.rules.reserve(centers.rows);
    for (std::size_t r = 0; r < centers.rows; ++r) {
        auto row = centers.row(r);
        FuzzyRule rule;
        rule.center.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(input_dim));
        rule.width.assign(input_dim, w);
        rule.consequent = row[input_dim];
        rb.rules.push_back(std::move(rule));
    }
    return rb;
}

double predict_frbs(const FuzzyRuleBase& rb, std::span<const double> x) {
    if (rb.rules.empty()) throw EmptyData{};
    if (x.size() != rb.input_dim)
        throw DimensionMismatch("rule base expects " + std::to_string(rb.input_dim) +
                                " inputs, got " + std::to_string(x.size()));

    double wsum = 0.0;
    double vsum = 0.0;
    for (const FuzzyRule& rule : rb.rules) {
        double e = 0.0;
        for (std::size_t d = 0; d < rb.input_dim; ++d) {
            const double z = x[d] - rule.center[d];
            e += z * z / (2.0 * rule.width[d] * rule.width[d]);
        }
        const double mu = std::exp(-e);
        wsum += mu;
        vsum += mu * rule.consequent;
    }
    if (wsum < 1e-300) {
        // every firing strength underflowed; fall back to the closest rule
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rb.rules.size(); ++r) {
            const double d2 = squared_distance(x, rb.rules[r].center);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = r;
            }
        }
        return rb.rules[best].consequent;
    }
    return vsum / wsum;
}

FuzzyRuleBase train_frbs(const SupervisedSet& data, const SbcParams& sbc, const FcmParams& fcm) {
    const std::size_t n = data.X.rows;
    if (n == 0 || data.X.cols == 0) throw EmptyData{};
    if (data.y.size() != n)
        throw LengthMismatch("supervised set has " + std::to_string(n) + " rows but " +
                             std::to_string(data.y.size()) + " targets");

    Matrix joint(n, data.X.cols + 1);
    for (std::size_t r = 0; r < n; ++r) {
        auto src = data.X.row(r);
        auto dst = joint.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[data.X.cols] = data.y[r];
    }
    const ClusterSet seeds = subtractive_cluster(joint, sbc);
    const FcmResult refined = fcm_refine(joint, seeds, fcm);
    return build_rulebase(refined.centers, sbc.radius, data.X.cols);
}

// ---- serialization ----

void save_frbs(const FuzzyRuleBase& rb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    out << "FRB1\n";
    out << "input_dim " << rb.input_dim << '\n';
    out << "rules " << rb.rules.size() << '\n';
    for (const FuzzyRule& rule : rb.rules) {
        // per rule: centers, then widths, then the consequent
        for (std::size_t d = 0; d < rb.input_dim; ++d) {
            if (d) out << ' ';
            emit(rule.center[d]);
        }
        for (std::size_t d = 0; d < rb.input_dim; ++d) {
            out << ' ';
            emit(rule.width[d]);
        }
        out << ' ';
        emit(rule.consequent);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

FuzzyRuleBase load_frbs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    std::string magic;
    if (!std::getline(in, magic) || magic != "FRB1")
        throw BadModelFile("expected FRB1 header in " + path);

    FuzzyRuleBase rb;
    std::string tag;
    std::size_t count = 0;
    if (!(in >> tag >> rb.input_dim) || tag != "input_dim" || rb.input_dim == 0)
        throw BadModelFile("bad input_dim record in " + path);
    if (!(in >> tag >> count) || tag != "rules" || count == 0)
        throw BadModelFile("bad rules record in " + path);

    rb.rules.resize(count);
    for (std::size_t r = 0; r < count; ++r) {
        FuzzyRule& rule = rb.rules[r];
        rule.center.resize(rb.input_dim);
        rule.width.resize(rb.input_dim);
        for (std::size_t d = 0; d < rb.input_dim; ++d)
            if (!(in >> rule.center[d]))
                throw BadModelFile("truncated rule " + std::to_string(r) + " in " + path);
        for (std::size_t d = 0; d < rb.input_dim; ++d)
            if (!(in >> rule.width[d]) || !(rule.width[d] > 0.0))
                throw BadModelFile("truncated rule " + std::to_string(r) + " in " + path);
        if (!(in >> rule.consequent))
            throw BadModelFile("truncated rule " + std::to_string(r) + " in " + path);
    }
    return rb;
}

} // namespace loadcast
