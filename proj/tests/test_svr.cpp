#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "loadcast/metrics.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/svr.hpp"
#include "support/qp_oracle.hpp"

using namespace loadcast;

namespace {

SupervisedSet random_set(Rng& rng, std::size_t n, std::size_t dim) {
    SupervisedSet s;
    s.X = Matrix(n, dim);
    s.y.resize(n);
    for (auto& v : s.X.data) v = rng.next_unit();
    for (auto& v : s.y) v = rng.next_unit();
    return s;
}

Matrix gram_of(const SupervisedSet& s, const KernelSpec& spec) {
    Matrix K(s.X.rows, s.X.rows);
    for (std::size_t i = 0; i < s.X.rows; ++i)
        for (std::size_t j = 0; j < s.X.rows; ++j)
            K.at(i, j) = kernel_eval(spec, s.X.row(i), s.X.row(j));
    return K;
}

std::vector<double> full_beta(const SvrModel& m, std::size_t n) {
    std::vector<double> beta(n, 0.0);
    for (std::size_t s = 0; s < m.meta.sv_indices.size(); ++s) beta[m.meta.sv_indices[s]] = m.beta[s];
    return beta;
}

} // namespace

TEST_CASE("constant target collapses to a bias-only model") {
    Rng rng(1);
    auto s = random_set(rng, 12, 3);
    std::fill(s.y.begin(), s.y.end(), 0.37);
    auto m = train_svr(s, {}, {KernelKind::rbf, 1.0, 1}, 0);
    CHECK(m.support_vectors.rows == 0);
    CHECK(m.bias == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(m.meta.converged);
    CHECK(m.meta.iterations == 0);
    CHECK(predict_svr(m, std::vector<double>{0.9, 0.1, 0.4}) == doctest::Approx(0.37));
}

TEST_CASE("linear kernel recovers a linear target inside the tube") {
    Rng rng(2);
    SupervisedSet s;
    s.X = Matrix(20, 2);
    s.y.resize(20);
    for (std::size_t i = 0; i < 20; ++i) {
        s.X.at(i, 0) = rng.next_unit();
        s.X.at(i, 1) = rng.next_unit();
        s.y[i] = s.X.at(i, 0);
    }
    SvrHyperParams hp;
    hp.C = 100.0;
    hp.epsilon = 0.01;
    hp.tol = 1e-4;
    auto m = train_svr(s, hp, {KernelKind::linear, 1.0, 1}, 0);
    std::vector<double> yhat(20);
    for (std::size_t i = 0; i < 20; ++i) yhat[i] = predict_svr(m, s.X.row(i));
    CHECK(mae(s.y, yhat) <= 0.01);
}

TEST_CASE("dual objective matches the brute-force QP oracle") {
    const KernelSpec kernels[] = {{KernelKind::linear, 1.0, 1},
                                  {KernelKind::rbf, 1.5, 1},
                                  {KernelKind::anova_rbf, 1.0, 2}};
    Rng master(777);
    for (int inst = 0; inst < 20; ++inst) {
        Rng rng = master.stream(inst);
        const std::size_t n = 3 + rng.next_below(6);  // n <= 8
        const std::size_t dim = 1 + rng.next_below(4);
        auto s = random_set(rng, n, dim);
        const auto& spec = kernels[inst % 3];

        SvrHyperParams hp;
        hp.C = 1.0 + rng.next_unit() * 4.0;
        hp.epsilon = 0.01 + 0.1 * rng.next_unit();
        hp.tol = 1e-8;  // drive SMO essentially to the optimum
        hp.max_iter = 1000000;
        auto m = train_svr(s, hp, spec, 0);
        REQUIRE(m.meta.converged);

        const auto K = gram_of(s, spec);
        const auto beta_smo = full_beta(m, n);
        const auto beta_qp = testsupport::solve_svr_dual_qp(K, s.y, hp.C, hp.epsilon);
        const double w_smo = testsupport::svr_dual_objective(K, s.y, hp.epsilon, beta_smo);
        const double w_qp = testsupport::svr_dual_objective(K, s.y, hp.epsilon, beta_qp);
        INFO("instance " << inst << " n=" << n << " smo=" << w_smo << " qp=" << w_qp);
        CHECK(std::fabs(w_smo - w_qp) < 1e-4);
    }
}

TEST_CASE("rbf instance with n=6 sits on the oracle optimum") {
    Rng rng(42);
    auto s = random_set(rng, 6, 3);
    KernelSpec spec{KernelKind::rbf, 2.0, 1};
    SvrHyperParams hp;
    hp.C = 2.0;
    hp.epsilon = 0.05;
    hp.tol = 1e-8;
    hp.max_iter = 1000000;
    auto m = train_svr(s, hp, spec, 0);
    const auto K = gram_of(s, spec);
    const double w_smo =
        testsupport::svr_dual_objective(K, s.y, hp.epsilon, full_beta(m, 6));
    const double w_qp = testsupport::svr_dual_objective(
        K, s.y, hp.epsilon, testsupport::solve_svr_dual_qp(K, s.y, hp.C, hp.epsilon));
    CHECK(std::fabs(w_smo - w_qp) < 1e-4);
}

TEST_CASE("trained models satisfy the dual constraints") {
    Rng master(5150);
    for (int inst = 0; inst < 5; ++inst) {
        Rng rng = master.stream(inst);
        auto s = random_set(rng, 40, 4);
        SvrHyperParams hp;
        hp.epsilon = 0.02;
        auto m = train_svr(s, hp, {KernelKind::rbf, 1.0, 1}, 0);
        double sum = 0.0;
        for (double b : m.beta) {
            CHECK(b != 0.0);                  // only true support vectors retained
            CHECK(std::fabs(b) <= hp.C);
            sum += b;
        }
        CHECK(std::fabs(sum) <= 1e-9);
    }
}

TEST_CASE("converged kkt violation stays under tol, n up to 200") {
    Rng master(31337);
    for (int inst = 0; inst < 20; ++inst) {
        Rng rng = master.stream(inst);
        const std::size_t n = 20 + rng.next_below(181);  // 20..200
        auto s = random_set(rng, n, 6);
        SvrHyperParams hp;  // default tol 1e-3
        hp.epsilon = 0.05;
        auto m = train_svr(s, hp, {KernelKind::rbf, 1.0, 1}, 0);
        REQUIRE(m.meta.converged);
        auto rep = kkt_report(m, s);
        INFO("instance " << inst << " n=" << n);
        CHECK(rep.max_violation <= 1e-3);
        CHECK(rep.per_sample.size() == n);
        CHECK(rep.max_violation == doctest::Approx(m.meta.final_kkt).epsilon(1e-9));
    }
}

TEST_CASE("interior support vectors sit on the tube edge") {
    Rng rng(99);
    auto s = random_set(rng, 60, 4);
    SvrHyperParams hp;
    hp.epsilon = 0.05;
    auto m = train_svr(s, hp, {KernelKind::rbf, 1.0, 1}, 0);
    REQUIRE(m.meta.converged);
    for (std::size_t sv = 0; sv < m.beta.size(); ++sv) {
        if (std::fabs(m.beta[sv]) >= hp.C) continue;  // bound vectors are exempt
        const std::size_t row = m.meta.sv_indices[sv];
        const double f = predict_svr(m, s.X.row(row));
        CHECK(std::fabs(f - s.y[row]) <= hp.epsilon + hp.tol);
    }
}

TEST_CASE("kkt_report flags a perturbed model") {
    Rng rng(6);
    auto s = random_set(rng, 30, 3);
    SvrHyperParams hp;
    hp.epsilon = 0.02;
    auto m = train_svr(s, hp, {KernelKind::rbf, 1.0, 1}, 0);
    REQUIRE(m.beta.size() >= 1);
    auto broken = m;
    broken.beta[0] += 0.5;
    CHECK(kkt_report(broken, s).max_violation > hp.tol);
}

TEST_CASE("kkt_report shape on a two-sample set") {
    Rng rng(8);
    auto s = random_set(rng, 2, 2);
    s.y = {0.1, 0.9};
    auto m = train_svr(s, {}, {KernelKind::linear, 1.0, 1}, 0);
    auto rep = kkt_report(m, s);
    CHECK(rep.per_sample.size() == 2);
}

TEST_CASE("prediction contract") {
    SvrModel empty;
    empty.bias = 0.4;
    CHECK(predict_svr(empty, std::vector<double>{1, 2, 3}) == 0.4);
    CHECK(predict_svr(empty, std::vector<double>{}) == 0.4);

    SvrModel one;
    one.kernel = {KernelKind::rbf, 1.0, 1};
    one.input_dim = 2;
    one.support_vectors = Matrix(1, 2);
    one.support_vectors.at(0, 0) = 0.3;
    one.support_vectors.at(0, 1) = 0.6;
    one.beta = {1.0};
    one.meta.sv_indices = {0};
    CHECK(predict_svr(one, std::vector<double>{0.3, 0.6}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(predict_svr(one, std::vector<double>{0.3}), DimensionMismatch);
}

TEST_CASE("training is deterministic and permutation invariant") {
    Rng rng(11);
    auto s = random_set(rng, 25, 4);
    SvrHyperParams hp;
    hp.epsilon = 0.03;
    // row-order invariance is a property of the (unique) dual optimum, so
    // drive the solver essentially all the way there
    hp.tol = 1e-10;
    hp.max_iter = 1000000;
    KernelSpec spec{KernelKind::anova_rbf, 1.0, 1};
    auto a = train_svr(s, hp, spec, 0);
    auto b = train_svr(s, hp, spec, 0);
    CHECK(a.beta == b.beta);
    CHECK(a.bias == b.bias);
    CHECK(a.meta.iterations == b.meta.iterations);

    // reverse the row order; predictions must agree to 1e-9
    SupervisedSet rev = s;
    for (std::size_t i = 0; i < s.X.rows; ++i) {
        const auto src = s.X.row(s.X.rows - 1 - i);
        std::copy(src.begin(), src.end(), rev.X.row(i).begin());
        rev.y[i] = s.y[s.X.rows - 1 - i];
    }
    auto c = train_svr(rev, hp, spec, 0);
    Rng probe(12);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> x = {probe.next_unit(), probe.next_unit(), probe.next_unit(),
                                 probe.next_unit()};
        CHECK(predict_svr(a, x) == doctest::Approx(predict_svr(c, x)).epsilon(1e-9));
    }
}

TEST_CASE("input validation") {
    Rng rng(3);
    auto s = random_set(rng, 1, 2);
    CHECK_THROWS_AS(train_svr(s, {}, {KernelKind::rbf, 1.0, 1}, 0), DegenerateData);

    auto s2 = random_set(rng, 5, 2);
    s2.y[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train_svr(s2, {}, {KernelKind::rbf, 1.0, 1}, 0), NonFiniteValue);

    auto s3 = random_set(rng, 5, 2);
    SvrHyperParams bad;
    bad.C = 0.0;
    CHECK_THROWS_AS(train_svr(s3, bad, {KernelKind::rbf, 1.0, 1}, 0), ToolkitError);
    SvrHyperParams bad2;
    bad2.epsilon = -0.1;
    CHECK_THROWS_AS(train_svr(s3, bad2, {KernelKind::rbf, 1.0, 1}, 0), ToolkitError);
}

TEST_CASE("model file round trip") {
    Rng rng(13);
    auto s = random_set(rng, 30, 4);
    SvrHyperParams hp;
    hp.epsilon = 0.02;
    auto m = train_svr(s, hp, {KernelKind::anova_rbf, 0.8, 2}, 0);
    const char* path = "/tmp/loadcast_test_model.svr";
    save_svr(m, path);
    auto r = load_svr(path);
    CHECK(r.kernel.kind == m.kernel.kind);
    CHECK(r.kernel.sigma == m.kernel.sigma);
    CHECK(r.beta == m.beta);
    CHECK(r.bias == m.bias);
    CHECK(r.hyper.C == m.hyper.C);
    CHECK(r.hyper.epsilon == m.hyper.epsilon);
    CHECK(r.meta.sv_indices == m.meta.sv_indices);
    CHECK(r.support_vectors.data == m.support_vectors.data);
    Rng probe(14);
    for (int k = 0; k < 20; ++k) {
        std::vector<double> x = {probe.next_unit(), probe.next_unit(), probe.next_unit(),
                                 probe.next_unit()};
        CHECK(predict_svr(r, x) == predict_svr(m, x));  // bitwise
    }
    std::remove(path);

    CHECK_THROWS_AS(load_svr("/tmp/loadcast_no_such_model.svr"), FileNotFound);
    {
        FILE* f = fopen("/tmp/loadcast_bad_magic.svr", "w");
        fputs("NOPE\n", f);
        fclose(f);
    }
    CHECK_THROWS_AS(load_svr("/tmp/loadcast_bad_magic.svr"), BadModelFile);
    std::remove("/tmp/loadcast_bad_magic.svr");
}
