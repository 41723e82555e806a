#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "loadcast/kernels.hpp"
#include "loadcast/matrix.hpp"
#include "loadcast/rng.hpp"
#include "support/eigen.hpp"

using namespace loadcast;

namespace {

std::vector<double> random_point(Rng& rng, std::size_t dim) {
    std::vector<double> x(dim);
    for (auto& v : x) v = rng.next_unit();
    return x;
}

} // namespace

TEST_CASE("kernel values on identical inputs") {
    Rng rng(4);
    const auto x = random_point(rng, 8);
    CHECK(kernel_eval({KernelKind::rbf, 2.5, 1}, x, x) == 1.0);
    CHECK(kernel_eval({KernelKind::anova_rbf, 0.7, 1}, x, x) == 8.0);
    CHECK(kernel_eval({KernelKind::anova_rbf, 0.7, 2}, x, x) == 64.0);
    const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
    CHECK(kernel_eval({KernelKind::linear, 1.0, 1}, a, b) == 32.0);
}

TEST_CASE("kernel symmetry is exact") {
    for (auto kind : {KernelKind::linear, KernelKind::rbf, KernelKind::anova_rbf}) {
        KernelSpec spec{kind, 1.3, 2};
        Rng rng(static_cast<std::uint64_t>(kind) + 10);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t dim = 1 + rng.next_below(8);
            const auto x = random_point(rng, dim);
            const auto y = random_point(rng, dim);
            CHECK(kernel_eval(spec, x, y) == kernel_eval(spec, y, x));
        }
    }
}

TEST_CASE("gram matrices are positive semidefinite") {
    for (auto kind : {KernelKind::linear, KernelKind::rbf, KernelKind::anova_rbf}) {
        KernelSpec spec{kind, 2.0, 2};
        Rng rng(static_cast<std::uint64_t>(kind) + 77);
        for (int set = 0; set < 20; ++set) {
            const std::size_t n = 2 + rng.next_below(9);  // up to 10 points
            const std::size_t dim = 1 + rng.next_below(6);
            std::vector<std::vector<double>> pts;
            for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(rng, dim));
            Matrix gram(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    gram.at(i, j) = kernel_eval(spec, pts[i], pts[j]);
            const auto ev = testsupport::symmetric_eigenvalues(gram);
            INFO(kernel_kind_name(kind) << " set " << set);
            CHECK(ev.front() >= -1e-8);
        }
    }
}

TEST_CASE("kernel validation and dimension checks") {
    const std::vector<double> two = {1, 2}, three = {1, 2, 3};
    CHECK_THROWS_AS(kernel_eval({KernelKind::rbf, 1.0, 1}, two, three), DimensionMismatch);
    CHECK_THROWS_AS(KernelSpec({KernelKind::rbf, 0.0, 1}).validate(), ToolkitError);
    CHECK_THROWS_AS(KernelSpec({KernelKind::anova_rbf, -1.0, 1}).validate(), ToolkitError);
    CHECK_THROWS_AS(KernelSpec({KernelKind::rbf, 1.0, 0}).validate(), ToolkitError);
    CHECK_NOTHROW(KernelSpec({KernelKind::linear, 1.0, 1}).validate());
    CHECK(kernel_kind_from_name("anova_rbf") == KernelKind::anova_rbf);
    CHECK_THROWS_AS(kernel_kind_from_name("poly"), TypeMismatch);
}
