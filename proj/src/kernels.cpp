#include "loadcast/kernels.hpp"

#include <cmath>

#include "loadcast/matrix.hpp"

namespace loadcast {

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::linear: return "linear";
        case KernelKind::rbf: return "rbf";
        case KernelKind::anova_rbf: return "anova_rbf";
    }
    return "?";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "linear") return KernelKind::linear;
    if (name == "rbf") return KernelKind::rbf;
    if (name == "anova_rbf") return KernelKind::anova_rbf;
    throw TypeMismatch("kernel", "unknown kind '" + name + "'");
}

void KernelSpec::validate() const {
    if (kind != KernelKind::linear && !(sigma > 0.0))
        throw ToolkitError("kernel sigma must be positive");
    if (degree < 1) throw ToolkitError("kernel degree must be >= 1");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionMismatch("kernel arguments have dimensions " + std::to_string(x.size()) +
                                " and " + std::to_string(y.size()));
    switch (spec.kind) {
        case KernelKind::linear:
            return dot(x, y);
        case KernelKind::rbf:
            return std::exp(-spec.sigma * squared_distance(x, y));
        case KernelKind::anova_rbf: {
            double s = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d) {
                const double diff = x[d] - y[d];
                s += std::exp(-spec.sigma * diff * diff);
            }
            double p = 1.0;
            for (std::size_t e = 0; e < spec.degree; ++e) p *= s;
            return p;
        }
    }
    return 0.0;  // unreachable
}

} // namespace loadcast
