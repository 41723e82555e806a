#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "loadcast/errors.hpp"

namespace loadcast {

enum class KernelKind { linear, rbf, anova_rbf };

const char* kernel_kind_name(KernelKind k);
// Throws TypeMismatch on an unrecognized name.
KernelKind kernel_kind_from_name(const std::string& name);

// Kernel family and its parameters. sigma is the width for rbf/anova_rbf;
// degree is the anova_rbf exponent. Both are ignored by kernels that do not
// use them but must still be valid (sigma > 0, degree >= 1).
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double sigma = 1.0;
    std::size_t degree = 1;

    // Throws ToolkitError when sigma/degree are out of range.
    void validate() const;
};

// linear: <x,y>
// rbf: exp(-sigma * |x-y|^2)
// anova_rbf: (sum_d exp(-sigma * (x_d-y_d)^2))^degree
// Throws DimensionMismatch when x and y differ in length.
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

} // namespace loadcast
