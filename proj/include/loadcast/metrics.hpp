#pragma once

#include <vector>

#include "loadcast/errors.hpp"

namespace loadcast {

// Error metrics on aligned vectors, in whatever units the inputs carry
// (normalized [0,1] throughout the benchmark).
struct MetricPair {
    double mae = 0.0;
    double rmse = 0.0;
};

// (1/n) sum |y_i - yhat_i|. Throws LengthMismatch / EmptyInput.
double mae(const std::vector<double>& y, const std::vector<double>& yhat);

// sqrt((1/n) sum (y_i - yhat_i)^2). Throws LengthMismatch / EmptyInput.
double rmse(const std::vector<double>& y, const std::vector<double>& yhat);

MetricPair metric_pair(const std::vector<double>& y, const std::vector<double>& yhat);

} // namespace loadcast
