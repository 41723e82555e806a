#include "loadcast/metrics.hpp"

#include <cmath>
#include <string>

namespace loadcast {

namespace {

void check(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size())
        throw LengthMismatch("metric inputs have lengths " + std::to_string(y.size()) + " and " +
                             std::to_string(yhat.size()));
    if (y.empty()) throw EmptyInput();
}

} // namespace

double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
    check(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

double rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
    check(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
}

MetricPair metric_pair(const std::vector<double>& y, const std::vector<double>& yhat) {
    return {mae(y, yhat), rmse(y, yhat)};
}

} // namespace loadcast
