#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "readlm/common.hpp"

namespace readlm::regress {

struct RegressionModel {
    std::vector<double> w;
    double b = 0.0;
    double epsilon = 0.1;
    double c = 1.0;
};

// Dual objective value after each epoch; coordinate descent makes the
// sequence non-increasing.
struct SolverTrace {
    std::vector<double> dual_objective_per_epoch;
    int epochs = 0;
    double final_max_delta = 0.0;
};

// Epsilon-insensitive squared-loss SVR,
//   min ½(||w||² + b²) + C Σ max(0, |y_i − (w·x_i + b)| − ε)²,
// solved by dual coordinate descent with the bias folded in as a unit
// feature (which is why b is regularized). Stops when the largest dual
// variable change in an epoch drops below 1e-8, or after 1000 epochs.
// Deterministic: the per-epoch shuffle uses a fixed internal seed.
RegressionModel svr_train(const Mat& x, const std::vector<double>& y, double c, double epsilon,
                          SolverTrace* trace = nullptr);

double svr_predict(const RegressionModel& model, std::span<const double> x);

// The primal objective above; what svr_train minimizes.
double svr_objective(const RegressionModel& model, const Mat& x, const std::vector<double>& y);

// Text format: `dim epsilon C`, then b, then the w entries space-separated.
void save_regressor(const RegressionModel& model, const std::filesystem::path& path,
                    const std::string& header_comment = {});
RegressionModel load_regressor(const std::filesystem::path& path);

}  // namespace readlm::regress
