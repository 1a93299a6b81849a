#include "readlm/regress.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "io_util.hpp"

namespace readlm::regress {

namespace {

constexpr std::uint64_t kShuffleSeed = 0x5e1ec7ed;
constexpr double kStopTolerance = 1e-8;
constexpr int kMaxEpochs = 1000;

// min_z ½H(z − beta)² + g(z − beta) + eps|z|
double soft_threshold_step(double beta, double g, double h, double eps) {
    if (g + eps < h * beta) return beta - (g + eps) / h;
    if (g - eps > h * beta) return beta - (g - eps) / h;
    return 0.0;
}

}  // namespace

RegressionModel svr_train(const Mat& x, const std::vector<double>& y, double c, double epsilon,
                          SolverTrace* trace) {
    const std::size_t n = x.rows();
    if (n == 0) throw ValidationError("svr_train: empty training set");
    if (y.size() != n)
        throw ValidationError("svr_train: " + std::to_string(n) + " feature rows but " +
                              std::to_string(y.size()) + " labels");
    if (!(c > 0.0)) throw ValidationError("svr_train: C must be > 0");
    if (!(epsilon >= 0.0)) throw ValidationError("svr_train: epsilon must be >= 0");
    for (double v : y)
        if (!std::isfinite(v)) throw ValidationError("svr_train: non-finite label");
    for (double v : x.data())
        if (!std::isfinite(v)) throw ValidationError("svr_train: non-finite feature value");

    const std::size_t dim = x.cols();
    // Augmented weight vector; the last slot is the bias.
    std::vector<double> w(dim + 1, 0.0);
    std::vector<double> beta(n, 0.0);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        h[i] = dot(x.row(i), x.row(i)) + 1.0 + 1.0 / (2.0 * c);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(kShuffleSeed);

    SolverTrace local;
    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
        fisher_yates_shuffle(order, rng);
        double max_delta = 0.0;
        for (const std::size_t i : order) {
            const auto xi = x.row(i);
            const double score = dot({w.data(), dim}, xi) + w[dim];
            const double g = score - y[i] + beta[i] / (2.0 * c);
            const double z = soft_threshold_step(beta[i], g, h[i], epsilon);
            const double delta = z - beta[i];
            if (delta != 0.0) {
                axpy(delta, xi, {w.data(), dim});
                w[dim] += delta;
                beta[i] = z;
            }
            max_delta = std::max(max_delta, std::abs(delta));
        }
        ++local.epochs;
        local.final_max_delta = max_delta;

        double dual = 0.5 * dot(w, w);
        for (std::size_t i = 0; i < n; ++i)
            dual += -beta[i] * y[i] + epsilon * std::abs(beta[i]) +
                    beta[i] * beta[i] / (4.0 * c);
        local.dual_objective_per_epoch.push_back(dual);
        if (max_delta < kStopTolerance) break;
    }

    RegressionModel model;
    model.w.assign(w.begin(), w.begin() + dim);
    model.b = w[dim];
    model.epsilon = epsilon;
    model.c = c;
    if (trace) *trace = std::move(local);
    return model;
}

double svr_predict(const RegressionModel& model, std::span<const double> x) {
    if (x.size() != model.w.size())
        throw ValidationError("svr_predict: feature dimension " + std::to_string(x.size()) +
                              " does not match model dimension " +
                              std::to_string(model.w.size()));
    return dot(model.w, x) + model.b;
}

double svr_objective(const RegressionModel& model, const Mat& x, const std::vector<double>& y) {
    if (x.rows() != y.size())
        throw ValidationError("svr_objective: " + std::to_string(x.rows()) +
                              " feature rows but " + std::to_string(y.size()) + " labels");
    double obj = 0.5 * (dot(model.w, model.w) + model.b * model.b);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double slack = std::abs(y[i] - svr_predict(model, x.row(i))) - model.epsilon;
        if (slack > 0.0) obj += model.c * slack * slack;
    }
    return obj;
}

void save_regressor(const RegressionModel& model, const std::filesystem::path& path,
                    const std::string& header_comment) {
    auto out = detail::open_output(path, "regression model file");
    detail::write_comment(out, header_comment);
    out << model.w.size() << " " << detail::format_double(model.epsilon) << " "
        << detail::format_double(model.c) << "\n";
    out << detail::format_double(model.b) << "\n";
    for (std::size_t i = 0; i < model.w.size(); ++i) {
        if (i) out << " ";
        out << detail::format_double(model.w[i]);
    }
    out << "\n";
}

RegressionModel load_regressor(const std::filesystem::path& path) {
    auto in = detail::open_input(path, "regression model file");
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        break;
    }
    std::istringstream header(line);
    long long dim = -1;
    std::string eps_tok, c_tok, extra;
    if (!(header >> dim >> eps_tok >> c_tok) || header >> extra || dim < 0)
        throw ValidationError("regression model file " + path.string() +
                              ": malformed `dim epsilon C` header");
    RegressionModel model;
    model.epsilon = detail::parse_double(eps_tok, "regression model epsilon");
    model.c = detail::parse_double(c_tok, "regression model C");
    if (!(model.epsilon >= 0.0) || !(model.c > 0.0))
        throw ValidationError("regression model file " + path.string() +
                              ": epsilon must be >= 0 and C > 0");

    if (!std::getline(in, line))
        throw ValidationError("regression model file " + path.string() + ": missing bias line");
    {
        std::istringstream bias(line);
        std::string tok;
        if (!(bias >> tok) || bias >> extra)
            throw ValidationError("regression model file " + path.string() +
                                  ": malformed bias line");
        model.b = detail::parse_double(tok, "regression model bias");
    }

    if (dim > 0 && !std::getline(in, line))
        throw ValidationError("regression model file " + path.string() +
                              ": missing weight line");
    std::istringstream weights(dim > 0 ? line : std::string());
    std::string tok;
    while (weights >> tok)
        model.w.push_back(detail::parse_double(tok, "regression model weight"));
    if (static_cast<long long>(model.w.size()) != dim)
        throw ValidationError("regression model file " + path.string() + ": expected " +
                              std::to_string(dim) + " weights, got " +
                              std::to_string(model.w.size()));
    for (double v : model.w)
        if (!std::isfinite(v))
            throw ValidationError("regression model file " + path.string() +
                                  ": non-finite weight");
    if (!std::isfinite(model.b))
        throw ValidationError("regression model file " + path.string() + ": non-finite bias");
    return model;
}

}  // namespace readlm::regress
