#include "gridattack/mlp.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "gridattack/rng.hpp"

namespace gridattack {

namespace {

void check_labels(const std::vector<int>& labels, int k, Eigen::Index rows) {
    if (static_cast<Eigen::Index>(labels.size()) != rows) {
        throw std::invalid_argument("label count " + std::to_string(labels.size()) +
                                    " does not match row count " + std::to_string(rows));
    }
    for (int y : labels) {
        if (y < 1 || y > k) {
            throw std::invalid_argument("label out of range for K=" + std::to_string(k) + ": " +
                                        std::to_string(y));
        }
    }
}

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd z) {
    const Eigen::VectorXd row_max = z.rowwise().maxCoeff();
    z.colwise() -= row_max;
    z = z.array().exp();
    const Eigen::VectorXd row_sum = z.rowwise().sum();
    z.array().colwise() /= row_sum.array();
    return z;
}

double clamped_nll(double p) { return -std::log(std::max(p, 1e-12)); }

// Shared by grad_params and the training loop so the loop reuses its
// forward pass.
ParamGrads backprop_params(const MlpModel& model, const Eigen::MatrixXd& x,
                           const ForwardBatch& fb, const std::vector<int>& labels) {
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd dz3 = ce_logit_grad(fb, labels) / n;
    ParamGrads g;
    g.w3 = fb.a2.transpose() * dz3;
    g.b3 = dz3.colwise().sum().transpose();
    const Eigen::MatrixXd da2 = dz3 * model.w3.transpose();
    const Eigen::MatrixXd dz2 = (fb.z2.array() > 0.0).select(da2, 0.0);
    g.w2 = fb.a1.transpose() * dz2;
    g.b2 = dz2.colwise().sum().transpose();
    const Eigen::MatrixXd da1 = dz2 * model.w2.transpose();
    const Eigen::MatrixXd dz1 = (fb.z1.array() > 0.0).select(da1, 0.0);
    g.w1 = x.transpose() * dz1;
    g.b1 = dz1.colwise().sum().transpose();
    return g;
}

std::vector<double> flatten_row_major(const Eigen::MatrixXd& w) {
    std::vector<double> out(static_cast<std::size_t>(w.size()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            out[static_cast<std::size_t>(i * w.cols() + j)] = w(i, j);
        }
    }
    return out;
}

Eigen::MatrixXd unflatten_row_major(const std::vector<double>& flat, Eigen::Index rows,
                                    Eigen::Index cols) {
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
        throw std::runtime_error("checkpoint parameter block has " + std::to_string(flat.size()) +
                                 " values, expected " + std::to_string(rows * cols));
    }
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            w(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
        }
    }
    return w;
}

}  // namespace

int task_num_classes(Task task) {
    switch (task) {
        case Task::FZC: return kNumZones;
        case Task::FTC: return kNumFaultTypes;
        case Task::JOINT: return kNumZones * kNumFaultTypes;
    }
    throw std::invalid_argument("unknown task");
}

const char* to_string(Task task) {
    switch (task) {
        case Task::FZC: return "fzc";
        case Task::FTC: return "ftc";
        case Task::JOINT: return "joint";
    }
    throw std::invalid_argument("unknown task");
}

Task task_from_string(std::string_view name) {
    if (name == "fzc") return Task::FZC;
    if (name == "ftc") return Task::FTC;
    if (name == "joint") return Task::JOINT;
    throw std::invalid_argument("unknown task: " + std::string(name));
}

int task_label(const SuperVector& sv, Task task) {
    switch (task) {
        case Task::FZC: return sv.label_zone;
        case Task::FTC: return sv.label_type;
        case Task::JOINT: return sv.label_joint;
    }
    throw std::invalid_argument("unknown task");
}

std::vector<int> task_labels(const std::vector<SuperVector>& svs, Task task) {
    std::vector<int> labels;
    labels.reserve(svs.size());
    for (const SuperVector& sv : svs) labels.push_back(task_label(sv, task));
    return labels;
}

void MlpModel::validate() const {
    const auto& ls = layer_sizes;
    for (int s : ls) {
        if (s < 1) {
            throw std::runtime_error("non-positive layer size");
        }
    }
    if (ls[3] != task_num_classes(task)) {
        throw std::runtime_error("output size " + std::to_string(ls[3]) +
                                 " does not match task " + to_string(task));
    }
    const auto check = [](const Eigen::MatrixXd& w, Eigen::Index rows, Eigen::Index cols,
                          const char* name) {
        if (w.rows() != rows || w.cols() != cols) {
            throw std::runtime_error(std::string("bad shape for ") + name);
        }
        if (!w.allFinite()) {
            throw std::runtime_error(std::string("non-finite values in ") + name);
        }
    };
    check(w1, ls[0], ls[1], "w1");
    check(w2, ls[1], ls[2], "w2");
    check(w3, ls[2], ls[3], "w3");
    check(b1, ls[1], 1, "b1");
    check(b2, ls[2], 1, "b2");
    check(b3, ls[3], 1, "b3");
}

MlpModel init_mlp(Task task, std::array<int, 2> hidden, std::uint64_t seed, int input_dim) {
    if (input_dim < 1 || hidden[0] < 1 || hidden[1] < 1) {
        throw std::invalid_argument("layer sizes must be positive");
    }
    MlpModel model;
    model.task = task;
    model.layer_sizes = {input_dim, hidden[0], hidden[1], task_num_classes(task)};
    SplitMix64 rng(seed);
    const auto fill = [&rng](Eigen::MatrixXd& w, int fan_in, int fan_out) {
        w.resize(fan_in, fan_out);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (int i = 0; i < fan_in; ++i) {
            for (int j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-bound, bound);
        }
    };
    fill(model.w1, input_dim, hidden[0]);
    fill(model.w2, hidden[0], hidden[1]);
    fill(model.w3, hidden[1], model.layer_sizes[3]);
    model.b1 = Eigen::VectorXd::Zero(hidden[0]);
    model.b2 = Eigen::VectorXd::Zero(hidden[1]);
    model.b3 = Eigen::VectorXd::Zero(model.layer_sizes[3]);
    return model;
}

std::vector<int> ForwardBatch::predicted_classes() const {
    std::vector<int> classes(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index best = 0;
        logits.row(i).maxCoeff(&best);
        classes[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
    }
    return classes;
}

ForwardBatch forward_batch(const MlpModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.input_dim()) {
        throw std::invalid_argument("input has " + std::to_string(x.cols()) +
                                    " columns, model expects " +
                                    std::to_string(model.input_dim()));
    }
    if (!x.allFinite()) {
        throw std::invalid_argument("non-finite model input");
    }
    ForwardBatch fb;
    fb.z1 = (x * model.w1).rowwise() + model.b1.transpose();
    fb.a1 = fb.z1.cwiseMax(0.0);
    fb.z2 = (fb.a1 * model.w2).rowwise() + model.b2.transpose();
    fb.a2 = fb.z2.cwiseMax(0.0);
    fb.logits = (fb.a2 * model.w3).rowwise() + model.b3.transpose();
    fb.probabilities = softmax_rows(fb.logits);
    return fb;
}

Prediction forward(const MlpModel& model, const Eigen::VectorXd& x) {
    const ForwardBatch fb = forward_batch(model, x.transpose());
    Prediction pred;
    pred.logits = fb.logits.row(0).transpose();
    pred.probabilities = fb.probabilities.row(0).transpose();
    pred.predicted_class = fb.predicted_classes()[0];
    return pred;
}

double cross_entropy(const Prediction& pred, int label) {
    if (label < 1 || label > pred.probabilities.size()) {
        throw std::invalid_argument("label out of range: " + std::to_string(label));
    }
    return clamped_nll(pred.probabilities(label - 1));
}

double mean_cross_entropy(const ForwardBatch& fb, const std::vector<int>& labels) {
    check_labels(labels, static_cast<int>(fb.probabilities.cols()), fb.probabilities.rows());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < fb.probabilities.rows(); ++i) {
        sum += clamped_nll(fb.probabilities(i, labels[static_cast<std::size_t>(i)] - 1));
    }
    return sum / static_cast<double>(fb.probabilities.rows());
}

Eigen::MatrixXd ce_logit_grad(const ForwardBatch& fb, const std::vector<int>& labels) {
    check_labels(labels, static_cast<int>(fb.probabilities.cols()), fb.probabilities.rows());
    Eigen::MatrixXd g = fb.probabilities;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        g(i, labels[static_cast<std::size_t>(i)] - 1) -= 1.0;
    }
    return g;
}

Eigen::MatrixXd backprop_input(const MlpModel& model, const ForwardBatch& fb,
                               const Eigen::MatrixXd& dlogits) {
    const Eigen::MatrixXd da2 = dlogits * model.w3.transpose();
    const Eigen::MatrixXd dz2 = (fb.z2.array() > 0.0).select(da2, 0.0);
    const Eigen::MatrixXd da1 = dz2 * model.w2.transpose();
    const Eigen::MatrixXd dz1 = (fb.z1.array() > 0.0).select(da1, 0.0);
    return dz1 * model.w1.transpose();
}

Eigen::MatrixXd grad_input_batch(const MlpModel& model, const Eigen::MatrixXd& x,
                                 const std::vector<int>& labels) {
    const ForwardBatch fb = forward_batch(model, x);
    return backprop_input(model, fb, ce_logit_grad(fb, labels));
}

Eigen::VectorXd grad_input(const MlpModel& model, const Eigen::VectorXd& x, int label) {
    return grad_input_batch(model, x.transpose(), {label}).row(0).transpose();
}

ParamGrads grad_params(const MlpModel& model, const Eigen::MatrixXd& x,
                       const std::vector<int>& labels) {
    if (x.rows() == 0) {
        throw std::invalid_argument("empty batch");
    }
    const ForwardBatch fb = forward_batch(model, x);
    return backprop_params(model, x, fb, labels);
}

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1) {
        throw std::invalid_argument("epochs and batch size must be positive");
    }
    if (learning_rate <= 0.0 || adam_eps <= 0.0) {
        throw std::invalid_argument("learning rate and adam epsilon must be positive");
    }
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
        throw std::invalid_argument("adam betas must lie in [0, 1)");
    }
}

TrainHistory train(MlpModel& model, const Eigen::MatrixXd& x_train,
                   const std::vector<int>& y_train, const Eigen::MatrixXd& x_test,
                   const std::vector<int>& y_test, const TrainConfig& config) {
    config.validate();
    model.validate();
    const int k = model.num_classes();
    check_labels(y_train, k, x_train.rows());
    check_labels(y_test, k, x_test.rows());
    if (x_train.rows() == 0) {
        throw std::invalid_argument("empty training set");
    }

    ParamGrads mom, vel;
    mom.w1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
    mom.w2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
    mom.w3 = Eigen::MatrixXd::Zero(model.w3.rows(), model.w3.cols());
    mom.b1 = Eigen::VectorXd::Zero(model.b1.size());
    mom.b2 = Eigen::VectorXd::Zero(model.b2.size());
    mom.b3 = Eigen::VectorXd::Zero(model.b3.size());
    vel = mom;

    long step = 0;
    const auto adam = [&](auto& theta, auto& m, auto& v, const auto& g) {
        m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
        v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * g.cwiseProduct(g);
        const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
        theta.array() -=
            config.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config.adam_eps);
    };

    std::vector<int> order(static_cast<std::size_t>(x_train.rows()));
    std::iota(order.begin(), order.end(), 0);

    TrainHistory history;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
        shuffle(order, rng);

        double loss_sum = 0.0;
        const auto batch = static_cast<std::size_t>(config.batch_size);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t bn = std::min(batch, order.size() - start);
            Eigen::MatrixXd xb(static_cast<Eigen::Index>(bn), x_train.cols());
            std::vector<int> yb(bn);
            for (std::size_t i = 0; i < bn; ++i) {
                const int row = order[start + i];
                xb.row(static_cast<Eigen::Index>(i)) = x_train.row(row);
                yb[i] = y_train[static_cast<std::size_t>(row)];
            }
            const ForwardBatch fb = forward_batch(model, xb);
            loss_sum += mean_cross_entropy(fb, yb) * static_cast<double>(bn);
            const ParamGrads g = backprop_params(model, xb, fb, yb);
            ++step;
            adam(model.w1, mom.w1, vel.w1, g.w1);
            adam(model.w2, mom.w2, vel.w2, g.w2);
            adam(model.w3, mom.w3, vel.w3, g.w3);
            adam(model.b1, mom.b1, vel.b1, g.b1);
            adam(model.b2, mom.b2, vel.b2, g.b2);
            adam(model.b3, mom.b3, vel.b3, g.b3);
        }
        history.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
        history.train_accuracy.push_back(evaluate_accuracy(model, x_train, y_train));
        if (x_test.rows() > 0) {
            history.test_accuracy.push_back(evaluate_accuracy(model, x_test, y_test));
        }
    }
    return history;
}

double evaluate_accuracy(const MlpModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels) {
    if (x.rows() == 0) {
        throw std::invalid_argument("empty evaluation set");
    }
    check_labels(labels, model.num_classes(), x.rows());
    const std::vector<int> predicted = forward_batch(model, x).predicted_classes();
    int correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

void save_model(const MlpModel& model, const std::string& standardizer_ref,
                const std::filesystem::path& path) {
    model.validate();
    const nlohmann::json j = {
        {"schema", kModelSchema},
        {"task", to_string(model.task)},
        {"layer_sizes", model.layer_sizes},
        {"standardizer_ref", standardizer_ref},
        {"w1", flatten_row_major(model.w1)},
        {"w2", flatten_row_major(model.w2)},
        {"w3", flatten_row_major(model.w3)},
        {"b1", std::vector<double>(model.b1.begin(), model.b1.end())},
        {"b2", std::vector<double>(model.b2.begin(), model.b2.end())},
        {"b3", std::vector<double>(model.b3.begin(), model.b3.end())},
    };
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

ModelCheckpoint load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("schema").get<std::string>() != kModelSchema) {
        throw std::runtime_error("unsupported model schema: " + j.at("schema").get<std::string>());
    }
    ModelCheckpoint ckpt;
    ckpt.standardizer_ref = j.at("standardizer_ref").get<std::string>();
    MlpModel& model = ckpt.model;
    model.task = task_from_string(j.at("task").get<std::string>());
    j.at("layer_sizes").get_to(model.layer_sizes);
    const auto& ls = model.layer_sizes;
    model.w1 = unflatten_row_major(j.at("w1").get<std::vector<double>>(), ls[0], ls[1]);
    model.w2 = unflatten_row_major(j.at("w2").get<std::vector<double>>(), ls[1], ls[2]);
    model.w3 = unflatten_row_major(j.at("w3").get<std::vector<double>>(), ls[2], ls[3]);
    const auto vec = [](const std::vector<double>& v) {
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                                 static_cast<Eigen::Index>(v.size())));
    };
    model.b1 = vec(j.at("b1").get<std::vector<double>>());
    model.b2 = vec(j.at("b2").get<std::vector<double>>());
    model.b3 = vec(j.at("b3").get<std::vector<double>>());
    model.validate();
    return ckpt;
}

}  // namespace gridattack
