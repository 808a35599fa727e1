#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gridattack/features.hpp"

namespace gridattack {

/// The three classification tasks: fault zone (K=4), fault type (K=11) and
/// the joint zone-and-type label (K=44).
enum class Task { FZC, FTC, JOINT };

int task_num_classes(Task task);
const char* to_string(Task task);
Task task_from_string(std::string_view name);

/// The 1-based label a supervector carries for a task.
int task_label(const SuperVector& sv, Task task);
std::vector<int> task_labels(const std::vector<SuperVector>& svs, Task task);

/// Fully connected net [input, H1, H2, K]: two rectified hidden layers and
/// a softmax output. Weight matrices are (fan_in x fan_out), so a batch of
/// row vectors propagates as X*W + b^T per layer.
struct MlpModel {
    Task task = Task::FZC;
    std::array<int, 4> layer_sizes{};
    Eigen::MatrixXd w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;

    int input_dim() const { return layer_sizes[0]; }
    int num_classes() const { return layer_sizes[3]; }

    /// Throws std::runtime_error when shapes disagree with layer_sizes, a
    /// parameter is non-finite, or K does not match the task.
    void validate() const;
};

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), filled in row-major
/// order from one seeded stream; biases zero.
MlpModel init_mlp(Task task, std::array<int, 2> hidden = {128, 64}, std::uint64_t seed = 0,
                  int input_dim = kSuperDim);

struct Prediction {
    Eigen::VectorXd logits;
    Eigen::VectorXd probabilities;
    int predicted_class = 0;  // 1-based
};

/// Single-example forward pass; softmax uses max-subtraction. Throws
/// std::invalid_argument on a non-finite or wrong-length input.
Prediction forward(const MlpModel& model, const Eigen::VectorXd& x);

/// -log p(label), with the probability clamped below at 1e-12.
double cross_entropy(const Prediction& pred, int label);

/// All intermediates of a batched forward pass (one example per row),
/// kept so gradients can be propagated without recomputation.
struct ForwardBatch {
    Eigen::MatrixXd z1, a1, z2, a2, logits, probabilities;

    /// 1-based argmax of each row's logits.
    std::vector<int> predicted_classes() const;
};

ForwardBatch forward_batch(const MlpModel& model, const Eigen::MatrixXd& x);

/// Mean cross-entropy of a batch against 1-based labels.
double mean_cross_entropy(const ForwardBatch& fb, const std::vector<int>& labels);

/// Per-example gradient of cross-entropy w.r.t. the logits: row i is
/// p_i - onehot(labels[i]). Not averaged.
Eigen::MatrixXd ce_logit_grad(const ForwardBatch& fb, const std::vector<int>& labels);

/// Pulls an arbitrary logit cotangent back to the input: row i of the
/// result is dlogits_i^T * (d logits_i / d x_i).
Eigen::MatrixXd backprop_input(const MlpModel& model, const ForwardBatch& fb,
                               const Eigen::MatrixXd& dlogits);

/// Row i is the gradient of example i's own cross-entropy w.r.t. x_i.
Eigen::MatrixXd grad_input_batch(const MlpModel& model, const Eigen::MatrixXd& x,
                                 const std::vector<int>& labels);

/// Gradient of cross-entropy w.r.t. one input vector.
Eigen::VectorXd grad_input(const MlpModel& model, const Eigen::VectorXd& x, int label);

struct ParamGrads {
    Eigen::MatrixXd w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;
};

/// Analytic gradients of the mean cross-entropy over the batch w.r.t. all
/// weights and biases.
ParamGrads grad_params(const MlpModel& model, const Eigen::MatrixXd& x,
                       const std::vector<int>& labels);

struct TrainConfig {
    int epochs = 500;
    double learning_rate = 1e-3;
    int batch_size = 20;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per-epoch curves; index e is the state after epoch e+1.
struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> train_accuracy;
    std::vector<double> test_accuracy;
};

/// Adam mini-batch training, mutating the model in place. Rows are
/// reshuffled every epoch from a per-epoch seed derived from config.seed,
/// so a (model, data, config) triple trains bit-reproducibly. An empty
/// test set leaves the test curve empty.
TrainHistory train(MlpModel& model, const Eigen::MatrixXd& x_train,
                   const std::vector<int>& y_train, const Eigen::MatrixXd& x_test,
                   const std::vector<int>& y_test, const TrainConfig& config);

/// Fraction of rows whose argmax prediction equals the 1-based label.
double evaluate_accuracy(const MlpModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels);

// Checkpoint schema tag; bump on layout change.
inline constexpr const char* kModelSchema = "gridattack.model/1";

struct ModelCheckpoint {
    MlpModel model;
    std::string standardizer_ref;
};

/// JSON checkpoint: schema, task, layer sizes, parameters flattened
/// row-major, standardizer reference. save(load(p)) is byte-identical.
void save_model(const MlpModel& model, const std::string& standardizer_ref,
                const std::filesystem::path& path);
ModelCheckpoint load_model(const std::filesystem::path& path);

}  // namespace gridattack
