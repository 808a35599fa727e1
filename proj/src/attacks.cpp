#include "gridattack/attacks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridattack/rng.hpp"

namespace gridattack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_batch_labels(const std::vector<int>& labels, int k, Eigen::Index rows) {
    if (static_cast<Eigen::Index>(labels.size()) != rows) {
        throw std::invalid_argument("label count does not match row count");
    }
    for (int y : labels) {
        if (y < 1 || y > k) {
            throw std::invalid_argument("label out of range for K=" + std::to_string(k) + ": " +
                                        std::to_string(y));
        }
    }
}

bool goal_met(AttackGoal goal, int achieved, int true_label, int target_label) {
    return goal == AttackGoal::TARGETED ? achieved == target_label : achieved != true_label;
}

Eigen::MatrixXd signed_grad(const MlpModel& model, const Eigen::MatrixXd& x,
                            const std::vector<int>& labels) {
    return grad_input_batch(model, x, labels).array().sign().matrix();
}

Eigen::MatrixXd core_random(const Eigen::MatrixXd& x, double epsilon, std::uint64_t seed) {
    Eigen::MatrixXd p = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        for (Eigen::Index j = 0; j < x.cols(); ++j) p(i, j) += rng.uniform(-epsilon, epsilon);
    }
    return p;
}

Eigen::MatrixXd core_fgsm(const MlpModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& param, double epsilon, AttackGoal goal) {
    const double dir = goal == AttackGoal::TARGETED ? -epsilon : epsilon;
    return x + dir * signed_grad(model, x, param);
}

Eigen::MatrixXd core_bim(const MlpModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& param, double epsilon, double step, int iters,
                         AttackGoal goal) {
    const double dir = goal == AttackGoal::TARGETED ? -step : step;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (int it = 0; it < iters; ++it) {
        delta += dir * signed_grad(model, x + delta, param);
        delta = delta.cwiseMax(-epsilon).cwiseMin(epsilon);
    }
    return x + delta;
}

/// Margin the attack drives negative: targeted, best-other minus target
/// logit; untargeted, true-label logit minus best-other. other_out gets the
/// best-other class index (0-based).
double cw_margin(const Eigen::RowVectorXd& z, int anchor0, AttackGoal goal, int* other_out) {
    double best = -kInf;
    int best_j = -1;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        if (static_cast<int>(j) == anchor0) continue;
        if (z(j) > best) {
            best = z(j);
            best_j = static_cast<int>(j);
        }
    }
    if (other_out != nullptr) *other_out = best_j;
    return goal == AttackGoal::TARGETED ? best - z(anchor0) : z(anchor0) - best;
}

// Shared CW driver. anchors holds the per-row optimization label (target
// when targeted, true label when untargeted). The returned matrix is
// x + best successful delta per row, or the lowest-h iterate for rows
// where every binary-search step failed.
Eigen::MatrixXd core_cw(const MlpModel& model, const Eigen::MatrixXd& x,
                        const std::vector<int>& anchors, AttackGoal goal, const CwParams& params,
                        bool linf) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const int k = model.num_classes();

    std::vector<double> c(static_cast<std::size_t>(n), params.initial_c);
    std::vector<double> lo(static_cast<std::size_t>(n), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(n), kInf);
    Eigen::MatrixXd best_delta = Eigen::MatrixXd::Zero(n, d);
    std::vector<double> best_norm(static_cast<std::size_t>(n), kInf);
    Eigen::MatrixXd effort_delta = Eigen::MatrixXd::Zero(n, d);
    std::vector<double> effort_h(static_cast<std::size_t>(n), kInf);
    std::vector<char> ever_success(static_cast<std::size_t>(n), 0);

    for (int bs = 0; bs < params.binary_search_steps; ++bs) {
        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, d);
        Eigen::MatrixXd adam_m = Eigen::MatrixXd::Zero(n, d);
        Eigen::MatrixXd adam_v = Eigen::MatrixXd::Zero(n, d);
        std::vector<double> tau(static_cast<std::size_t>(n), params.tau_init);
        std::vector<char> step_success(static_cast<std::size_t>(n), 0);

        // Books the iterate fb was computed on: min-h fallback always, and
        // min-norm best whenever the goal predicate holds. Iteration 0
        // covers delta = 0, so an already-satisfied row keeps delta = 0.
        const auto record = [&](const Eigen::MatrixXd& delta_now, const ForwardBatch& fb) {
            const std::vector<int> pred = fb.predicted_classes();
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const int anchor0 = anchors[ui] - 1;
                const double margin = cw_margin(fb.logits.row(i), anchor0, goal, nullptr);
                const double h = std::max(margin, -params.confidence);
                if (h < effort_h[ui]) {
                    effort_h[ui] = h;
                    effort_delta.row(i) = delta_now.row(i);
                }
                const bool ok = goal == AttackGoal::TARGETED ? pred[i] == anchors[ui]
                                                             : pred[i] != anchors[ui];
                if (ok) {
                    const double norm = linf ? delta_now.row(i).lpNorm<Eigen::Infinity>()
                                             : delta_now.row(i).norm();
                    if (norm < best_norm[ui]) {
                        best_norm[ui] = norm;
                        best_delta.row(i) = delta_now.row(i);
                    }
                    step_success[ui] = 1;
                    ever_success[ui] = 1;
                }
            }
        };

        for (int it = 0; it < params.max_iterations; ++it) {
            const ForwardBatch fb = forward_batch(model, x + delta);
            record(delta, fb);

            // c * h pulled back through the logits; rows at the clamped
            // branch of max(margin, -kappa) get no pull.
            Eigen::MatrixXd cot = Eigen::MatrixXd::Zero(n, k);
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const int anchor0 = anchors[ui] - 1;
                int other = -1;
                const double margin = cw_margin(fb.logits.row(i), anchor0, goal, &other);
                if (margin > -params.confidence) {
                    if (goal == AttackGoal::TARGETED) {
                        cot(i, other) = c[ui];
                        cot(i, anchor0) = -c[ui];
                    } else {
                        cot(i, anchor0) = c[ui];
                        cot(i, other) = -c[ui];
                    }
                }
            }
            Eigen::MatrixXd grad = backprop_input(model, fb, cot);
            if (linf) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double t = tau[static_cast<std::size_t>(i)];
                    for (Eigen::Index j = 0; j < d; ++j) {
                        const double dj = delta(i, j);
                        if (std::abs(dj) > t) grad(i, j) += dj > 0.0 ? 1.0 : -1.0;
                    }
                }
            } else {
                grad += 2.0 * delta;
            }

            const double t = static_cast<double>(it + 1);
            adam_m = 0.9 * adam_m + 0.1 * grad;
            adam_v = 0.999 * adam_v + 0.001 * grad.cwiseProduct(grad);
            const double bc1 = 1.0 - std::pow(0.9, t);
            const double bc2 = 1.0 - std::pow(0.999, t);
            delta.array() -= params.step_size * (adam_m.array() / bc1) /
                             ((adam_v.array() / bc2).sqrt() + 1e-8);

            if (linf) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    auto& ti = tau[static_cast<std::size_t>(i)];
                    if (delta.row(i).lpNorm<Eigen::Infinity>() <= ti) ti *= params.tau_shrink;
                }
            }
        }
        record(delta, forward_batch(model, x + delta));

        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            if (step_success[i]) {
                hi[i] = c[i];
                c[i] = 0.5 * (lo[i] + hi[i]);
            } else {
                lo[i] = c[i];
                c[i] = std::isinf(hi[i]) ? c[i] * 2.0 : 0.5 * (lo[i] + hi[i]);
            }
        }
    }

    Eigen::MatrixXd perturbed(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        perturbed.row(i) = x.row(i) + (ever_success[ui] ? best_delta.row(i) : effort_delta.row(i));
    }
    return perturbed;
}

std::vector<AdversarialExample> finalize(const MlpModel& model, const Eigen::MatrixXd& x,
                                         const Eigen::MatrixXd& perturbed, AttackGoal goal,
                                         const std::vector<int>& true_labels,
                                         const std::vector<int>& target_labels) {
    const ForwardBatch fb = forward_batch(model, perturbed);
    const std::vector<int> pred = fb.predicted_classes();
    std::vector<AdversarialExample> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        AdversarialExample& ae = out[static_cast<std::size_t>(i)];
        ae.original = x.row(i).transpose();
        ae.perturbed = perturbed.row(i).transpose();
        const Eigen::VectorXd delta = ae.perturbed - ae.original;
        ae.delta_linf = delta.lpNorm<Eigen::Infinity>();
        ae.delta_l2 = delta.norm();
        ae.achieved_class = pred[static_cast<std::size_t>(i)];
        ae.true_label = true_labels[static_cast<std::size_t>(i)];
        ae.target_label =
            target_labels.empty() ? 0 : target_labels[static_cast<std::size_t>(i)];
        ae.success = goal_met(goal, ae.achieved_class, ae.true_label, ae.target_label);
    }
    return out;
}

void check_cw_call(int label, int target, int k, AttackGoal goal, const CwParams& params) {
    params.validate();
    if (label < 1 || label > k) {
        throw std::invalid_argument("label out of range: " + std::to_string(label));
    }
    if (goal == AttackGoal::TARGETED) {
        if (target < 1 || target > k || target == label) {
            throw std::invalid_argument("targeted mode needs a target in 1..K distinct from the label");
        }
    }
}

}  // namespace

const char* to_string(AttackFamily family) {
    switch (family) {
        case AttackFamily::RANDOM: return "random";
        case AttackFamily::FGSM: return "fgsm";
        case AttackFamily::BIM: return "bim";
        case AttackFamily::CW_L2: return "cw_l2";
        case AttackFamily::CW_LINF: return "cw_linf";
    }
    throw std::invalid_argument("unknown attack family");
}

const char* to_string(AttackGoal goal) {
    return goal == AttackGoal::TARGETED ? "targeted" : "untargeted";
}

const char* to_string(TargetRule rule) {
    switch (rule) {
        case TargetRule::NEXT_CLASS_CYCLIC: return "next_class_cyclic";
        case TargetRule::LEAST_LIKELY: return "least_likely";
        case TargetRule::EXPLICIT: return "explicit";
    }
    throw std::invalid_argument("unknown target rule");
}

AttackFamily attack_family_from_string(std::string_view name) {
    if (name == "random") return AttackFamily::RANDOM;
    if (name == "fgsm") return AttackFamily::FGSM;
    if (name == "bim") return AttackFamily::BIM;
    if (name == "cw_l2") return AttackFamily::CW_L2;
    if (name == "cw_linf") return AttackFamily::CW_LINF;
    throw std::invalid_argument("unknown attack family: " + std::string(name));
}

AttackGoal attack_goal_from_string(std::string_view name) {
    if (name == "untargeted") return AttackGoal::UNTARGETED;
    if (name == "targeted") return AttackGoal::TARGETED;
    throw std::invalid_argument("unknown attack goal: " + std::string(name));
}

TargetRule target_rule_from_string(std::string_view name) {
    if (name == "next_class_cyclic") return TargetRule::NEXT_CLASS_CYCLIC;
    if (name == "least_likely") return TargetRule::LEAST_LIKELY;
    if (name == "explicit") return TargetRule::EXPLICIT;
    throw std::invalid_argument("unknown target rule: " + std::string(name));
}

void CwParams::validate() const {
    if (confidence < 0.0) {
        throw std::invalid_argument("confidence must be non-negative");
    }
    if (initial_c <= 0.0 || step_size <= 0.0 || tau_init <= 0.0) {
        throw std::invalid_argument("initial c, step size and tau must be positive");
    }
    if (binary_search_steps < 1 || max_iterations < 1) {
        throw std::invalid_argument("binary search steps and iterations must be at least 1");
    }
    if (tau_shrink <= 0.0 || tau_shrink >= 1.0) {
        throw std::invalid_argument("tau shrink factor must lie in (0, 1)");
    }
}

void AttackConfig::validate(int num_classes) const {
    if (num_classes < 2) {
        throw std::invalid_argument("attacks need at least two classes");
    }
    if (!(epsilon >= 0.0) || std::isinf(epsilon)) {
        throw std::invalid_argument("epsilon must be finite and non-negative");
    }
    if (bim_step < 0.0 || bim_iters < 1) {
        throw std::invalid_argument("bim step must be non-negative and iterations positive");
    }
    cw.validate();
    if (family == AttackFamily::RANDOM && goal == AttackGoal::TARGETED) {
        throw std::invalid_argument("random noise has no targeted mode");
    }
    if (goal == AttackGoal::TARGETED && target_rule == TargetRule::EXPLICIT &&
        (explicit_target < 1 || explicit_target > num_classes)) {
        throw std::invalid_argument("explicit target out of range");
    }
}

int choose_target(int label, int num_classes, TargetRule rule,
                  const Eigen::VectorXd* probabilities, int explicit_target) {
    if (num_classes < 2) {
        throw std::invalid_argument("need at least two classes to pick a target");
    }
    if (label < 1 || label > num_classes) {
        throw std::invalid_argument("label out of range: " + std::to_string(label));
    }
    switch (rule) {
        case TargetRule::NEXT_CLASS_CYCLIC:
            return label % num_classes + 1;
        case TargetRule::LEAST_LIKELY: {
            if (probabilities == nullptr ||
                probabilities->size() != static_cast<Eigen::Index>(num_classes)) {
                throw std::invalid_argument(
                    "least-likely targeting needs the clean class probabilities");
            }
            int best = -1;
            double best_p = kInf;
            for (int j = 0; j < num_classes; ++j) {
                if (j == label - 1) continue;
                if ((*probabilities)(j) < best_p) {
                    best_p = (*probabilities)(j);
                    best = j;
                }
            }
            return best + 1;
        }
        case TargetRule::EXPLICIT: {
            if (explicit_target < 1 || explicit_target > num_classes) {
                throw std::invalid_argument("explicit target out of range");
            }
            if (explicit_target == label) {
                throw std::invalid_argument("explicit target equals the true label");
            }
            return explicit_target;
        }
    }
    throw std::invalid_argument("unknown target rule");
}

AdversarialExample random_noise(const MlpModel& model, const Eigen::VectorXd& x, int label,
                                double epsilon, std::uint64_t seed) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("epsilon must be non-negative");
    }
    const Eigen::MatrixXd xm = x.transpose();
    return finalize(model, xm, core_random(xm, epsilon, seed), AttackGoal::UNTARGETED, {label},
                    {})[0];
}

AdversarialExample fgsm(const MlpModel& model, const Eigen::VectorXd& x, int label_or_target,
                        double epsilon, AttackGoal goal) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("epsilon must be non-negative");
    }
    const bool targeted = goal == AttackGoal::TARGETED;
    const Eigen::MatrixXd xm = x.transpose();
    const Eigen::MatrixXd p = core_fgsm(model, xm, {label_or_target}, epsilon, goal);
    return finalize(model, xm, p, goal, {targeted ? 0 : label_or_target},
                    {targeted ? label_or_target : 0})[0];
}

AdversarialExample bim(const MlpModel& model, const Eigen::VectorXd& x, int label_or_target,
                       double epsilon, double step, int iters, AttackGoal goal) {
    if (epsilon < 0.0 || step <= 0.0 || iters < 1) {
        throw std::invalid_argument("bim needs epsilon >= 0, step > 0 and iters >= 1");
    }
    const bool targeted = goal == AttackGoal::TARGETED;
    const Eigen::MatrixXd xm = x.transpose();
    const Eigen::MatrixXd p = core_bim(model, xm, {label_or_target}, epsilon, step, iters, goal);
    return finalize(model, xm, p, goal, {targeted ? 0 : label_or_target},
                    {targeted ? label_or_target : 0})[0];
}

AdversarialExample cw_l2(const MlpModel& model, const Eigen::VectorXd& x, int label,
                         AttackGoal goal, const CwParams& params, int target) {
    check_cw_call(label, target, model.num_classes(), goal, params);
    const bool targeted = goal == AttackGoal::TARGETED;
    const Eigen::MatrixXd xm = x.transpose();
    const Eigen::MatrixXd p = core_cw(model, xm, {targeted ? target : label}, goal, params, false);
    return finalize(model, xm, p, goal, {label}, {targeted ? target : 0})[0];
}

AdversarialExample cw_linf(const MlpModel& model, const Eigen::VectorXd& x, int label,
                           AttackGoal goal, const CwParams& params, int target) {
    check_cw_call(label, target, model.num_classes(), goal, params);
    const bool targeted = goal == AttackGoal::TARGETED;
    const Eigen::MatrixXd xm = x.transpose();
    const Eigen::MatrixXd p = core_cw(model, xm, {targeted ? target : label}, goal, params, true);
    return finalize(model, xm, p, goal, {label}, {targeted ? target : 0})[0];
}

std::vector<AdversarialExample> attack_batch(const MlpModel& model, const Eigen::MatrixXd& x,
                                             const std::vector<int>& labels,
                                             const AttackConfig& config) {
    const int k = model.num_classes();
    config.validate(k);
    check_batch_labels(labels, k, x.rows());

    std::vector<int> targets;
    std::vector<int> param = labels;
    if (config.goal == AttackGoal::TARGETED) {
        targets.resize(labels.size());
        if (config.target_rule == TargetRule::LEAST_LIKELY) {
            const ForwardBatch clean = forward_batch(model, x);
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const Eigen::VectorXd probs =
                    clean.probabilities.row(static_cast<Eigen::Index>(i)).transpose();
                targets[i] = choose_target(labels[i], k, config.target_rule, &probs,
                                           config.explicit_target);
            }
        } else {
            for (std::size_t i = 0; i < labels.size(); ++i) {
                targets[i] = choose_target(labels[i], k, config.target_rule, nullptr,
                                           config.explicit_target);
            }
        }
        param = targets;
    }

    Eigen::MatrixXd p;
    switch (config.family) {
        case AttackFamily::RANDOM:
            p = core_random(x, config.epsilon, config.seed);
            break;
        case AttackFamily::FGSM:
            p = core_fgsm(model, x, param, config.epsilon, config.goal);
            break;
        case AttackFamily::BIM:
            p = core_bim(model, x, param, config.epsilon, config.effective_bim_step(),
                         config.bim_iters, config.goal);
            break;
        case AttackFamily::CW_L2:
            p = core_cw(model, x, param, config.goal, config.cw, false);
            break;
        case AttackFamily::CW_LINF:
            p = core_cw(model, x, param, config.goal, config.cw, true);
            break;
    }
    return finalize(model, x, p, config.goal, labels, targets);
}

}  // namespace gridattack
