#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gridattack/mlp.hpp"

namespace gridattack {

enum class AttackFamily { RANDOM, FGSM, BIM, CW_L2, CW_LINF };
enum class AttackGoal { UNTARGETED, TARGETED };
enum class TargetRule { NEXT_CLASS_CYCLIC, LEAST_LIKELY, EXPLICIT };

const char* to_string(AttackFamily family);
const char* to_string(AttackGoal goal);
const char* to_string(TargetRule rule);
AttackFamily attack_family_from_string(std::string_view name);
AttackGoal attack_goal_from_string(std::string_view name);
TargetRule target_rule_from_string(std::string_view name);

struct CwParams {
    double confidence = 0.0;  // kappa: required logit margin
    double initial_c = 1.0;
    int binary_search_steps = 9;
    int max_iterations = 200;
    double step_size = 0.01;
    double tau_init = 1.0;    // CW_LINF only
    double tau_shrink = 0.9;

    void validate() const;
};

struct AttackConfig {
    AttackFamily family = AttackFamily::FGSM;
    AttackGoal goal = AttackGoal::UNTARGETED;
    double epsilon = 0.0;   // l-inf budget for RANDOM/FGSM/BIM; CW ignores it
    double bim_step = 0.0;  // 0 means epsilon / 4
    int bim_iters = 10;
    CwParams cw{};
    TargetRule target_rule = TargetRule::NEXT_CLASS_CYCLIC;
    int explicit_target = 0;  // 1-based; EXPLICIT rule only
    std::uint64_t seed = 0;   // consumed by RANDOM only

    double effective_bim_step() const { return bim_step > 0.0 ? bim_step : epsilon / 4.0; }

    /// Throws std::invalid_argument on out-of-domain fields, a targeted
    /// RANDOM config, or an EXPLICIT target outside 1..num_classes.
    void validate(int num_classes) const;
};

/// One attacked example. true_label or target_label is 0 when unknown at
/// the call site (per-example targeted calls) or not applicable
/// (untargeted has no target).
struct AdversarialExample {
    Eigen::VectorXd original;
    Eigen::VectorXd perturbed;
    double delta_linf = 0.0;  // recomputed from perturbed - original
    double delta_l2 = 0.0;
    bool success = false;
    int achieved_class = 0;  // model's prediction on perturbed, 1-based
    int true_label = 0;
    int target_label = 0;
};

/// Picks the attack target for one example. NEXT_CLASS_CYCLIC maps label to
/// (label mod K) + 1; LEAST_LIKELY needs the clean prediction and picks the
/// lowest-probability class != label, ties broken toward the lowest index;
/// EXPLICIT returns explicit_target, rejecting a target equal to the label.
int choose_target(int label, int num_classes, TargetRule rule,
                  const Eigen::VectorXd* probabilities = nullptr, int explicit_target = 0);

/// x plus i.i.d. uniform noise in [-epsilon, epsilon] per dimension.
AdversarialExample random_noise(const MlpModel& model, const Eigen::VectorXd& x, int label,
                                double epsilon, std::uint64_t seed);

/// One signed-gradient step of size epsilon: ascent on the true label's
/// loss (untargeted, label_or_target = true label) or descent on the
/// target's loss (targeted, label_or_target = target).
AdversarialExample fgsm(const MlpModel& model, const Eigen::VectorXd& x, int label_or_target,
                        double epsilon, AttackGoal goal);

/// Iterated signed-gradient steps, each iterate clipped back into the
/// epsilon l-inf ball around x.
AdversarialExample bim(const MlpModel& model, const Eigen::VectorXd& x, int label_or_target,
                       double epsilon, double step, int iters, AttackGoal goal);

/// Carlini-Wagner l2: minimizes ||delta||_2^2 + c * h(x + delta) over
/// Adam iterations, with c per example found by binary search (doubling
/// on failure, bisecting on success). Returns the smallest-norm successful
/// delta, or the lowest-h iterate flagged success=false. label is the true
/// label; targeted mode also needs target.
AdversarialExample cw_l2(const MlpModel& model, const Eigen::VectorXd& x, int label,
                         AttackGoal goal, const CwParams& params = {}, int target = 0);

/// Carlini-Wagner l-inf: as cw_l2 with the norm term replaced by
/// sum_i max(|delta_i| - tau, 0); tau shrinks by tau_shrink whenever the
/// current iterate already fits inside the tau ball.
AdversarialExample cw_linf(const MlpModel& model, const Eigen::VectorXd& x, int label,
                           AttackGoal goal, const CwParams& params = {}, int target = 0);

/// Applies one attack config to every row of x (true 1-based labels in
/// labels), order-preserving and deterministic: row i's noise stream is
/// derived from (config.seed, i). Targeted mode derives each row's target
/// via config.target_rule from the clean prediction.
std::vector<AdversarialExample> attack_batch(const MlpModel& model, const Eigen::MatrixXd& x,
                                             const std::vector<int>& labels,
                                             const AttackConfig& config);

}  // namespace gridattack
