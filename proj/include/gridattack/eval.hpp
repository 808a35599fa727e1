#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridattack/attacks.hpp"
#include "gridattack/mlp.hpp"

namespace gridattack {

inline constexpr const char* kReportSchema = "gridattack.report/1";
inline constexpr const char* kAttackBatchSchema = "gridattack.attack/1";
inline constexpr const char* kPlanSchema = "gridattack.plan/1";

/// Budget grid swept by RANDOM/FGSM/BIM cells.
inline const std::vector<double> kDefaultEpsilonGrid = {0.001, 0.002, 0.005, 0.01, 0.02,
                                                        0.04,  0.06,  0.08,  0.1};

/// One attack family/goal to evaluate. Budgeted families (RANDOM, FGSM,
/// BIM) expand to one cell per grid epsilon; CW families run once with no
/// epsilon axis.
struct AttackTemplate {
    AttackFamily family = AttackFamily::FGSM;
    AttackGoal goal = AttackGoal::UNTARGETED;
    double bim_step = 0.0;  // 0 means epsilon / 4
    int bim_iters = 10;
    CwParams cw{};
    TargetRule target_rule = TargetRule::NEXT_CLASS_CYCLIC;
};

struct ExperimentPlan {
    std::vector<Task> tasks = {Task::FZC, Task::FTC, Task::JOINT};
    std::vector<AttackTemplate> attacks;
    std::vector<double> epsilon_grid = kDefaultEpsilonGrid;
    double reference_epsilon = 0.04;
    std::uint64_t master_seed = 0;
    /// Saturation ceiling (percent) applied to every degradation value
    /// before averaging; an infinite entry (attacked accuracy 0) takes
    /// exactly this value.
    double degradation_cap = 20000.0;
    // Optional path hints for the CLI; ignored by run_experiment.
    std::string features_dir;
    std::string models_dir;

    void validate() const;
};

/// The full suite: random baseline plus FGSM/BIM/CW_L2/CW_LINF in both
/// goals, default knobs, over all three tasks.
ExperimentPlan default_plan(std::uint64_t master_seed);

/// Accuracy of one (task, attack, goal, epsilon) grid point on the
/// perturbed test split. epsilon is NaN for CW cells.
struct CellResult {
    Task task = Task::FZC;
    AttackFamily family = AttackFamily::RANDOM;
    AttackGoal goal = AttackGoal::UNTARGETED;
    double epsilon = 0.0;
    double accuracy = 0.0;
    double success_rate = 0.0;
    double mean_delta_l2 = 0.0;
    double max_delta_linf = 0.0;
    int budget_violations = 0;  // rows with ||delta||_inf > epsilon + 1e-9
    std::uint64_t seed = 0;
};

/// Per-family relative degradation (percent) at the reference epsilon,
/// infinities capped; cw is the stronger of the CW_L2/CW_LINF cells.
struct GoalDegradation {
    double fgsm = 0.0;
    double bim = 0.0;
    double cw = 0.0;
    double mean = 0.0;
};

struct EvaluationReport {
    std::string created_at;  // the only timestamp anywhere in the outputs
    std::uint64_t master_seed = 0;
    std::string dataset_checksum;
    std::map<std::string, std::string> model_refs;  // task name -> checkpoint ref
    ExperimentPlan plan;
    std::map<std::string, double> base_accuracy;  // task name -> clean accuracy
    std::vector<CellResult> cells;
    // degradation[task name][goal name], filled at the reference epsilon
    std::map<std::string, std::map<std::string, GoalDegradation>> degradation;
    std::vector<std::string> violations;  // hard invariant breaches (exit nonzero)
    std::vector<std::string> flags;       // advisory observations
};

/// Everything run_experiment needs besides the plan: the standardized test
/// rows, per-task labels and trained models, plus provenance strings for
/// the manifest.
struct ExperimentInputs {
    Eigen::MatrixXd x_test;
    std::map<Task, std::vector<int>> labels;
    std::map<Task, MlpModel> models;
    std::string dataset_checksum;
    std::map<Task, std::string> model_refs;
};

/// Runs every cell of the plan against the test split. Fails before any
/// cell when a task's model or labels are missing. Per-cell seeds are
/// derived from the master seed, so results do not depend on thread count
/// or schedule.
EvaluationReport run_experiment(const ExperimentPlan& plan, const ExperimentInputs& inputs,
                                int threads = 1);

/// 100 * (base - attacked) / attacked. attacked == 0 maps to +infinity;
/// negative inputs are rejected.
double relative_degradation(double base, double attacked);

/// Degradation per attack family for one (task, goal) at the plan's
/// reference epsilon, capped at plan.degradation_cap.
GoalDegradation degradation_at_reference(const EvaluationReport& report, Task task,
                                         AttackGoal goal);

/// (untargeted mean, targeted mean) across FGSM/BIM/CW for one task.
std::pair<double, double> mean_degradation_by_goal(const EvaluationReport& report, Task task);

/// Hard invariant checks over a finished report: plan/cell bijection,
/// budget soundness, epsilon-zero equality, approximate monotonicity
/// (tolerance +0.02), and the untargeted attack-vs-noise gap for
/// epsilon >= 0.005.
std::vector<std::string> check_report(const EvaluationReport& report);

/// Advisory observations, currently the JOINT > FTC > FZC mean-degradation
/// ordering; violations here never fail a run.
std::vector<std::string> advisory_flags(const EvaluationReport& report);

/// Writes report.json, long-form report.csv and one plot_<task>.csv per
/// task (epsilon axis, one accuracy series per attack plus base). Emission
/// is a pure function of the report, so re-emitting is byte-identical.
void emit_report(const EvaluationReport& report, const std::filesystem::path& dir);

EvaluationReport load_report(const std::filesystem::path& path);

/// Plan config file IO (JSON, schema gridattack.plan/1). Keys absent from
/// the file keep their defaults, so a minimal plan file is {}.
ExperimentPlan load_plan(const std::filesystem::path& path);
void save_plan(const ExperimentPlan& plan, const std::filesystem::path& path);

/// Attack-level CSV + JSON manifest for one cell's examples, as written by
/// the attack subcommand.
void export_attack_batch(const std::vector<AdversarialExample>& examples,
                         const AttackConfig& config, const std::string& model_ref,
                         const std::filesystem::path& csv_path,
                         const std::filesystem::path& manifest_path);

}  // namespace gridattack
