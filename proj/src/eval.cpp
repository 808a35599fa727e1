#include "gridattack/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gridattack/dataset_io.hpp"
#include "gridattack/rng.hpp"

namespace gridattack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBudgetSlack = 1e-9;

bool budgeted(AttackFamily family) {
    return family == AttackFamily::RANDOM || family == AttackFamily::FGSM ||
           family == AttackFamily::BIM;
}

std::string g17(double v) {
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%.17g", v);
    return tmp;
}

// Stable key of a grid point, used for bijection checks and seed tags.
std::string cell_key(Task task, AttackFamily family, AttackGoal goal, int eps_index) {
    std::string key = to_string(task);
    key += "/";
    key += to_string(family);
    key += "/";
    key += to_string(goal);
    key += "/";
    key += eps_index >= 0 ? std::to_string(eps_index) : "na";
    return key;
}

struct PendingCell {
    Task task = Task::FZC;
    AttackTemplate tpl;
    double epsilon = 0.0;
    int eps_index = -1;  // -1 for CW cells
};

std::vector<PendingCell> expand_cells(const ExperimentPlan& plan) {
    std::vector<PendingCell> pending;
    for (Task task : plan.tasks) {
        for (const AttackTemplate& tpl : plan.attacks) {
            if (budgeted(tpl.family)) {
                for (std::size_t i = 0; i < plan.epsilon_grid.size(); ++i) {
                    pending.push_back(
                        {task, tpl, plan.epsilon_grid[i], static_cast<int>(i)});
                }
            } else {
                pending.push_back({task, tpl, std::numeric_limits<double>::quiet_NaN(), -1});
            }
        }
    }
    return pending;
}

CellResult run_cell(const PendingCell& pc, const ExperimentPlan& plan,
                    const ExperimentInputs& inputs) {
    AttackConfig config;
    config.family = pc.tpl.family;
    config.goal = pc.tpl.goal;
    config.epsilon = pc.eps_index >= 0 ? pc.epsilon : 0.0;
    config.bim_step = pc.tpl.bim_step;
    config.bim_iters = pc.tpl.bim_iters;
    config.cw = pc.tpl.cw;
    config.target_rule = pc.tpl.target_rule;
    config.seed = derive_seed(plan.master_seed,
                              "attack/" + cell_key(pc.task, pc.tpl.family, pc.tpl.goal,
                                                   pc.eps_index));

    const MlpModel& model = inputs.models.at(pc.task);
    const std::vector<int>& labels = inputs.labels.at(pc.task);
    const std::vector<AdversarialExample> examples =
        attack_batch(model, inputs.x_test, labels, config);

    CellResult cell;
    cell.task = pc.task;
    cell.family = pc.tpl.family;
    cell.goal = pc.tpl.goal;
    cell.epsilon = pc.epsilon;
    cell.seed = config.seed;
    int correct = 0;
    int succeeded = 0;
    double l2_sum = 0.0;
    for (const AdversarialExample& ae : examples) {
        if (ae.achieved_class == ae.true_label) ++correct;
        if (ae.success) ++succeeded;
        l2_sum += ae.delta_l2;
        cell.max_delta_linf = std::max(cell.max_delta_linf, ae.delta_linf);
        if (budgeted(config.family) && ae.delta_linf > config.epsilon + kBudgetSlack) {
            ++cell.budget_violations;
        }
    }
    const double n = static_cast<double>(examples.size());
    cell.accuracy = static_cast<double>(correct) / n;
    cell.success_rate = static_cast<double>(succeeded) / n;
    cell.mean_delta_l2 = l2_sum / n;
    return cell;
}

const CellResult* find_cell(const EvaluationReport& report, Task task, AttackFamily family,
                            AttackGoal goal, double epsilon) {
    for (const CellResult& cell : report.cells) {
        if (cell.task != task || cell.family != family || cell.goal != goal) continue;
        if (budgeted(family) ? cell.epsilon == epsilon : std::isnan(cell.epsilon)) {
            return &cell;
        }
    }
    return nullptr;
}

double capped_degradation(double base, double attacked, double cap) {
    return std::min(relative_degradation(base, attacked), cap);
}

}  // namespace

void ExperimentPlan::validate() const {
    if (tasks.empty() || attacks.empty() || epsilon_grid.empty()) {
        throw std::invalid_argument("plan needs at least one task, attack and epsilon");
    }
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
        const double e = epsilon_grid[i];
        if (!(e >= 0.0) || std::isinf(e)) {
            throw std::invalid_argument("epsilon grid values must be finite and non-negative");
        }
        if (i > 0 && e <= epsilon_grid[i - 1]) {
            throw std::invalid_argument("epsilon grid must be strictly increasing");
        }
    }
    if (!(reference_epsilon > 0.0) || !(degradation_cap > 0.0)) {
        throw std::invalid_argument("reference epsilon and degradation cap must be positive");
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (std::size_t j = i + 1; j < tasks.size(); ++j) {
            if (tasks[i] == tasks[j]) {
                throw std::invalid_argument("duplicate task in plan");
            }
        }
    }
    for (std::size_t i = 0; i < attacks.size(); ++i) {
        for (std::size_t j = i + 1; j < attacks.size(); ++j) {
            if (attacks[i].family == attacks[j].family && attacks[i].goal == attacks[j].goal) {
                throw std::invalid_argument("duplicate attack family/goal in plan");
            }
        }
    }
    for (const AttackTemplate& tpl : attacks) {
        if (tpl.family == AttackFamily::RANDOM && tpl.goal == AttackGoal::TARGETED) {
            throw std::invalid_argument("random noise has no targeted mode");
        }
        tpl.cw.validate();
    }
}

ExperimentPlan default_plan(std::uint64_t master_seed) {
    ExperimentPlan plan;
    plan.master_seed = master_seed;
    plan.attacks = {
        {AttackFamily::RANDOM, AttackGoal::UNTARGETED},
        {AttackFamily::FGSM, AttackGoal::UNTARGETED},
        {AttackFamily::FGSM, AttackGoal::TARGETED},
        {AttackFamily::BIM, AttackGoal::UNTARGETED},
        {AttackFamily::BIM, AttackGoal::TARGETED},
        {AttackFamily::CW_L2, AttackGoal::UNTARGETED},
        {AttackFamily::CW_L2, AttackGoal::TARGETED},
        {AttackFamily::CW_LINF, AttackGoal::UNTARGETED},
        {AttackFamily::CW_LINF, AttackGoal::TARGETED},
    };
    return plan;
}

EvaluationReport run_experiment(const ExperimentPlan& plan, const ExperimentInputs& inputs,
                                int threads) {
    plan.validate();
    if (inputs.x_test.rows() == 0) {
        throw std::invalid_argument("empty test split");
    }
    for (Task task : plan.tasks) {
        if (inputs.models.find(task) == inputs.models.end()) {
            throw std::invalid_argument(std::string("missing model for task ") + to_string(task));
        }
        if (inputs.labels.find(task) == inputs.labels.end()) {
            throw std::invalid_argument(std::string("missing labels for task ") + to_string(task));
        }
        inputs.models.at(task).validate();
        if (inputs.labels.at(task).size() != static_cast<std::size_t>(inputs.x_test.rows())) {
            throw std::invalid_argument(std::string("label count mismatch for task ") +
                                        to_string(task));
        }
    }

    EvaluationReport report;
    report.created_at = utc_timestamp();
    report.master_seed = plan.master_seed;
    report.dataset_checksum = inputs.dataset_checksum;
    report.plan = plan;
    for (const auto& [task, ref] : inputs.model_refs) {
        report.model_refs[to_string(task)] = ref;
    }
    for (Task task : plan.tasks) {
        report.base_accuracy[to_string(task)] =
            evaluate_accuracy(inputs.models.at(task), inputs.x_test, inputs.labels.at(task));
    }

    const std::vector<PendingCell> pending = expand_cells(plan);
    report.cells.resize(pending.size());

    int workers = threads < 1 ? 1 : threads;
    workers = std::min<int>(workers, static_cast<int>(pending.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < pending.size(); ++i) {
            report.cells[i] = run_cell(pending[i], plan, inputs);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex error_mutex;
        std::string first_error;
        const auto work = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < pending.size();) {
                try {
                    report.cells[i] = run_cell(pending[i], plan, inputs);
                } catch (const std::exception& e) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
        if (!first_error.empty()) {
            throw std::runtime_error("cell evaluation failed: " + first_error);
        }
    }

    for (Task task : plan.tasks) {
        for (AttackGoal goal : {AttackGoal::UNTARGETED, AttackGoal::TARGETED}) {
            const GoalDegradation d = degradation_at_reference(report, task, goal);
            if (std::isnan(d.mean)) continue;
            report.degradation[to_string(task)][to_string(goal)] = d;
        }
    }
    report.violations = check_report(report);
    report.flags = advisory_flags(report);
    return report;
}

double relative_degradation(double base, double attacked) {
    if (base < 0.0 || attacked < 0.0) {
        throw std::invalid_argument("accuracies must be non-negative");
    }
    if (attacked == 0.0) return kInf;
    return 100.0 * (base - attacked) / attacked;
}

GoalDegradation degradation_at_reference(const EvaluationReport& report, Task task,
                                         AttackGoal goal) {
    const auto base_it = report.base_accuracy.find(to_string(task));
    if (base_it == report.base_accuracy.end()) {
        throw std::invalid_argument(std::string("report has no task ") + to_string(task));
    }
    const double base = base_it->second;
    const double ref = report.plan.reference_epsilon;
    const double cap = report.plan.degradation_cap;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    GoalDegradation d;
    const CellResult* fgsm_cell = find_cell(report, task, AttackFamily::FGSM, goal, ref);
    d.fgsm = fgsm_cell ? capped_degradation(base, fgsm_cell->accuracy, cap) : nan;
    const CellResult* bim_cell = find_cell(report, task, AttackFamily::BIM, goal, ref);
    d.bim = bim_cell ? capped_degradation(base, bim_cell->accuracy, cap) : nan;

    // CW carries no epsilon axis; score the stronger of its two norms.
    double cw_accuracy = kInf;
    for (AttackFamily family : {AttackFamily::CW_L2, AttackFamily::CW_LINF}) {
        if (const CellResult* cell = find_cell(report, task, family, goal, 0.0)) {
            cw_accuracy = std::min(cw_accuracy, cell->accuracy);
        }
    }
    d.cw = std::isinf(cw_accuracy) ? nan : capped_degradation(base, cw_accuracy, cap);

    double sum = 0.0;
    int count = 0;
    for (double v : {d.fgsm, d.bim, d.cw}) {
        if (!std::isnan(v)) {
            sum += v;
            ++count;
        }
    }
    d.mean = count > 0 ? sum / count : nan;
    return d;
}

std::pair<double, double> mean_degradation_by_goal(const EvaluationReport& report, Task task) {
    return {degradation_at_reference(report, task, AttackGoal::UNTARGETED).mean,
            degradation_at_reference(report, task, AttackGoal::TARGETED).mean};
}

std::vector<std::string> check_report(const EvaluationReport& report) {
    std::vector<std::string> out;
    const ExperimentPlan& plan = report.plan;

    std::map<std::string, int> expected;
    for (const PendingCell& pc : expand_cells(plan)) {
        ++expected[cell_key(pc.task, pc.tpl.family, pc.tpl.goal, pc.eps_index)];
    }
    std::map<std::string, int> got;
    for (const CellResult& cell : report.cells) {
        int eps_index = -1;
        if (budgeted(cell.family)) {
            for (std::size_t i = 0; i < plan.epsilon_grid.size(); ++i) {
                if (plan.epsilon_grid[i] == cell.epsilon) {
                    eps_index = static_cast<int>(i);
                    break;
                }
            }
        }
        ++got[cell_key(cell.task, cell.family, cell.goal, eps_index)];
    }
    if (expected != got) {
        out.push_back("plan cells and report cells are not in bijection");
    }

    for (const CellResult& cell : report.cells) {
        if (budgeted(cell.family) && cell.budget_violations > 0) {
            out.push_back("budget exceeded in " + to_string(cell.task) + "/" +
                          to_string(cell.family) + "/" + to_string(cell.goal) +
                          " at epsilon " + g17(cell.epsilon) + ": " +
                          std::to_string(cell.budget_violations) + " example(s)");
        }
        if (budgeted(cell.family) && cell.epsilon == 0.0) {
            const double base = report.base_accuracy.at(to_string(cell.task));
            if (cell.accuracy != base) {
                out.push_back(std::string("zero-epsilon accuracy differs from base for ") +
                              to_string(cell.task) + "/" + to_string(cell.family));
            }
        }
    }

    for (Task task : plan.tasks) {
        for (const AttackTemplate& tpl : plan.attacks) {
            if (!budgeted(tpl.family)) continue;
            const CellResult* prev = nullptr;
            for (double eps : plan.epsilon_grid) {
                const CellResult* cell = find_cell(report, task, tpl.family, tpl.goal, eps);
                if (cell == nullptr) continue;
                if (prev != nullptr && cell->accuracy > prev->accuracy + 0.02) {
                    out.push_back(std::string("accuracy not approximately monotone for ") +
                                  to_string(task) + "/" + to_string(tpl.family) + "/" +
                                  to_string(tpl.goal) + " at epsilon " + g17(eps));
                }
                prev = cell;
            }
        }
    }

    for (Task task : plan.tasks) {
        for (double eps : plan.epsilon_grid) {
            if (eps < 0.005) continue;
            const CellResult* noise =
                find_cell(report, task, AttackFamily::RANDOM, AttackGoal::UNTARGETED, eps);
            if (noise == nullptr) continue;
            for (AttackFamily family : {AttackFamily::FGSM, AttackFamily::BIM}) {
                const CellResult* cell =
                    find_cell(report, task, family, AttackGoal::UNTARGETED, eps);
                if (cell != nullptr && cell->accuracy > noise->accuracy) {
                    out.push_back(std::string("untargeted ") + to_string(family) +
                                  " is weaker than random noise for " + to_string(task) +
                                  " at epsilon " + g17(eps));
                }
            }
        }
    }
    return out;
}

std::vector<std::string> advisory_flags(const EvaluationReport& report) {
    std::vector<std::string> out;
    const auto has = [&](Task task) {
        return std::find(report.plan.tasks.begin(), report.plan.tasks.end(), task) !=
               report.plan.tasks.end();
    };
    if (has(Task::FZC) && has(Task::FTC) && has(Task::JOINT)) {
        const double fzc = degradation_at_reference(report, Task::FZC, AttackGoal::UNTARGETED).mean;
        const double ftc = degradation_at_reference(report, Task::FTC, AttackGoal::UNTARGETED).mean;
        const double joint =
            degradation_at_reference(report, Task::JOINT, AttackGoal::UNTARGETED).mean;
        if (!(joint > ftc && ftc > fzc)) {
            out.push_back("mean untargeted degradation is not ordered joint > ftc > fzc (" +
                          g17(joint) + ", " + g17(ftc) + ", " + g17(fzc) + ")");
        }
    }
    return out;
}

// ---- JSON encoding ----

void to_json(nlohmann::json& j, const CwParams& p) {
    j = {{"confidence", p.confidence},
         {"initial_c", p.initial_c},
         {"binary_search_steps", p.binary_search_steps},
         {"max_iterations", p.max_iterations},
         {"step_size", p.step_size},
         {"tau_init", p.tau_init},
         {"tau_shrink", p.tau_shrink}};
}

void from_json(const nlohmann::json& j, CwParams& p) {
    p.confidence = j.value("confidence", CwParams{}.confidence);
    p.initial_c = j.value("initial_c", CwParams{}.initial_c);
    p.binary_search_steps = j.value("binary_search_steps", CwParams{}.binary_search_steps);
    p.max_iterations = j.value("max_iterations", CwParams{}.max_iterations);
    p.step_size = j.value("step_size", CwParams{}.step_size);
    p.tau_init = j.value("tau_init", CwParams{}.tau_init);
    p.tau_shrink = j.value("tau_shrink", CwParams{}.tau_shrink);
}

void to_json(nlohmann::json& j, const AttackTemplate& t) {
    j = {{"family", to_string(t.family)},
         {"goal", to_string(t.goal)},
         {"bim_step", t.bim_step},
         {"bim_iters", t.bim_iters},
         {"cw", t.cw},
         {"target_rule", to_string(t.target_rule)}};
}

void from_json(const nlohmann::json& j, AttackTemplate& t) {
    t.family = attack_family_from_string(j.at("family").get<std::string>());
    t.goal = attack_goal_from_string(j.value("goal", "untargeted"));
    t.bim_step = j.value("bim_step", 0.0);
    t.bim_iters = j.value("bim_iters", 10);
    t.cw = j.value("cw", CwParams{});
    t.target_rule = target_rule_from_string(j.value("target_rule", "next_class_cyclic"));
}

void to_json(nlohmann::json& j, const ExperimentPlan& plan) {
    std::vector<std::string> task_names;
    for (Task task : plan.tasks) task_names.emplace_back(to_string(task));
    j = {{"schema", kPlanSchema},
         {"tasks", task_names},
         {"attacks", plan.attacks},
         {"epsilon_grid", plan.epsilon_grid},
         {"reference_epsilon", plan.reference_epsilon},
         {"master_seed", plan.master_seed},
         {"degradation_cap", plan.degradation_cap},
         {"features_dir", plan.features_dir},
         {"models_dir", plan.models_dir}};
}

void from_json(const nlohmann::json& j, ExperimentPlan& plan) {
    const ExperimentPlan defaults;
    if (j.contains("tasks")) {
        plan.tasks.clear();
        for (const auto& name : j.at("tasks")) {
            plan.tasks.push_back(task_from_string(name.get<std::string>()));
        }
    } else {
        plan.tasks = defaults.tasks;
    }
    if (j.contains("attacks")) {
        plan.attacks = j.at("attacks").get<std::vector<AttackTemplate>>();
    } else {
        plan.attacks = default_plan(0).attacks;
    }
    plan.epsilon_grid = j.value("epsilon_grid", defaults.epsilon_grid);
    plan.reference_epsilon = j.value("reference_epsilon", defaults.reference_epsilon);
    plan.master_seed = j.value("master_seed", defaults.master_seed);
    plan.degradation_cap = j.value("degradation_cap", defaults.degradation_cap);
    plan.features_dir = j.value("features_dir", std::string{});
    plan.models_dir = j.value("models_dir", std::string{});
}

void to_json(nlohmann::json& j, const CellResult& cell) {
    j = {{"task", to_string(cell.task)},
         {"attack", to_string(cell.family)},
         {"goal", to_string(cell.goal)},
         {"epsilon", cell.epsilon},  // NaN encodes as null for CW cells
         {"accuracy", cell.accuracy},
         {"success_rate", cell.success_rate},
         {"mean_delta_l2", cell.mean_delta_l2},
         {"max_delta_linf", cell.max_delta_linf},
         {"budget_violations", cell.budget_violations},
         {"seed", cell.seed}};
}

void from_json(const nlohmann::json& j, CellResult& cell) {
    cell.task = task_from_string(j.at("task").get<std::string>());
    cell.family = attack_family_from_string(j.at("attack").get<std::string>());
    cell.goal = attack_goal_from_string(j.at("goal").get<std::string>());
    cell.epsilon = j.at("epsilon").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                             : j.at("epsilon").get<double>();
    j.at("accuracy").get_to(cell.accuracy);
    j.at("success_rate").get_to(cell.success_rate);
    j.at("mean_delta_l2").get_to(cell.mean_delta_l2);
    j.at("max_delta_linf").get_to(cell.max_delta_linf);
    j.at("budget_violations").get_to(cell.budget_violations);
    j.at("seed").get_to(cell.seed);
}

void to_json(nlohmann::json& j, const GoalDegradation& d) {
    j = {{"fgsm", d.fgsm}, {"bim", d.bim}, {"cw", d.cw}, {"mean", d.mean}};
}

void from_json(const nlohmann::json& j, GoalDegradation& d) {
    const auto get = [&j](const char* key) {
        return j.at(key).is_null() ? std::numeric_limits<double>::quiet_NaN()
                                   : j.at(key).get<double>();
    };
    d.fgsm = get("fgsm");
    d.bim = get("bim");
    d.cw = get("cw");
    d.mean = get("mean");
}

void to_json(nlohmann::json& j, const EvaluationReport& report) {
    j = {{"schema", kReportSchema},
         {"manifest",
          {{"created_at", report.created_at},
           {"master_seed", report.master_seed},
           {"dataset_checksum", report.dataset_checksum},
           {"model_refs", report.model_refs},
           {"plan", report.plan}}},
         {"base_accuracy", report.base_accuracy},
         {"cells", report.cells},
         {"degradation", report.degradation},
         {"violations", report.violations},
         {"flags", report.flags}};
}

void from_json(const nlohmann::json& j, EvaluationReport& report) {
    const nlohmann::json& manifest = j.at("manifest");
    manifest.at("created_at").get_to(report.created_at);
    manifest.at("master_seed").get_to(report.master_seed);
    manifest.at("dataset_checksum").get_to(report.dataset_checksum);
    manifest.at("model_refs").get_to(report.model_refs);
    manifest.at("plan").get_to(report.plan);
    j.at("base_accuracy").get_to(report.base_accuracy);
    j.at("cells").get_to(report.cells);
    j.at("degradation").get_to(report.degradation);
    j.at("violations").get_to(report.violations);
    j.at("flags").get_to(report.flags);
}

// ---- emission ----

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

std::string series_name(const AttackTemplate& tpl) {
    if (tpl.family == AttackFamily::RANDOM) return "random";
    return std::string(to_string(tpl.family)) + "_" + to_string(tpl.goal);
}

}  // namespace

void emit_report(const EvaluationReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    const nlohmann::json j = report;
    write_text(dir / "report.json", j.dump(2) + "\n");

    std::string csv = "task,attack,goal,epsilon,accuracy,mean_delta_l2,max_delta_linf\n";
    for (Task task : report.plan.tasks) {
        csv += std::string(to_string(task)) + ",base,none,," +
               g17(report.base_accuracy.at(to_string(task))) + ",,\n";
    }
    for (const CellResult& cell : report.cells) {
        csv += std::string(to_string(cell.task)) + "," + to_string(cell.family) + "," +
               to_string(cell.goal) + ",";
        if (!std::isnan(cell.epsilon)) csv += g17(cell.epsilon);
        csv += "," + g17(cell.accuracy) + "," + g17(cell.mean_delta_l2) + "," +
               g17(cell.max_delta_linf) + "\n";
    }
    write_text(dir / "report.csv", csv);

    for (Task task : report.plan.tasks) {
        std::string plot = "epsilon,base";
        for (const AttackTemplate& tpl : report.plan.attacks) plot += "," + series_name(tpl);
        plot += "\n";
        const double base = report.base_accuracy.at(to_string(task));
        for (double eps : report.plan.epsilon_grid) {
            plot += g17(eps) + "," + g17(base);
            for (const AttackTemplate& tpl : report.plan.attacks) {
                const CellResult* cell = find_cell(report, task, tpl.family, tpl.goal, eps);
                plot += ",";
                if (cell != nullptr) plot += g17(cell->accuracy);
            }
            plot += "\n";
        }
        write_text(dir / ("plot_" + std::string(to_string(task)) + ".csv"), plot);
    }
}

EvaluationReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("schema").get<std::string>() != kReportSchema) {
        throw std::runtime_error("unsupported report schema: " + j.at("schema").get<std::string>());
    }
    return j.get<EvaluationReport>();
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("schema") && j.at("schema").get<std::string>() != kPlanSchema) {
        throw std::runtime_error("unsupported plan schema: " + j.at("schema").get<std::string>());
    }
    ExperimentPlan plan = j.get<ExperimentPlan>();
    plan.validate();
    return plan;
}

void save_plan(const ExperimentPlan& plan, const std::filesystem::path& path) {
    const nlohmann::json j = plan;
    write_text(path, j.dump(2) + "\n");
}

void export_attack_batch(const std::vector<AdversarialExample>& examples,
                         const AttackConfig& config, const std::string& model_ref,
                         const std::filesystem::path& csv_path,
                         const std::filesystem::path& manifest_path) {
    std::string csv = "example,true_label,target_label,achieved_class,success,delta_l2,delta_linf\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const AdversarialExample& ae = examples[i];
        csv += std::to_string(i) + "," + std::to_string(ae.true_label) + "," +
               std::to_string(ae.target_label) + "," + std::to_string(ae.achieved_class) + "," +
               (ae.success ? "1" : "0") + "," + g17(ae.delta_l2) + "," + g17(ae.delta_linf) +
               "\n";
    }
    write_text(csv_path, csv);

    const nlohmann::json manifest = {
        {"schema", kAttackBatchSchema},
        {"created_at", utc_timestamp()},
        {"model_ref", model_ref},
        {"count", examples.size()},
        {"config",
         {{"family", to_string(config.family)},
          {"goal", to_string(config.goal)},
          {"epsilon", config.epsilon},
          {"bim_step", config.bim_step},
          {"bim_iters", config.bim_iters},
          {"cw", config.cw},
          {"target_rule", to_string(config.target_rule)},
          {"explicit_target", config.explicit_target},
          {"seed", config.seed}}},
    };
    write_text(manifest_path, manifest.dump(2) + "\n");
}

}  // namespace gridattack
