#include "gridattack/json_io.hpp"

namespace gridattack {

void to_json(nlohmann::json& j, const SimulationTiming& t) {
    j = {{"t_start", t.t_start},   {"t_end", t.t_end},       {"sample_period", t.sample_period},
         {"frequency", t.frequency}, {"fault_on", t.fault_on}, {"fault_off", t.fault_off}};
}

void from_json(const nlohmann::json& j, SimulationTiming& t) {
    j.at("t_start").get_to(t.t_start);
    j.at("t_end").get_to(t.t_end);
    j.at("sample_period").get_to(t.sample_period);
    j.at("frequency").get_to(t.frequency);
    j.at("fault_on").get_to(t.fault_on);
    j.at("fault_off").get_to(t.fault_off);
}

void to_json(nlohmann::json& j, const SurrogateParams& p) {
    j = {{"noise_std", p.noise_std},
         {"m_min", p.m_min},
         {"transient_amplitude", p.transient_amplitude},
         {"transient_tau", p.transient_tau},
         {"transient_freq", p.transient_freq},
         {"coupling", p.coupling}};
}

void from_json(const nlohmann::json& j, SurrogateParams& p) {
    j.at("noise_std").get_to(p.noise_std);
    j.at("m_min").get_to(p.m_min);
    j.at("transient_amplitude").get_to(p.transient_amplitude);
    j.at("transient_tau").get_to(p.transient_tau);
    j.at("transient_freq").get_to(p.transient_freq);
    j.at("coupling").get_to(p.coupling);
}

void to_json(nlohmann::json& j, const DatasetConfig& c) {
    j = {{"master_seed", c.master_seed}, {"timing", c.timing}, {"surrogate", c.surrogate}};
}

void from_json(const nlohmann::json& j, DatasetConfig& c) {
    j.at("master_seed").get_to(c.master_seed);
    j.at("timing").get_to(c.timing);
    j.at("surrogate").get_to(c.surrogate);
}

void to_json(nlohmann::json& j, const Standardizer& s) {
    j = {{"mean", s.mean}, {"stddev", s.stddev}, {"constant_dims", s.constant_dims}};
}

void from_json(const nlohmann::json& j, Standardizer& s) {
    j.at("mean").get_to(s.mean);
    j.at("stddev").get_to(s.stddev);
    j.at("constant_dims").get_to(s.constant_dims);
}

void to_json(nlohmann::json& j, const Split& s) {
    j = {{"train_rows", s.train_rows}, {"test_rows", s.test_rows}};
}

void from_json(const nlohmann::json& j, Split& s) {
    j.at("train_rows").get_to(s.train_rows);
    j.at("test_rows").get_to(s.test_rows);
}

}  // namespace gridattack
