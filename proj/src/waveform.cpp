#include "gridattack/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridattack/rng.hpp"

namespace gridattack {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr const char* kFaultTypeNames[kNumFaultTypes] = {
    "AG", "BG", "CG", "AB", "AC", "BC", "ABG", "ACG", "BCG", "ABC", "ABCG"};

}  // namespace

const char* to_string(FaultType type) { return kFaultTypeNames[static_cast<int>(type)]; }

FaultType fault_type_from_string(std::string_view name) {
    for (int i = 0; i < kNumFaultTypes; ++i) {
        if (name == kFaultTypeNames[i]) return static_cast<FaultType>(i);
    }
    throw std::invalid_argument("unknown fault type: " + std::string(name));
}

int fault_type_label(FaultType type) { return static_cast<int>(type) + 1; }

FaultType fault_type_from_label(int label) {
    if (label < 1 || label > kNumFaultTypes) {
        throw std::invalid_argument("fault type label out of range: " + std::to_string(label));
    }
    return static_cast<FaultType>(label - 1);
}

PhaseSet affected_phases(FaultType type) {
    PhaseSet set;
    const std::string_view code = to_string(type);
    for (char ch : code) {
        if (ch == 'A') set.a = true;
        if (ch == 'B') set.b = true;
        if (ch == 'C') set.c = true;
    }
    return set;
}

bool involves_ground(FaultType type) {
    const std::string_view code = to_string(type);
    return code.back() == 'G';
}

void FaultSpec::validate() const {
    if (zone < 1 || zone > kNumZones) {
        throw std::invalid_argument("fault zone out of range: " + std::to_string(zone));
    }
    if (measurement_location < 1 || measurement_location > kNumLocations) {
        throw std::invalid_argument("measurement location out of range: " +
                                    std::to_string(measurement_location));
    }
    resistance_index(resistance);
}

int resistance_index(double resistance) {
    const auto it = std::find(kFaultResistances.begin(), kFaultResistances.end(), resistance);
    if (it == kFaultResistances.end()) {
        throw std::invalid_argument("fault resistance not in the 22-value table: " +
                                    std::to_string(resistance));
    }
    return static_cast<int>(it - kFaultResistances.begin());
}

int SimulationTiming::sample_count() const {
    return static_cast<int>(std::lround((t_end - t_start) / sample_period));
}

void SimulationTiming::validate() const {
    if (sample_period <= 0.0 || frequency <= 0.0) {
        throw std::invalid_argument("sample period and frequency must be positive");
    }
    if (t_end <= t_start) {
        throw std::invalid_argument("empty simulation interval");
    }
    if (fault_on < t_start || fault_off < fault_on || fault_off > t_end) {
        throw std::invalid_argument("fault window outside the simulated interval");
    }
}

double sag_sigma(double resistance) {
    const double lo = std::log(kFaultResistances.front());
    const double hi = std::log(kFaultResistances.back());
    const double s = (std::log(resistance) - lo) / (hi - lo);
    return std::clamp(s, 0.0, 1.0);
}

std::array<double, 3> sag_multiplier(FaultType type, int zone, int measurement_location,
                                     double resistance, const SurrogateParams& params) {
    const PhaseSet affected = affected_phases(type);
    const double coupling = params.coupling[zone - 1][measurement_location - 1];
    const double sagged = 1.0 - coupling * (1.0 - params.m_min) * (1.0 - sag_sigma(resistance));

    std::array<double, 3> mult{};
    for (int p = 0; p < 3; ++p) {
        if (affected.contains(p)) {
            mult[p] = sagged;
        } else {
            // deterministic load variation, a pure function of the tuple
            const std::uint64_t h = hash_tag(to_string(type)) ^
                                    (static_cast<std::uint64_t>(zone) << 8) ^
                                    (static_cast<std::uint64_t>(measurement_location) << 16) ^
                                    (static_cast<std::uint64_t>(p) << 24);
            SplitMix64 rng(h);
            mult[p] = 1.0 + kHealthyWobble * (2.0 * rng.next_double() - 1.0);
        }
    }
    return mult;
}

ThreePhaseWaveform generate_waveform(const FaultSpec& spec, const SimulationTiming& timing,
                                     const SurrogateParams& params) {
    spec.validate();
    timing.validate();

    const int n = timing.sample_count();
    const bool has_fault = timing.fault_off > timing.fault_on;
    const bool transient = has_fault && involves_ground(spec.fault_type);
    const PhaseSet affected = affected_phases(spec.fault_type);
    const std::array<double, 3> mult = sag_multiplier(
        spec.fault_type, spec.zone, spec.measurement_location, spec.resistance, params);
    const double phase_shift[3] = {0.0, -2.0 * kPi / 3.0, 2.0 * kPi / 3.0};
    const double omega = 2.0 * kPi * timing.frequency;
    const double omega_tr = 2.0 * kPi * params.transient_freq;

    ThreePhaseWaveform wf;
    wf.spec = spec;
    wf.timing = timing;
    for (int p = 0; p < 3; ++p) {
        std::vector<double>& series = p == 0 ? wf.phase_a : (p == 1 ? wf.phase_b : wf.phase_c);
        series.resize(n);
        GaussianGen noise(derive_seed(spec.rng_seed, static_cast<std::uint64_t>(p)));
        for (int i = 0; i < n; ++i) {
            const double t = timing.t_start + i * timing.sample_period;
            double v = std::sin(omega * t + phase_shift[p]);
            if (has_fault && t >= timing.fault_on && t < timing.fault_off) {
                v *= mult[p];
            }
            if (transient && affected.contains(p) && t >= timing.fault_on) {
                const double dt = t - timing.fault_on;
                v += params.transient_amplitude * std::exp(-dt / params.transient_tau) *
                     std::sin(omega_tr * dt);
            }
            if (params.noise_std > 0.0) {
                v += params.noise_std * noise.next();
            }
            series[i] = v;
        }
    }
    return wf;
}

int dataset_record_index(int zone, int type_label, int resistance_index, int location) {
    return ((zone - 1) * kNumFaultTypes + (type_label - 1)) * 22 * kNumLocations +
           resistance_index * kNumLocations + (location - 1);
}

std::uint64_t record_seed(std::uint64_t master_seed, int record_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(record_index));
}

WaveformDataset generate_dataset(const DatasetConfig& config) {
    WaveformDataset ds;
    ds.config = config;
    ds.records.reserve(kDatasetSize);
    int index = 0;
    for (int zone = 1; zone <= kNumZones; ++zone) {
        for (int type = 1; type <= kNumFaultTypes; ++type) {
            for (int r = 0; r < 22; ++r) {
                for (int loc = 1; loc <= kNumLocations; ++loc, ++index) {
                    FaultSpec spec;
                    spec.fault_type = fault_type_from_label(type);
                    spec.zone = zone;
                    spec.resistance = kFaultResistances[static_cast<std::size_t>(r)];
                    spec.measurement_location = loc;
                    spec.rng_seed = record_seed(config.master_seed, index);
                    ds.records.push_back(generate_waveform(spec, config.timing, config.surrogate));
                }
            }
        }
    }
    return ds;
}

}  // namespace gridattack
