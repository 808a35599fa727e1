#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridattack/constants.hpp"

namespace gridattack {

/// The 11 short-circuit fault types, in canonical label order (1..11).
enum class FaultType {
    AG,
    BG,
    CG,
    AB,
    AC,
    BC,
    ABG,
    ACG,
    BCG,
    ABC,
    ABCG,
};

inline constexpr int kNumFaultTypes = 11;

const char* to_string(FaultType type);
FaultType fault_type_from_string(std::string_view name);

/// 1-based label of a fault type (AG=1 .. ABCG=11).
int fault_type_label(FaultType type);
FaultType fault_type_from_label(int label);

struct PhaseSet {
    bool a = false;
    bool b = false;
    bool c = false;

    bool operator==(const PhaseSet&) const = default;
    bool contains(int phase) const { return phase == 0 ? a : (phase == 1 ? b : c); }
    int count() const { return (a ? 1 : 0) + (b ? 1 : 0) + (c ? 1 : 0); }
};

/// Phases named in the fault-type code. Ground involvement adds no phase:
/// ABG -> {A,B}, ABCG -> {A,B,C}.
PhaseSet affected_phases(FaultType type);

/// True for AG/BG/CG/ABG/ACG/BCG/ABCG.
bool involves_ground(FaultType type);

/// Parameters of one simulated fault event.
struct FaultSpec {
    FaultType fault_type = FaultType::AG;
    int zone = 1;                   // 1..4
    double resistance = 0.0010;     // one of kFaultResistances
    int measurement_location = 1;   // 1..4
    std::uint64_t rng_seed = 0;

    /// Throws std::invalid_argument when any field is outside its domain.
    void validate() const;
};

struct SimulationTiming {
    double t_start = 0.0;
    double t_end = 0.022;
    double sample_period = 1e-5;
    double frequency = 60.0;
    double fault_on = 0.01;
    double fault_off = 0.02;

    int sample_count() const;
    /// Throws std::invalid_argument when the fault window does not fit the
    /// simulated interval or the step/frequency is non-positive.
    void validate() const;
};

/// Knobs of the parametric surrogate that stands in for a circuit simulation.
/// Defaults reproduce the committed calibration in constants.hpp.
struct SurrogateParams {
    double noise_std = kDefaultNoiseStd;
    double m_min = kMinSagMultiplier;
    double transient_amplitude = kTransientAmplitude;
    double transient_tau = kTransientTau;
    double transient_freq = kTransientFreq;
    std::array<std::array<double, 4>, 4> coupling = kZoneCoupling;
};

/// One fault event's sampled three-phase voltage signal (per-unit).
struct ThreePhaseWaveform {
    std::vector<double> phase_a;
    std::vector<double> phase_b;
    std::vector<double> phase_c;
    FaultSpec spec;
    SimulationTiming timing;

    const std::vector<double>& phase(int p) const {
        return p == 0 ? phase_a : (p == 1 ? phase_b : phase_c);
    }
};

struct DatasetConfig {
    std::uint64_t master_seed = 0;
    SimulationTiming timing{};
    SurrogateParams surrogate{};
};

struct WaveformDataset {
    std::vector<ThreePhaseWaveform> records;
    DatasetConfig config;
};

/// Index of a resistance in kFaultResistances; throws std::invalid_argument
/// for values not in the table.
int resistance_index(double resistance);

/// Maps resistance onto [0, 1]: affine in log R between the smallest and
/// largest table resistances, clamped outside.
double sag_sigma(double resistance);

/// Per-phase voltage multipliers {A, B, C} applied during the fault window.
///
/// Affected phases sag to m = 1 - coupling(zone, location) * (1 - m_min) *
/// (1 - sag_sigma(R)), which on the diagonal (measuring in the faulted zone)
/// reduces to m_min + (1 - m_min) * sag_sigma(R) and is strictly increasing
/// in R everywhere. Unaffected phases get a deterministic load-variation
/// factor inside [1 - kHealthyWobble, 1 + kHealthyWobble].
std::array<double, 3> sag_multiplier(FaultType type, int zone, int measurement_location,
                                     double resistance, const SurrogateParams& params = {});

/// Synthesizes one record: nominal sinusoids (phase shifts 0, -120, +120
/// degrees) scaled by the sag multipliers during [fault_on, fault_off), plus
/// a decaying 600 Hz transient at fault inception on the affected phases of
/// ground-involving faults, plus seeded Gaussian measurement noise.
ThreePhaseWaveform generate_waveform(const FaultSpec& spec, const SimulationTiming& timing = {},
                                     const SurrogateParams& params = {});

inline constexpr int kDatasetSize = kNumZones * kNumFaultTypes * 22 * kNumLocations;  // 3872

/// Row index of (zone, type, resistance, location) in the canonical
/// zone-major enumeration of the full Cartesian product.
int dataset_record_index(int zone, int type_label, int resistance_index, int location);

/// Per-record generation seed derived from the dataset master seed.
std::uint64_t record_seed(std::uint64_t master_seed, int record_index);

/// Generates the full 4 x 11 x 22 x 4 = 3872-record dataset in canonical
/// order, one record per tuple, with per-record seeds derived from the
/// master seed.
WaveformDataset generate_dataset(const DatasetConfig& config = {});

}  // namespace gridattack
