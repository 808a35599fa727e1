#pragma once

#include <array>

namespace gridattack {

// Calibration constants for the surrogate waveform generator. Bumping any
// value here changes generated datasets, so the set is versioned and the
// version string is recorded in every dataset manifest.
inline constexpr const char* kSurrogateVersion = "surrogate/1";

/// The 22 fault resistance values (ohms) a fault can be injected with.
inline constexpr std::array<double, 22> kFaultResistances = {
    0.0010, 0.0273, 0.0535, 0.0798, 0.1061, 0.1323, 0.1586, 0.1848,
    0.2111, 0.2374, 0.2636, 0.2899, 0.3162, 0.3424, 0.3687, 0.3949,
    0.4212, 0.4475, 0.4737, 0.5,    1.0,    2.0};

inline constexpr int kNumZones = 4;
inline constexpr int kNumLocations = 4;

// Zone-to-measurement-bus attenuation of the voltage sag. coupling[z][l]
// scales the sag depth that a fault in zone z+1 produces at measurement
// location l+1: 1.0 on the diagonal (deepest sag at the faulted zone's own
// bus), off-diagonal values in (0,1) falling off with electrical distance
// between the zone branch and the bus.
//
// Zone branches 632-671 / 632-633 / 692-675 / 671-680 are observed at buses
// 671 / 633 / 675 / 680 respectively; zones 1 and 4 share bus 671 as an
// endpoint, zone 3 hangs off 671 through the 671-692 switch, and zone 2 sits
// across the 632 junction from everything else.
inline constexpr std::array<std::array<double, 4>, 4> kZoneCoupling = {{
    {1.00, 0.52, 0.68, 0.74},
    {0.58, 1.00, 0.44, 0.40},
    {0.70, 0.38, 1.00, 0.56},
    {0.76, 0.34, 0.54, 1.00},
}};

/// Floor of the sag multiplier: a bolted fault at the faulted bus drops the
/// affected phase voltages to this fraction of nominal.
inline constexpr double kMinSagMultiplier = 0.1;

/// Unaffected phases wobble inside [1 - kHealthyWobble, 1 + kHealthyWobble]
/// during the fault window (deterministic per record).
inline constexpr double kHealthyWobble = 0.01;

/// Default standard deviation (per-unit) of the additive measurement noise.
inline constexpr double kDefaultNoiseStd = 0.01;

// Ground-involving faults superimpose a decaying oscillation at fault
// inception; these are its amplitude (p.u.), time constant (s) and
// oscillation frequency (Hz).
inline constexpr double kTransientAmplitude = 0.2;
inline constexpr double kTransientTau = 0.002;
inline constexpr double kTransientFreq = 600.0;

}  // namespace gridattack
