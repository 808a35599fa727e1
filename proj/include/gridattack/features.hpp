#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridattack/waveform.hpp"

namespace gridattack {

inline constexpr int kFeatureDim = 48;                        // 6 time + 6 DFT + 6x6 DWT
inline constexpr int kSuperDim = kFeatureDim * kNumLocations; // 192

/// 48 features of one measured waveform, ordered
/// [time stats | DFT stats | cA5 | cD5 | cD4 | cD3 | cD2 | cD1 stats],
/// each block the six aggregate_stats values.
struct FeatureVector {
    std::array<double, kFeatureDim> values{};
    FaultSpec source;
};

/// Model input: the four locations' feature vectors stacked in location
/// order, with the three task labels (all 1-based).
struct SuperVector {
    std::array<double, kSuperDim> values{};
    int label_zone = 0;   // 1..4
    int label_type = 0;   // 1..11
    int label_joint = 0;  // (zone-1)*11 + type, 1..44
};

/// Per-dimension z-score parameters fit on the training split. Dimensions
/// with zero variance are flagged and passed through unscaled (std 1).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<int> constant_dims;

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> inverse(std::span<const double> z) const;
    void apply_rows(Eigen::MatrixXd& rows) const;
};

/// Single composite channel of a three-phase record: the per-sample mean of
/// the three phase magnitudes.
std::vector<double> composite_series(const ThreePhaseWaveform& wf);

FeatureVector extract_features(const ThreePhaseWaveform& wf);

/// Groups the dataset by (zone, type, resistance), checks all four locations
/// are present exactly once, and emits one supervector per group in
/// canonical (zone, type, resistance) order regardless of input order.
/// Throws std::runtime_error on a missing or duplicated location record.
std::vector<SuperVector> build_supervectors(const WaveformDataset& dataset);

Standardizer fit_standardizer(const Eigen::MatrixXd& train_rows);

/// Name of each of the 192 supervector dimensions,
/// e.g. "loc2_dft_energy", "loc4_dwt_cd3_kurtosis".
std::vector<std::string> feature_names();

/// Supervector values as a (count x 192) matrix plus per-task label columns.
Eigen::MatrixXd supervector_matrix(const std::vector<SuperVector>& svs);

struct Split {
    std::vector<int> train_rows;
    std::vector<int> test_rows;
};

/// Deterministic stratified split on the joint label; each class keeps
/// round(n * (1 - train_fraction)) test rows, at least one row on each side.
Split stratified_split(const std::vector<SuperVector>& svs, double train_fraction,
                       std::uint64_t seed);

}  // namespace gridattack
