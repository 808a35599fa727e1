#include "gridattack/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "gridattack/dft.hpp"
#include "gridattack/dwt.hpp"
#include "gridattack/rng.hpp"
#include "gridattack/stats.hpp"

namespace gridattack {

namespace {

constexpr int kStatsPerBlock = 6;
constexpr int kDwtLevels = 5;
constexpr int kGroupCount = kNumZones * kNumFaultTypes * 22;  // 968

const char* const kBlockNames[] = {"time",    "dft",     "dwt_ca5", "dwt_cd5",
                                   "dwt_cd4", "dwt_cd3", "dwt_cd2", "dwt_cd1"};
const char* const kStatNames[] = {"energy", "absmax", "mean", "l2norm", "skewness", "kurtosis"};

int group_index(const FaultSpec& spec) {
    const int type = fault_type_label(spec.fault_type);
    return ((spec.zone - 1) * kNumFaultTypes + (type - 1)) * 22 + resistance_index(spec.resistance);
}

}  // namespace

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (x.size() != mean.size()) {
        throw std::invalid_argument("standardizer dimension mismatch: " + std::to_string(x.size()) +
                                    " vs " + std::to_string(mean.size()));
    }
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = (x[i] - mean[i]) / stddev[i];
    }
    return z;
}

std::vector<double> Standardizer::inverse(std::span<const double> z) const {
    if (z.size() != mean.size()) {
        throw std::invalid_argument("standardizer dimension mismatch: " + std::to_string(z.size()) +
                                    " vs " + std::to_string(mean.size()));
    }
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        x[i] = z[i] * stddev[i] + mean[i];
    }
    return x;
}

void Standardizer::apply_rows(Eigen::MatrixXd& rows) const {
    if (rows.cols() != static_cast<Eigen::Index>(mean.size())) {
        throw std::invalid_argument("standardizer dimension mismatch: " +
                                    std::to_string(rows.cols()) + " vs " +
                                    std::to_string(mean.size()));
    }
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        rows.col(j) = (rows.col(j).array() - mean[static_cast<std::size_t>(j)]) /
                      stddev[static_cast<std::size_t>(j)];
    }
}

std::vector<double> composite_series(const ThreePhaseWaveform& wf) {
    const std::size_t n = wf.phase_a.size();
    if (n == 0 || wf.phase_b.size() != n || wf.phase_c.size() != n) {
        throw std::invalid_argument("waveform phases must be non-empty and equal-length");
    }
    std::vector<double> composite(n);
    for (std::size_t i = 0; i < n; ++i) {
        composite[i] =
            (std::abs(wf.phase_a[i]) + std::abs(wf.phase_b[i]) + std::abs(wf.phase_c[i])) / 3.0;
    }
    return composite;
}

FeatureVector extract_features(const ThreePhaseWaveform& wf) {
    FeatureVector fv;
    fv.source = wf.spec;

    const std::vector<double> composite = composite_series(wf);
    const std::vector<double> spectrum = dft_magnitudes(composite);
    const std::vector<std::vector<double>> bands = dwt_subbands(composite, kDwtLevels);

    auto put = [&fv](int block, const std::array<double, 6>& stats) {
        std::copy(stats.begin(), stats.end(), fv.values.begin() + block * kStatsPerBlock);
    };
    put(0, aggregate_stats(composite));
    put(1, aggregate_stats(spectrum));
    for (std::size_t b = 0; b < bands.size(); ++b) {
        put(2 + static_cast<int>(b), aggregate_stats(bands[b]));
    }
    return fv;
}

std::vector<SuperVector> build_supervectors(const WaveformDataset& dataset) {
    // slots[group][location-1] = record index, canonical (zone, type, R) order.
    std::vector<std::array<int, kNumLocations>> slots(
        kGroupCount, std::array<int, kNumLocations>{-1, -1, -1, -1});
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const FaultSpec& spec = dataset.records[i].spec;
        spec.validate();
        int& slot = slots[static_cast<std::size_t>(group_index(spec))]
                         [static_cast<std::size_t>(spec.measurement_location - 1)];
        if (slot != -1) {
            throw std::runtime_error(
                "duplicate record: zone " + std::to_string(spec.zone) + ", type " +
                to_string(spec.fault_type) + ", R " + std::to_string(spec.resistance) +
                ", location " + std::to_string(spec.measurement_location));
        }
        slot = static_cast<int>(i);
    }

    std::vector<SuperVector> svs(kGroupCount);
    for (int g = 0; g < kGroupCount; ++g) {
        SuperVector& sv = svs[static_cast<std::size_t>(g)];
        sv.label_zone = g / (kNumFaultTypes * 22) + 1;
        sv.label_type = (g / 22) % kNumFaultTypes + 1;
        sv.label_joint = (sv.label_zone - 1) * kNumFaultTypes + sv.label_type;
        for (int loc = 0; loc < kNumLocations; ++loc) {
            const int rec = slots[static_cast<std::size_t>(g)][static_cast<std::size_t>(loc)];
            if (rec == -1) {
                throw std::runtime_error(
                    "missing record: zone " + std::to_string(sv.label_zone) + ", type label " +
                    std::to_string(sv.label_type) + ", location " + std::to_string(loc + 1));
            }
            const FeatureVector fv = extract_features(dataset.records[static_cast<std::size_t>(rec)]);
            std::copy(fv.values.begin(), fv.values.end(),
                      sv.values.begin() + loc * kFeatureDim);
        }
    }
    return svs;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& train_rows) {
    if (train_rows.rows() < 2) {
        throw std::invalid_argument("standardizer needs at least two training rows");
    }
    const auto d = static_cast<std::size_t>(train_rows.cols());
    Standardizer st;
    st.mean.resize(d);
    st.stddev.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto col = train_rows.col(static_cast<Eigen::Index>(j));
        const double mu = col.mean();
        const double sd = std::sqrt((col.array() - mu).square().mean());
        st.mean[j] = mu;
        if (sd <= 1e-12 * std::max(1.0, std::abs(mu))) {
            st.stddev[j] = 1.0;  // constant dimension: pass through centered
            st.constant_dims.push_back(static_cast<int>(j));
        } else {
            st.stddev[j] = sd;
        }
    }
    return st;
}

std::vector<std::string> feature_names() {
    std::vector<std::string> names;
    names.reserve(kSuperDim);
    for (int loc = 1; loc <= kNumLocations; ++loc) {
        for (const char* block : kBlockNames) {
            for (const char* stat : kStatNames) {
                names.push_back("loc" + std::to_string(loc) + "_" + block + "_" + stat);
            }
        }
    }
    return names;
}

Eigen::MatrixXd supervector_matrix(const std::vector<SuperVector>& svs) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(svs.size()), kSuperDim);
    for (std::size_t i = 0; i < svs.size(); ++i) {
        for (int j = 0; j < kSuperDim; ++j) {
            m(static_cast<Eigen::Index>(i), j) = svs[i].values[static_cast<std::size_t>(j)];
        }
    }
    return m;
}

Split stratified_split(const std::vector<SuperVector>& svs, double train_fraction,
                       std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
    }
    std::array<std::vector<int>, kNumZones * kNumFaultTypes> by_class;
    for (std::size_t i = 0; i < svs.size(); ++i) {
        const int joint = svs[i].label_joint;
        if (joint < 1 || joint > kNumZones * kNumFaultTypes) {
            throw std::invalid_argument("joint label out of range: " + std::to_string(joint));
        }
        by_class[static_cast<std::size_t>(joint - 1)].push_back(static_cast<int>(i));
    }

    Split split;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::vector<int>& rows = by_class[c];
        if (rows.empty()) {
            continue;
        }
        if (rows.size() < 2) {
            throw std::runtime_error("cannot split class " + std::to_string(c + 1) +
                                     " with a single row");
        }
        SplitMix64 rng(derive_seed(seed, c + 1));  // salt = joint label
        shuffle(rows, rng);
        const auto n = static_cast<long>(rows.size());
        long n_test = std::lround(static_cast<double>(n) * (1.0 - train_fraction));
        n_test = std::clamp(n_test, 1L, n - 1);
        split.test_rows.insert(split.test_rows.end(), rows.begin(), rows.begin() + n_test);
        split.train_rows.insert(split.train_rows.end(), rows.begin() + n_test, rows.end());
    }
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());
    return split;
}

}  // namespace gridattack
