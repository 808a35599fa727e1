#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridattack/features.hpp"
#include "gridattack/waveform.hpp"

namespace gridattack {

// On-disk schema tags. Bump on any layout change.
inline constexpr const char* kDatasetSchema = "gridattack.dataset/1";
inline constexpr const char* kFeaturesSchema = "gridattack.features/1";

enum class DatasetFormat { BINARY, CSV };

DatasetFormat dataset_format_from_string(std::string_view name);
const char* to_string(DatasetFormat format);

/// Current time as an ISO 8601 UTC string. Only manifests may contain it;
/// every other emitted byte must be a pure function of config and seed.
std::string utc_timestamp();

/// FNV-1a over the file's bytes, formatted "fnv1a:" + 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

/// FNV-1a over the standardizer's canonical JSON encoding, same format as
/// file_checksum. Model checkpoints store this to bind a model to the
/// feature scaling it was trained under.
std::string standardizer_checksum(const Standardizer& s);

/// Writes a dataset directory: manifest.json plus records.bin (columnar
/// binary, the default) or records.csv. Returns the records-file checksum,
/// which is also recorded in the manifest.
///
/// records.bin: little-endian arrays in record order, one per field:
/// u32 zone[N], u32 type_label[N], u32 resistance_index[N],
/// u32 location[N], u64 seed[N], then f64 phase_a[N*S], phase_b[N*S],
/// phase_c[N*S] with each record's S samples contiguous.
///
/// records.csv: header zone,fault_type,resistance,location,a_0..a_{S-1},
/// b_0..,c_0..; %.17g values (exact double round-trip). Record seeds are
/// not a column; they are re-derived from the manifest's master seed.
std::string export_dataset(const WaveformDataset& dataset, const std::filesystem::path& dir,
                           DatasetFormat format = DatasetFormat::BINARY);

/// Reads a directory written by export_dataset, either format. Throws
/// std::runtime_error on schema/layout mismatch.
WaveformDataset load_dataset(const std::filesystem::path& dir);

/// The extract stage's product: raw supervectors plus the train/test split
/// and the standardizer fit on the training rows.
struct FeatureTable {
    std::vector<SuperVector> supervectors;
    Split split;
    Standardizer standardizer;
    std::string dataset_checksum;
    std::uint64_t split_seed = 0;
    double train_fraction = 0.8;
};

/// Writes features.csv (192 raw feature columns + label_zone, label_type,
/// label_joint; %.17g) and features.json (schema, standardizer, split,
/// feature names, dataset checksum).
void export_features(const FeatureTable& table, const std::filesystem::path& dir);

FeatureTable load_features(const std::filesystem::path& dir);

}  // namespace gridattack
