#include "gridattack/dataset_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "gridattack/json_io.hpp"
#include "gridattack/rng.hpp"

namespace fs = std::filesystem;

namespace gridattack {

namespace {

void append_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

void append_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

void append_f64(std::string& buf, double v) { append_u64(buf, std::bit_cast<std::uint64_t>(v)); }

void append_g17(std::string& buf, double v) {
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%.17g", v);
    buf += tmp;
}

// Cursor over a loaded binary blob; throws instead of reading past the end.
struct ByteReader {
    const std::string& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) {
            throw std::runtime_error("dataset file truncated");
        }
    }
    std::uint32_t read_u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        }
        pos += 4;
        return v;
    }
    std::uint64_t read_u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        }
        pos += 8;
        return v;
    }
    double read_f64() { return std::bit_cast<double>(read_u64()); }
};

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::string slurp(const fs::path& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

nlohmann::json load_json(const fs::path& path) {
    return nlohmann::json::parse(slurp(path));
}

void write_records_binary(const WaveformDataset& dataset, const fs::path& path) {
    std::ofstream out = open_out(path, std::ios::binary);
    std::string buf;
    auto flush = [&] {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
    };
    for (const auto& rec : dataset.records) append_u32(buf, static_cast<std::uint32_t>(rec.spec.zone));
    for (const auto& rec : dataset.records) {
        append_u32(buf, static_cast<std::uint32_t>(fault_type_label(rec.spec.fault_type)));
    }
    for (const auto& rec : dataset.records) {
        append_u32(buf, static_cast<std::uint32_t>(resistance_index(rec.spec.resistance)));
    }
    for (const auto& rec : dataset.records) {
        append_u32(buf, static_cast<std::uint32_t>(rec.spec.measurement_location));
    }
    for (const auto& rec : dataset.records) append_u64(buf, rec.spec.rng_seed);
    flush();
    for (int p = 0; p < 3; ++p) {
        for (const auto& rec : dataset.records) {
            for (double v : rec.phase(p)) append_f64(buf, v);
            flush();
        }
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

void write_records_csv(const WaveformDataset& dataset, const fs::path& path, int samples) {
    std::ofstream out = open_out(path);
    std::string buf = "zone,fault_type,resistance,location";
    const char* phases[] = {"a", "b", "c"};
    for (const char* p : phases) {
        for (int i = 0; i < samples; ++i) {
            buf += ",";
            buf += p;
            buf += "_";
            buf += std::to_string(i);
        }
    }
    buf += "\n";
    for (const auto& rec : dataset.records) {
        buf += std::to_string(rec.spec.zone);
        buf += ",";
        buf += to_string(rec.spec.fault_type);
        buf += ",";
        append_g17(buf, rec.spec.resistance);
        buf += ",";
        buf += std::to_string(rec.spec.measurement_location);
        for (int p = 0; p < 3; ++p) {
            for (double v : rec.phase(p)) {
                buf += ",";
                append_g17(buf, v);
            }
        }
        buf += "\n";
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

WaveformDataset load_records_binary(const fs::path& path, const DatasetConfig& config,
                                    std::size_t count, int samples) {
    const std::string bytes = slurp(path, std::ios::binary);
    const std::size_t expected =
        count * (4 * 4 + 8) + 3 * count * static_cast<std::size_t>(samples) * 8;
    if (bytes.size() != expected) {
        throw std::runtime_error("unexpected size of " + path.string() + ": " +
                                 std::to_string(bytes.size()) + " bytes, manifest implies " +
                                 std::to_string(expected));
    }
    ByteReader in{bytes};
    WaveformDataset dataset;
    dataset.config = config;
    dataset.records.resize(count);
    for (auto& rec : dataset.records) {
        rec.timing = config.timing;
        rec.spec.zone = static_cast<int>(in.read_u32());
    }
    for (auto& rec : dataset.records) {
        rec.spec.fault_type = fault_type_from_label(static_cast<int>(in.read_u32()));
    }
    for (auto& rec : dataset.records) {
        rec.spec.resistance = kFaultResistances.at(in.read_u32());
    }
    for (auto& rec : dataset.records) {
        rec.spec.measurement_location = static_cast<int>(in.read_u32());
    }
    for (auto& rec : dataset.records) rec.spec.rng_seed = in.read_u64();
    for (int p = 0; p < 3; ++p) {
        for (auto& rec : dataset.records) {
            auto& phase = p == 0 ? rec.phase_a : (p == 1 ? rec.phase_b : rec.phase_c);
            phase.resize(static_cast<std::size_t>(samples));
            for (double& v : phase) v = in.read_f64();
        }
    }
    return dataset;
}

WaveformDataset load_records_csv(const fs::path& path, const DatasetConfig& config, int samples) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("zone,fault_type,resistance,location", 0) != 0) {
        throw std::runtime_error("bad header in " + path.string());
    }
    WaveformDataset dataset;
    dataset.config = config;
    const std::size_t n = static_cast<std::size_t>(samples);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ThreePhaseWaveform rec;
        rec.timing = config.timing;
        const char* p = line.c_str();
        char* end = nullptr;
        rec.spec.zone = static_cast<int>(std::strtol(p, &end, 10));
        p = end + 1;
        const char* comma = std::strchr(p, ',');
        if (comma == nullptr) {
            throw std::runtime_error("short row in " + path.string());
        }
        rec.spec.fault_type = fault_type_from_string(std::string_view(p, comma - p));
        p = comma + 1;
        rec.spec.resistance = std::strtod(p, &end);
        p = end + 1;
        rec.spec.measurement_location = static_cast<int>(std::strtol(p, &end, 10));
        p = end;
        for (auto* phase : {&rec.phase_a, &rec.phase_b, &rec.phase_c}) {
            phase->resize(n);
            for (double& v : *phase) {
                if (*p != ',') {
                    throw std::runtime_error("short row in " + path.string());
                }
                v = std::strtod(p + 1, &end);
                p = end;
            }
        }
        if (*p != '\0') {
            throw std::runtime_error("trailing fields in " + path.string());
        }
        rec.spec.rng_seed = record_seed(
            config.master_seed,
            dataset_record_index(rec.spec.zone, fault_type_label(rec.spec.fault_type),
                                 resistance_index(rec.spec.resistance),
                                 rec.spec.measurement_location));
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

}  // namespace

DatasetFormat dataset_format_from_string(std::string_view name) {
    if (name == "binary") return DatasetFormat::BINARY;
    if (name == "csv") return DatasetFormat::CSV;
    throw std::invalid_argument("unknown dataset format: " + std::string(name));
}

const char* to_string(DatasetFormat format) {
    return format == DatasetFormat::BINARY ? "binary" : "csv";
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 20);
    while (in.read(buf.data(), static_cast<std::streamsize>(buf.size())) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string standardizer_checksum(const Standardizer& s) {
    const nlohmann::json j = s;
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a:%016llx",
                  static_cast<unsigned long long>(hash_tag(j.dump())));
    return out;
}

std::string export_dataset(const WaveformDataset& dataset, const fs::path& dir,
                           DatasetFormat format) {
    if (dataset.records.empty()) {
        throw std::invalid_argument("refusing to export an empty dataset");
    }
    const int samples = dataset.config.timing.sample_count();
    for (const auto& rec : dataset.records) {
        rec.spec.validate();
        if (static_cast<int>(rec.phase_a.size()) != samples ||
            rec.phase_b.size() != rec.phase_a.size() || rec.phase_c.size() != rec.phase_a.size()) {
            throw std::invalid_argument("record sample count disagrees with the dataset timing");
        }
    }
    fs::create_directories(dir);
    const char* records_name = format == DatasetFormat::BINARY ? "records.bin" : "records.csv";
    const fs::path records_path = dir / records_name;
    if (format == DatasetFormat::BINARY) {
        write_records_binary(dataset, records_path);
    } else {
        write_records_csv(dataset, records_path, samples);
    }
    const std::string checksum = file_checksum(records_path);

    nlohmann::json manifest = {
        {"schema", kDatasetSchema},
        {"created_at", utc_timestamp()},
        {"format", to_string(format)},
        {"records_file", records_name},
        {"records_checksum", checksum},
        {"record_count", dataset.records.size()},
        {"sample_count", samples},
        {"surrogate_version", kSurrogateVersion},
        {"config", dataset.config},
    };
    open_out(dir / "manifest.json") << manifest.dump(2) << "\n";
    return checksum;
}

WaveformDataset load_dataset(const fs::path& dir) {
    const nlohmann::json manifest = load_json(dir / "manifest.json");
    if (manifest.at("schema").get<std::string>() != kDatasetSchema) {
        throw std::runtime_error("unsupported dataset schema: " +
                                 manifest.at("schema").get<std::string>());
    }
    const auto config = manifest.at("config").get<DatasetConfig>();
    const auto count = manifest.at("record_count").get<std::size_t>();
    const auto samples = manifest.at("sample_count").get<int>();
    if (samples != config.timing.sample_count()) {
        throw std::runtime_error("manifest sample count disagrees with its timing config");
    }
    const fs::path records_path = dir / manifest.at("records_file").get<std::string>();
    const auto format = dataset_format_from_string(manifest.at("format").get<std::string>());
    WaveformDataset dataset = format == DatasetFormat::BINARY
                                  ? load_records_binary(records_path, config, count, samples)
                                  : load_records_csv(records_path, config, samples);
    if (dataset.records.size() != count) {
        throw std::runtime_error("record count disagrees with the manifest: read " +
                                 std::to_string(dataset.records.size()) + ", expected " +
                                 std::to_string(count));
    }
    return dataset;
}

void export_features(const FeatureTable& table, const fs::path& dir) {
    if (table.supervectors.empty()) {
        throw std::invalid_argument("refusing to export an empty feature table");
    }
    fs::create_directories(dir);

    const std::vector<std::string> names = feature_names();
    std::string buf;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) buf += ",";
        buf += names[i];
    }
    buf += ",label_zone,label_type,label_joint\n";
    std::ofstream out = open_out(dir / "features.csv");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    for (const SuperVector& sv : table.supervectors) {
        buf.clear();
        for (double v : sv.values) {
            append_g17(buf, v);
            buf += ",";
        }
        buf += std::to_string(sv.label_zone);
        buf += ",";
        buf += std::to_string(sv.label_type);
        buf += ",";
        buf += std::to_string(sv.label_joint);
        buf += "\n";
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) {
        throw std::runtime_error("write failed: " + (dir / "features.csv").string());
    }

    const nlohmann::json sidecar = {
        {"schema", kFeaturesSchema},
        {"dataset_checksum", table.dataset_checksum},
        {"split_seed", table.split_seed},
        {"train_fraction", table.train_fraction},
        {"feature_names", names},
        {"standardizer", table.standardizer},
        {"split", table.split},
    };
    open_out(dir / "features.json") << sidecar.dump(2) << "\n";
}

FeatureTable load_features(const fs::path& dir) {
    const nlohmann::json sidecar = load_json(dir / "features.json");
    if (sidecar.at("schema").get<std::string>() != kFeaturesSchema) {
        throw std::runtime_error("unsupported feature table schema: " +
                                 sidecar.at("schema").get<std::string>());
    }
    FeatureTable table;
    sidecar.at("dataset_checksum").get_to(table.dataset_checksum);
    sidecar.at("split_seed").get_to(table.split_seed);
    sidecar.at("train_fraction").get_to(table.train_fraction);
    sidecar.at("standardizer").get_to(table.standardizer);
    sidecar.at("split").get_to(table.split);

    std::ifstream in(dir / "features.csv");
    if (!in) {
        throw std::runtime_error("cannot read " + (dir / "features.csv").string());
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("loc1_time_energy,", 0) != 0) {
        throw std::runtime_error("bad header in " + (dir / "features.csv").string());
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SuperVector sv;
        const char* p = line.c_str();
        char* end = nullptr;
        for (std::size_t j = 0; j < sv.values.size(); ++j) {
            if (j > 0 && *p++ != ',') {
                throw std::runtime_error("short row in features.csv");
            }
            sv.values[j] = std::strtod(p, &end);
            p = end;
        }
        const auto read_label = [&p, &end] {
            if (*p != ',') {
                throw std::runtime_error("short row in features.csv");
            }
            const long v = std::strtol(p + 1, &end, 10);
            p = end;
            return static_cast<int>(v);
        };
        sv.label_zone = read_label();
        sv.label_type = read_label();
        sv.label_joint = read_label();
        if (*p != '\0') {
            throw std::runtime_error("trailing fields in features.csv");
        }
        table.supervectors.push_back(sv);
    }
    const auto rows = static_cast<int>(table.supervectors.size());
    for (int r : table.split.train_rows) {
        if (r < 0 || r >= rows) {
            throw std::runtime_error("split row out of range: " + std::to_string(r));
        }
    }
    for (int r : table.split.test_rows) {
        if (r < 0 || r >= rows) {
            throw std::runtime_error("split row out of range: " + std::to_string(r));
        }
    }
    return table;
}

}  // namespace gridattack
