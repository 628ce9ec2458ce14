#include "hetsep/diff/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hetsep::diff {
namespace {

constexpr char kMagic[8] = {'H', 'E', 'T', 'S', 'E', 'P', 'C', 'K'};

template <typename U>
void put_le(std::ostream& os, U value) {
    unsigned char bytes[sizeof(U)];
    std::memcpy(bytes, &value, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
    unsigned char bytes[sizeof(U)];
    is.read(reinterpret_cast<char*>(bytes), sizeof(U));
    if (!is) throw std::runtime_error("checkpoint truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
    U value;
    std::memcpy(&value, bytes, sizeof(U));
    return value;
}

void append_moments(std::vector<TensorRecord>& out, const std::string& name, const auto& mat) {
    TensorRecord r{name, mat.rows(), mat.cols(), {}};
    r.data.assign(mat.data(), mat.data() + mat.size());
    out.push_back(std::move(r));
}

template <typename T>
void copy_into(Matrix<T>& dst, const TensorRecord& rec) {
    if (rec.rows != dst.rows() || rec.cols != dst.cols()) {
        throw std::invalid_argument("checkpoint tensor '" + rec.name + "' has shape " + std::to_string(rec.rows) +
                                    "x" + std::to_string(rec.cols) + ", expected " + std::to_string(dst.rows()) +
                                    "x" + std::to_string(dst.cols()));
    }
    for (Index k = 0; k < dst.size(); ++k) dst.data()[k] = static_cast<T>(rec.data[static_cast<size_t>(k)]);
}

}  // namespace

std::string to_string(DType d) { return d == DType::float32 ? "float32" : "float64"; }

DType dtype_from_string(const std::string& s) {
    if (s == "float32") return DType::float32;
    if (s == "float64") return DType::float64;
    throw std::invalid_argument("unknown checkpoint dtype: " + s);
}

const TensorRecord* CheckpointFile::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

void write_checkpoint(const std::filesystem::path& path, const CheckpointFile& file) {
    nlohmann::json header;
    header["format"] = 1;
    header["dtype"] = to_string(file.dtype);
    header["tensors"] = nlohmann::json::array();
    for (const auto& t : file.tensors) {
        if (static_cast<Index>(t.data.size()) != t.rows * t.cols) {
            throw std::invalid_argument("tensor '" + t.name + "' data size does not match its shape");
        }
        header["tensors"].push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}});
    }
    header["meta"] = file.meta;
    const std::string text = header.dump();

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint64_t>(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& t : file.tensors) {
        for (double v : t.data) {
            if (file.dtype == DType::float32) {
                put_le<float>(os, static_cast<float>(v));
            } else {
                put_le<double>(os, v);
            }
        }
    }
    if (!os) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

CheckpointFile read_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a checkpoint file: " + path.string());
    }
    const auto len = get_le<std::uint64_t>(is);
    std::string text(len, '\0');
    is.read(text.data(), static_cast<std::streamsize>(len));
    if (!is) throw std::runtime_error("checkpoint header truncated");
    const auto header = nlohmann::json::parse(text);
    if (header.at("format").get<int>() != 1) throw std::runtime_error("unsupported checkpoint format");

    CheckpointFile file;
    file.dtype = dtype_from_string(header.at("dtype").get<std::string>());
    file.meta = header.value("meta", nlohmann::json::object());
    for (const auto& entry : header.at("tensors")) {
        TensorRecord r;
        r.name = entry.at("name").get<std::string>();
        r.rows = entry.at("shape").at(0).get<Index>();
        r.cols = entry.at("shape").at(1).get<Index>();
        r.data.resize(static_cast<size_t>(r.rows * r.cols));
        for (double& v : r.data) {
            v = file.dtype == DType::float32 ? static_cast<double>(get_le<float>(is)) : get_le<double>(is);
        }
        file.tensors.push_back(std::move(r));
    }
    return file;
}

template <typename T>
std::vector<TensorRecord> parameter_records(const ParameterSet<T>& params, bool with_moments) {
    std::vector<TensorRecord> out;
    for (const auto& p : params) {
        append_moments(out, p.name, p.value);
        if (with_moments) {
            append_moments(out, p.name + "/adam_m", p.m);
            append_moments(out, p.name + "/adam_v", p.v);
        }
    }
    return out;
}

template <typename T>
void load_parameter_records(ParameterSet<T>& params, const CheckpointFile& file, bool with_moments) {
    for (auto& p : params) {
        const TensorRecord* rec = file.find(p.name);
        if (rec == nullptr) throw std::invalid_argument("checkpoint is missing parameter '" + p.name + "'");
        copy_into(p.value, *rec);
        if (with_moments) {
            const TensorRecord* m = file.find(p.name + "/adam_m");
            const TensorRecord* v = file.find(p.name + "/adam_v");
            if (m == nullptr || v == nullptr) {
                throw std::invalid_argument("checkpoint is missing Adam moments for '" + p.name + "'");
            }
            copy_into(p.m, *m);
            copy_into(p.v, *v);
        }
    }
}

template std::vector<TensorRecord> parameter_records<float>(const ParameterSet<float>&, bool);
template std::vector<TensorRecord> parameter_records<double>(const ParameterSet<double>&, bool);
template void load_parameter_records<float>(ParameterSet<float>&, const CheckpointFile&, bool);
template void load_parameter_records<double>(ParameterSet<double>&, const CheckpointFile&, bool);

}  // namespace hetsep::diff
