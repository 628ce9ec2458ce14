#pragma once

#include "hetsep/diff/parameters.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hetsep::diff {

enum class DType { float32, float64 };

std::string to_string(DType d);
DType dtype_from_string(const std::string& s);

struct TensorRecord {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    std::vector<double> data;  // row-major, exactly representable in the file dtype
};

// Binary layout:
//   8 bytes   magic "HETSEPCK"
//   8 bytes   little-endian uint64 header length H
//   H bytes   UTF-8 JSON header {"format":1,"dtype":...,"tensors":[{"name","shape"}],"meta":{...}}
//   payload   tensors in header order, raw little-endian floats of `dtype`
struct CheckpointFile {
    DType dtype = DType::float32;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<TensorRecord> tensors;

    const TensorRecord* find(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const CheckpointFile& file);
CheckpointFile read_checkpoint(const std::filesystem::path& path);

// Parameter values plus Adam moments ("<name>", "<name>/adam_m", "<name>/adam_v").
template <typename T>
std::vector<TensorRecord> parameter_records(const ParameterSet<T>& params, bool with_moments);

// Restores every parameter of `params` from `file`; shapes must match.
template <typename T>
void load_parameter_records(ParameterSet<T>& params, const CheckpointFile& file, bool with_moments);

}  // namespace hetsep::diff
