#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace recbench {

/// Named dense float64 array in row-major order.
struct Tensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    std::size_t element_count() const;
};

/// Versioned parameter container.
///
///   <magic>\n
///   meta <key> <value>\n          (zero or more; value runs to end of line)
///   tensor <name> <rank> <d0> ... \n
///   end\n
///   <float64 little-endian payload, tensors in manifest order>
///
/// The manifest alone determines the payload layout.
struct TensorArchive {
    std::string magic;
    std::map<std::string, std::string> meta;
    std::vector<Tensor> tensors;

    /// Throws InvalidInput if the tensor is absent.
    const Tensor& get(const std::string& name) const;
};

void write_tensor_archive(std::ostream& out, const TensorArchive& archive);
void write_tensor_archive(const std::filesystem::path& path, const TensorArchive& archive);

/// Throws InvalidInput if the magic differs from `expected_magic` or the
/// manifest is malformed, MissingArtifact if the file does not exist.
TensorArchive read_tensor_archive(std::istream& in, const std::string& expected_magic);
TensorArchive read_tensor_archive(const std::filesystem::path& path,
                                  const std::string& expected_magic);

}  // namespace recbench
