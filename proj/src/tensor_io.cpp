#include "recbench/tensor_io.hpp"

#include "recbench/binary_io.hpp"
#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"

#include <fstream>
#include <sstream>

namespace recbench {

std::size_t Tensor::element_count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

const Tensor& TensorArchive::get(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return t;
    }
    throw InvalidInput("tensor archive has no tensor '" + name + "'");
}

void write_tensor_archive(std::ostream& out, const TensorArchive& archive) {
    out << archive.magic << '\n';
    for (const auto& [key, value] : archive.meta) {
        if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
            throw InvalidInput("tensor archive meta entries must be single-line");
        }
        out << "meta " << key << ' ' << value << '\n';
    }
    for (const auto& t : archive.tensors) {
        if (t.values.size() != t.element_count()) {
            throw InvalidInput("tensor '" + t.name + "' size does not match its shape");
        }
        out << "tensor " << t.name << ' ' << t.shape.size();
        for (auto d : t.shape) out << ' ' << d;
        out << '\n';
    }
    out << "end\n";
    for (const auto& t : archive.tensors) {
        for (double v : t.values) binary::put_f64(out, v);
    }
}

void write_tensor_archive(const std::filesystem::path& path, const TensorArchive& archive) {
    note_file_access();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_tensor_archive(out, archive);
    if (!out) throw IoError("write failed: " + path.string());
}

TensorArchive read_tensor_archive(std::istream& in, const std::string& expected_magic) {
    TensorArchive archive;
    std::string line;
    if (!std::getline(in, line) || line != expected_magic) {
        throw InvalidInput("expected a " + expected_magic + " archive");
    }
    archive.magic = line;
    bool ended = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            ended = true;
            break;
        }
        std::istringstream fields(line);
        std::string kind;
        fields >> kind;
        if (kind == "meta") {
            std::string key;
            fields >> key;
            std::string value;
            std::getline(fields >> std::ws, value);
            archive.meta[key] = value;
        } else if (kind == "tensor") {
            Tensor t;
            std::size_t rank = 0;
            if (!(fields >> t.name >> rank)) throw InvalidInput("malformed tensor line: " + line);
            t.shape.resize(rank);
            for (auto& d : t.shape) {
                if (!(fields >> d)) throw InvalidInput("malformed tensor line: " + line);
            }
            archive.tensors.push_back(std::move(t));
        } else {
            throw InvalidInput("unknown manifest line: " + line);
        }
    }
    if (!ended) throw InvalidInput("tensor manifest is not terminated");
    for (auto& t : archive.tensors) {
        t.values.resize(t.element_count());
        for (auto& v : t.values) {
            if (!binary::get_f64(in, v)) throw InvalidInput("truncated tensor payload: " + t.name);
        }
    }
    return archive;
}

TensorArchive read_tensor_archive(const std::filesystem::path& path,
                                  const std::string& expected_magic) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    return read_tensor_archive(in, expected_magic);
}

}  // namespace recbench
