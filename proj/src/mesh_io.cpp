#include "recbench/mesh_io.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace recbench {

namespace {

long parse_index(const std::string& token, std::size_t vertex_count, int line_no) {
    const auto slash = token.find('/');
    const std::string head = token.substr(0, slash);
    long idx = 0;
    const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
    if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
        throw InvalidInput("obj line " + std::to_string(line_no) + ": bad face index '" + token +
                           "'");
    }
    const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count)) {
        throw InvalidInput("obj line " + std::to_string(line_no) + ": face index out of range");
    }
    return resolved;
}

std::ifstream open_in(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    note_file_access();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    return out;
}

}  // namespace

TriangleMesh parse_obj(std::istream& in) {
    TriangleMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Point3 p;
            if (!(ss >> p.x() >> p.y() >> p.z())) {
                throw InvalidInput("obj line " + std::to_string(line_no) + ": bad vertex");
            }
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<std::uint32_t> corners;
            std::string tok;
            while (ss >> tok) {
                corners.push_back(static_cast<std::uint32_t>(
                    parse_index(tok, mesh.vertices.size(), line_no)));
            }
            if (corners.size() < 3) {
                throw InvalidInput("obj line " + std::to_string(line_no) +
                                   ": face needs three corners");
            }
            for (std::size_t k = 1; k + 1 < corners.size(); ++k) {
                mesh.triangles.push_back({corners[0], corners[k], corners[k + 1]});
            }
        }
    }
    return mesh;
}

TriangleMesh read_obj(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return parse_obj(in);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
    out.precision(17);
    for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    auto out = open_out(path);
    write_obj(out, mesh);
    if (!out) throw IoError("failed writing " + path.string());
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
    out.precision(17);
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const auto& p : cloud.points()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
    auto out = open_out(path);
    write_ply(out, cloud);
    if (!out) throw IoError("failed writing " + path.string());
}

PointCloud parse_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw InvalidInput("not a PLY file");

    std::size_t count = 0;
    bool in_vertex = false;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "ascii") throw InvalidInput("only ASCII PLY is supported");
        } else if (tag == "element") {
            std::string name;
            ss >> name;
            in_vertex = name == "vertex";
            if (in_vertex) ss >> count;
        } else if (tag == "property" && in_vertex) {
            std::string type, name;
            ss >> type >> name;
            props.push_back(name);
        } else if (tag == "end_header") {
            break;
        }
    }
    auto find = [&](const char* name) -> std::size_t {
        for (std::size_t i = 0; i < props.size(); ++i) {
            if (props[i] == name) return i;
        }
        throw InvalidInput(std::string("PLY vertex lacks property ") + name);
    };
    const std::size_t ix = find("x"), iy = find("y"), iz = find("z");

    PointCloud cloud;
    cloud.reserve(count);
    std::vector<double> row(props.size());
    for (std::size_t i = 0; i < count; ++i) {
        for (auto& value : row) {
            if (!(in >> value)) throw InvalidInput("PLY ends before all vertices were read");
        }
        cloud.add({row[ix], row[iy], row[iz]});
    }
    return cloud;
}

PointCloud read_ply(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_ply(in);
}

}  // namespace recbench
