#include "fvgrad/mesh/mesh_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fvgrad {

namespace {

constexpr const char* kHeader = "fvgrad-mesh v1";

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "mesh line " + std::to_string(line) + ": " + what);
}

bool next_line(std::istream& is, std::string& line, std::size_t& lineno) {
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << kHeader << '\n';
    os << mesh.n_nodes() << ' ' << mesh.n_faces() << ' ' << mesh.n_cells() << '\n';
    for (const auto& p : mesh.nodes()) os << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
    for (const Face& f : mesh.faces()) {
        os << f.a << ' ' << f.b << ' ' << f.owner << ' ';
        if (f.is_boundary()) {
            os << "B:" << mesh.boundary_names()[static_cast<std::size_t>(f.boundary_tag)];
        } else {
            os << f.neighbour;
        }
        os << '\n';
    }
    for (Index c = 0; c < mesh.n_cells(); ++c) {
        const auto list = mesh.cell_faces(c);
        for (std::size_t k = 0; k < list.size(); ++k) os << (k ? " " : "") << list[k];
        os << '\n';
    }
}

Mesh read_mesh(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    if (!next_line(is, line, lineno) || line != kHeader) parse_fail(lineno, "expected header '" + std::string(kHeader) + "'");
    if (!next_line(is, line, lineno)) parse_fail(lineno, "missing counts");
    long nn = -1, nf = -1, nc = -1;
    {
        std::istringstream ss(line);
        if (!(ss >> nn >> nf >> nc) || nn < 0 || nf < 0 || nc < 0) parse_fail(lineno, "bad counts");
    }
    std::vector<Vec2<double>> nodes(static_cast<std::size_t>(nn));
    for (auto& p : nodes) {
        if (!next_line(is, line, lineno)) parse_fail(lineno, "unexpected end of file in nodes");
        const char* b = line.data();
        const char* e = b + line.size();
        double x = 0, y = 0;
        auto r1 = std::from_chars(b, e, x);
        if (r1.ec != std::errc()) parse_fail(lineno, "bad node coordinate");
        const char* p2 = r1.ptr;
        while (p2 < e && *p2 == ' ') ++p2;
        auto r2 = std::from_chars(p2, e, y);
        if (r2.ec != std::errc()) parse_fail(lineno, "bad node coordinate");
        p = Vec2<double>(x, y);
    }
    std::vector<Face> faces(static_cast<std::size_t>(nf));
    std::vector<std::string> names;
    std::map<std::string, int> tag_of;
    for (auto& f : faces) {
        if (!next_line(is, line, lineno)) parse_fail(lineno, "unexpected end of file in faces");
        std::istringstream ss(line);
        std::string last;
        if (!(ss >> f.a >> f.b >> f.owner >> last)) parse_fail(lineno, "bad face line");
        if (last.rfind("B:", 0) == 0) {
            const std::string tag = last.substr(2);
            if (tag.empty()) parse_fail(lineno, "empty boundary tag");
            auto [it, inserted] = tag_of.emplace(tag, static_cast<int>(names.size()));
            if (inserted) names.push_back(tag);
            f.neighbour = kNoCell;
            f.boundary_tag = it->second;
        } else {
            Index nb = 0;
            auto r = std::from_chars(last.data(), last.data() + last.size(), nb);
            if (r.ec != std::errc() || r.ptr != last.data() + last.size()) parse_fail(lineno, "bad neighbour");
            f.neighbour = nb;
        }
    }
    std::vector<std::vector<Index>> cells(static_cast<std::size_t>(nc));
    for (auto& c : cells) {
        if (!next_line(is, line, lineno)) parse_fail(lineno, "unexpected end of file in cells");
        std::istringstream ss(line);
        Index f = 0;
        while (ss >> f) c.push_back(f);
        if (!ss.eof()) parse_fail(lineno, "bad cell line");
    }
    return Mesh(std::move(nodes), std::move(faces), std::move(cells), std::move(names));
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

}  // namespace fvgrad
