// Line-oriented text format for polygonal meshes.
//
//   POLYMESH 2
//   <n_vertices>
//   x y                 (one line per vertex, 17 significant digits)
//   <n_elements>
//   k v1 v2 ... vk      (0-based, CCW)
//
// The reader is strict: any deviation is reported with its line number.
#pragma once

#include "polydg/mesh.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace polydg {

class MeshFormatError : public MeshError {
public:
    MeshFormatError(std::size_t line, const std::string& what)
        : MeshError("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_mesh(std::ostream& os, const PolyMesh& mesh)
{
    os << "POLYMESH 2\n" << mesh.vertices.size() << '\n';
    for (const Point2& p : mesh.vertices) os << format_real(p.x) << ' ' << format_real(p.y) << '\n';
    os << mesh.elements.size() << '\n';
    for (const auto& e : mesh.elements) {
        os << e.vertices.size();
        for (Index v : e.vertices) os << ' ' << v;
        os << '\n';
    }
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        const std::size_t j = s.find(' ', i);
        const std::size_t end = j == std::string_view::npos ? s.size() : j;
        if (end > i) out.push_back(s.substr(i, end - i));
        i = end;
    }
    return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line, const char* what)
{
    T v{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw MeshFormatError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    return v;
}

} // namespace detail

inline PolyMesh read_mesh(std::istream& is)
{
    std::vector<std::string> lines;
    for (std::string s; std::getline(is, s);) {
        if (!s.empty() && s.back() == '\r') throw MeshFormatError(lines.size() + 1, "carriage return not allowed");
        lines.push_back(std::move(s));
    }
    std::size_t cur = 0;
    auto next_line = [&](const char* expected) -> std::string_view {
        if (cur >= lines.size()) throw MeshFormatError(cur + 1, std::string("unexpected end of file, expected ") + expected);
        return lines[cur++];
    };

    if (next_line("header") != "POLYMESH 2") throw MeshFormatError(1, "expected header 'POLYMESH 2'");

    auto count_line = [&](const char* what) {
        const auto toks = detail::split_ws(next_line(what));
        if (toks.size() != 1) throw MeshFormatError(cur, std::string("expected a single ") + what);
        return detail::parse_number<std::size_t>(toks[0], cur, what);
    };

    const std::size_t nv = count_line("vertex count");
    std::vector<Point2> verts;
    verts.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const auto toks = detail::split_ws(next_line("vertex"));
        if (toks.size() != 2) throw MeshFormatError(cur, "expected 'x y'");
        const double x = detail::parse_number<double>(toks[0], cur, "coordinate");
        const double y = detail::parse_number<double>(toks[1], cur, "coordinate");
        if (!std::isfinite(x) || !std::isfinite(y)) throw MeshFormatError(cur, "non-finite coordinate");
        verts.push_back({x, y});
    }

    const std::size_t ne = count_line("element count");
    std::vector<std::vector<Index>> loops;
    loops.reserve(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        const auto toks = detail::split_ws(next_line("element"));
        if (toks.empty()) throw MeshFormatError(cur, "empty element line");
        const auto k = detail::parse_number<std::size_t>(toks[0], cur, "vertex count");
        if (k < 3 || toks.size() != k + 1) throw MeshFormatError(cur, "element vertex count does not match its indices");
        std::vector<Index> loop;
        for (std::size_t j = 1; j <= k; ++j) {
            const auto v = detail::parse_number<std::size_t>(toks[j], cur, "vertex index");
            if (v >= nv) throw MeshFormatError(cur, "vertex index out of range");
            loop.push_back(v);
        }
        std::vector<Point2> pts;
        for (Index v : loop) pts.push_back(verts[v]);
        if (signed_area(pts) <= 0.0) throw MeshFormatError(cur, "element loop is not counter-clockwise");
        loops.push_back(std::move(loop));
    }
    if (cur != lines.size()) throw MeshFormatError(cur + 1, "trailing content after the last element");
    return build_connectivity(std::move(verts), loops);
}

inline void write_mesh_file(const std::string& path, const PolyMesh& mesh)
{
    std::ofstream os(path);
    if (!os) throw MeshError("cannot open '" + path + "' for writing");
    write_mesh(os, mesh);
}

inline PolyMesh read_mesh_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw MeshError("cannot open '" + path + "'");
    return read_mesh(is);
}

} // namespace polydg
