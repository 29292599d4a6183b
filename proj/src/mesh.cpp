#include "surfacc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "surfacc/errors.hpp"

namespace surfacc {

namespace {

// Next line that is neither blank nor a comment.
bool next_content_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

[[noreturn]] void bad(int lineno, const std::string& what) {
    throw FormatError("line " + std::to_string(lineno) + ": " + what);
}

void check_indices(const TriangleMesh& m) {
    const auto n = static_cast<int>(m.vertices.size());
    for (const auto& t : m.triangles)
        for (int v : t)
            if (v < 0 || v >= n) throw FormatError("face references vertex " + std::to_string(v) + " out of range");
}

}  // namespace

TriangleMesh read_off(std::istream& in, bool extra_column) {
    std::string line;
    int lineno = 0;
    if (!next_content_line(in, line, lineno)) throw FormatError("empty OFF file");
    std::istringstream head(line);
    std::string magic;
    head >> magic;
    if (magic != "OFF") bad(lineno, "expected OFF header");
    long nv = -1;
    long nf = -1;
    long ne = 0;
    if (!(head >> nv)) {
        if (!next_content_line(in, line, lineno)) bad(lineno, "missing counts");
        std::istringstream counts(line);
        if (!(counts >> nv >> nf)) bad(lineno, "expected vertex and face counts");
        counts >> ne;
    } else if (!(head >> nf)) {
        bad(lineno, "expected vertex and face counts");
    }
    if (nv < 0 || nf < 0) bad(lineno, "negative counts");

    TriangleMesh m;
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, lineno)) throw FormatError("unexpected end of file in vertex list");
        std::istringstream ls(line);
        Point p(3);
        if (!(ls >> p(0) >> p(1) >> p(2))) bad(lineno, "expected three coordinates");
        if (extra_column) {
            double v = 0.0;
            if (!(ls >> v)) bad(lineno, "expected a per-vertex value after the coordinates");
            m.vertex_values.push_back(v);
        }
        m.vertices.push_back(p);
    }
    for (long i = 0; i < nf; ++i) {
        if (!next_content_line(in, line, lineno)) throw FormatError("unexpected end of file in face list");
        std::istringstream ls(line);
        int k = 0;
        if (!(ls >> k)) bad(lineno, "expected a face size");
        if (k != 3) bad(lineno, "face with " + std::to_string(k) + " vertices; only triangles are supported");
        std::array<int, 3> t{};
        if (!(ls >> t[0] >> t[1] >> t[2])) bad(lineno, "expected three vertex indices");
        m.triangles.push_back(t);
    }
    check_indices(m);
    return m;
}

TriangleMesh read_obj(std::istream& in, bool extra_column) {
    TriangleMesh m;
    std::string line;
    int lineno = 0;
    while (next_content_line(in, line, lineno)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Point p(3);
            if (!(ls >> p(0) >> p(1) >> p(2))) bad(lineno, "expected three coordinates");
            if (extra_column) {
                double v = 0.0;
                if (!(ls >> v)) bad(lineno, "expected a per-vertex value after the coordinates");
                m.vertex_values.push_back(v);
            }
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // "i", "i/t", "i//n" or "i/t/n"; negative indices count from the end.
                const std::string head = tok.substr(0, tok.find('/'));
                int v = 0;
                try {
                    std::size_t used = 0;
                    v = std::stoi(head, &used);
                    if (used != head.size()) throw std::invalid_argument(head);
                } catch (const std::exception&) {
                    bad(lineno, "bad face index '" + tok + "'");
                }
                if (v == 0) bad(lineno, "face index 0 is not allowed");
                idx.push_back(v > 0 ? v - 1 : static_cast<int>(m.vertices.size()) + v);
            }
            if (idx.size() != 3)
                bad(lineno, "face with " + std::to_string(idx.size()) + " vertices; only triangles are supported");
            m.triangles.push_back({idx[0], idx[1], idx[2]});
        }
        // Normals, texture coordinates, groups and materials are ignored.
    }
    check_indices(m);
    return m;
}

TriangleMesh read_mesh(const std::string& path, bool extra_column) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read mesh file " + path);
    const auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "off") return read_off(in, extra_column);
    if (ext == "obj") return read_obj(in, extra_column);
    throw FormatError("unknown mesh extension '." + ext + "' (expected .off or .obj)");
}

std::vector<TriangleAnalysis> analyze_mesh(const TriangleMesh& mesh,
                                           const std::function<VertexFeatures(int)>& features, int codim,
                                           double phi) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<TriangleAnalysis> out;
    out.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        const Simplex tri({mesh.vertices[static_cast<std::size_t>(t[0])], mesh.vertices[static_cast<std::size_t>(t[1])],
                           mesh.vertices[static_cast<std::size_t>(t[2])]});
        TriangleAnalysis a{inf, inf, 0.0,
                           {BoundResult::none(Formula::tnl), BoundResult::none(Formula::tnl), BoundResult::none(Formula::tnl)},
                           inf, BoundResult::none(Formula::etnl)};
        if (tri.is_degenerate()) {
            out.push_back(a);
            continue;
        }
        a.circumradius = circumball(tri).radius;
        a.min_radius = min_enclosing_ball(tri).radius;
        a.kappa = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double angle = plane_angle(tri, i);
            a.largest_angle = std::max(a.largest_angle, angle);
            const VertexFeatures f = features(t[static_cast<std::size_t>(i)]);
            if (!(f.lfs > 0.0) || !(f.ebs >= f.lfs)) throw PreconditionError("vertex feature sizes need 0 < lfs <= ebs");
            a.tnl[static_cast<std::size_t>(i)] = tnl_bound(a.circumradius, f.ebs, angle);
            a.kappa = std::max(a.kappa, a.circumradius / f.lfs);
        }
        if (a.kappa <= 0.5) a.etnl = etnl_bound(a.kappa, phi, codim);
        out.push_back(a);
    }
    return out;
}

}  // namespace surfacc
