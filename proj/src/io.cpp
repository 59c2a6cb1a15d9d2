#include "atomgraph/io.hpp"

#include <zlib.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace atomgraph {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void append_double(std::string& out, double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, r.ptr);
}

void append_uint(std::string& out, std::uint64_t x) {
    char buf[24];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, r.ptr);
}

// Splits on '\n', dropping '\r', blank lines and '#' comments.
template <class F>
void for_each_line(const std::string& text, F f) {
    std::size_t pos = 0, lineno = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        ++lineno;
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') continue;
        f(line.substr(first), lineno);
    }
}

template <class T>
const char* parse_num(const char* p, const char* end, T& v) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    const auto r = std::from_chars(p, end, v);
    return r.ec == std::errc() ? r.ptr : nullptr;
}

}  // namespace

std::string read_text(const std::string& path) {
    // gzread passes plain files through unchanged.
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) fail(Errc::io, "cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int got;
    while ((got = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
    const bool bad = got < 0;
    gzclose(f);
    if (bad) fail(Errc::io, "read error in " + path);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (ends_with(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "wb6");
        if (!f) fail(Errc::io, "cannot write " + path);
        std::size_t done = 0;
        bool ok = true;
        while (ok && done < text.size()) {
            const auto chunk = static_cast<unsigned>(std::min<std::size_t>(text.size() - done, 1u << 30));
            ok = gzwrite(f, text.data() + done, chunk) == static_cast<int>(chunk);
            done += chunk;
        }
        if (gzclose(f) != Z_OK || !ok) fail(Errc::io, "write error in " + path);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(Errc::io, "cannot write " + path);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) fail(Errc::io, "write error in " + path);
}

std::string format_edge_list(const std::vector<EdgePair>& edges) {
    std::string out;
    out.reserve(edges.size() * 14);
    for (const auto& [u, v] : edges) {
        append_uint(out, u);
        out += ' ';
        append_uint(out, v);
        out += '\n';
    }
    return out;
}

std::string format_atom_list(const GeneratedGraph& g) {
    std::string out;
    const auto& shapes = g.shapes();
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        out += "# shape ";
        append_uint(out, s);
        out += ' ';
        append_uint(out, shapes[s].order());
        for (const auto& [a, b] : shapes[s].edges()) {
            out += ' ';
            append_uint(out, a);
            out += '-';
            append_uint(out, b);
        }
        out += '\n';
    }
    for (std::size_t i = 0; i < g.atom_count(); ++i) {
        append_uint(out, g.atom_shape(i));
        for (Vertex v : g.atom(i)) {
            out += ' ';
            append_uint(out, v);
        }
        out += '\n';
    }
    return out;
}

std::string format_types_csv(const std::vector<double>& types) {
    std::string out = "vertex,type\n";
    for (std::size_t v = 0; v < types.size(); ++v) {
        append_uint(out, v);
        out += ',';
        append_double(out, types[v]);
        out += '\n';
    }
    return out;
}

std::vector<EdgePair> parse_edge_list(const std::string& text) {
    std::vector<EdgePair> edges;
    for_each_line(text, [&](std::string_view line, std::size_t lineno) {
        Vertex u = 0, v = 0;
        const char* end = line.data() + line.size();
        const char* p = parse_num(line.data(), end, u);
        if (p) p = parse_num(p, end, v);
        if (p)
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
        if (!p || p != end) fail(Errc::invalid_argument, "edge list line " + std::to_string(lineno) + " is not 'u v'");
        edges.emplace_back(u, v);
    });
    return edges;
}

std::vector<double> parse_types_csv(const std::string& text) {
    std::vector<double> types;
    bool header = true;
    for_each_line(text, [&](std::string_view line, std::size_t lineno) {
        if (header) {
            header = false;
            if (line.rfind("vertex", 0) == 0) return;
        }
        const auto comma = line.find(',');
        std::size_t v = 0;
        double x = 0;
        const char* mid = line.data() + (comma == std::string_view::npos ? line.size() : comma);
        const char* end = line.data() + line.size();
        const bool ok = comma != std::string_view::npos && parse_num(line.data(), mid, v) == mid &&
                        parse_num(mid + 1, end, x) == end;
        if (!ok || v != types.size())
            fail(Errc::invalid_argument, "types file line " + std::to_string(lineno) + " is not 'vertex,type' in order");
        types.push_back(x);
    });
    return types;
}

void write_edge_list(const std::string& path, const std::vector<EdgePair>& edges) {
    write_text(path, format_edge_list(edges));
}

std::vector<EdgePair> read_edge_list(const std::string& path) { return parse_edge_list(read_text(path)); }

}  // namespace atomgraph
