#include "dcs/io.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "dcs/error.hpp"

namespace dcs {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

struct RawEdges {
    std::vector<std::string> names;
    std::vector<Edge> edges;
};

RawEdges read_raw_edges(std::istream& in) {
    RawEdges raw;
    std::unordered_map<std::string, int> ids;
    auto id_of = [&](const std::string& token) {
        auto [it, fresh] = ids.emplace(token, static_cast<int>(raw.names.size()));
        if (fresh) raw.names.push_back(token);
        return it->second;
    };
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream fields(t);
        std::string u, v, extra;
        if (!(fields >> u >> v) || (fields >> extra))
            throw InputError("line " + std::to_string(line_no) + ": expected two vertex tokens");
        if (u == v) throw InputError("line " + std::to_string(line_no) + ": self-loop on '" + u + "'");
        const int a = id_of(u);
        const int b = id_of(v);
        raw.edges.emplace_back(a, b);
    }
    return raw;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = was_quoted = true;
        } else if (c == ',') {
            out.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw InputError("unterminated quote in CSV line");
    out.push_back(was_quoted ? field : trim(field));
    return out;
}

void read_relation_csv(std::istream& in, const std::string& name, JoinQuery& q) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("relation '" + name + "' has no header row");
    Relation r;
    r.name = name;
    for (const auto& attr : split_csv_line(line)) {
        if (attr.empty()) throw InputError("relation '" + name + "' has an empty attribute name");
        const int id = q.ensure_attribute(attr);
        for (int s : r.schema)
            if (s == id) throw InputError("relation '" + name + "' repeats attribute '" + attr + "'");
        r.schema.push_back(id);
    }
    std::vector<Value> row(r.arity());
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != r.arity())
            throw InputError("relation '" + name + "' line " + std::to_string(line_no) + ": expected " +
                             std::to_string(r.arity()) + " fields");
        for (std::size_t c = 0; c < fields.size(); ++c) row[c] = q.values.intern(fields[c]);
        r.add_row(row);
    }
    r.normalize();
    q.relations.push_back(std::move(r));
}

void read_relation_csv(const std::string& path, const std::string& name, JoinQuery& q) {
    auto in = open_input(path);
    read_relation_csv(in, name, q);
}

JoinSpec load_join_spec(const std::string& path) {
    auto in = open_input(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("spec '" + path + "': " + e.what());
    }
    const auto base = std::filesystem::path(path).parent_path();
    JoinSpec spec;
    try {
        if (!doc.is_object() || !doc.contains("relations") || !doc["relations"].is_array())
            throw SchemaError("spec needs a \"relations\" array");
        for (const auto& rel : doc["relations"]) {
            const std::string name = rel.at("name").get<std::string>();
            const std::string file = rel.at("file").get<std::string>();
            const auto declared = rel.at("schema").get<std::vector<std::string>>();
            auto full = std::filesystem::path(file);
            if (full.is_relative()) full = base / full;
            const std::size_t before = spec.query.relations.size();
            read_relation_csv(full.string(), name, spec.query);
            const Relation& r = spec.query.relations[before];
            bool same = declared.size() == r.arity();
            for (std::size_t c = 0; same && c < declared.size(); ++c)
                same = spec.query.universe[r.schema[c]].name == declared[c];
            if (!same) throw SchemaError("relation '" + name + "': file header differs from the declared schema");
        }
        if (doc.contains("constraints")) {
            for (const auto& c : doc["constraints"]) {
                DegreeConstraint dc;
                for (const auto& a : c.at("X").get<std::vector<std::string>>()) dc.X |= bit(spec.query.attribute_id(a));
                for (const auto& a : c.at("Y").get<std::vector<std::string>>()) dc.Y |= bit(spec.query.attribute_id(a));
                const auto N = c.at("N").get<std::int64_t>();
                if (N < 1) throw SchemaError("constraint bound N must be positive");
                if (!subset_of(dc.X, dc.Y) || dc.X == dc.Y) throw SchemaError("constraint needs X strictly inside Y");
                dc.N = static_cast<std::uint64_t>(N);
                spec.constraints.push_back(dc);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("spec '" + path + "': " + e.what());
    }
    return spec;
}

DirectedGraph read_directed_edges(std::istream& in) {
    auto raw = read_raw_edges(in);
    auto g = DirectedGraph::from_edges(static_cast<int>(raw.names.size()), std::move(raw.edges));
    g.names = std::move(raw.names);
    return g;
}

DirectedGraph read_directed_edges(const std::string& path) {
    auto in = open_input(path);
    return read_directed_edges(in);
}

UndirectedGraph read_undirected_edges(std::istream& in) {
    auto raw = read_raw_edges(in);
    auto g = UndirectedGraph::from_edges(static_cast<int>(raw.names.size()), std::move(raw.edges));
    g.names = std::move(raw.names);
    return g;
}

UndirectedGraph read_undirected_edges(const std::string& path) {
    auto in = open_input(path);
    return read_undirected_edges(in);
}

void write_edge_list(std::ostream& out, const UndirectedGraph& g) {
    for (const auto& [u, v] : g.edges) out << g.name(u) << ' ' << g.name(v) << '\n';
}

void write_edge_list(std::ostream& out, const DirectedGraph& g) {
    for (const auto& [u, v] : g.edges) out << g.name(u) << ' ' << g.name(v) << '\n';
}

}  // namespace dcs
