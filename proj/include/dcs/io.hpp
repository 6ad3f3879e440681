#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dcs/graph.hpp"
#include "dcs/model.hpp"

namespace dcs {

// One CSV row split into fields; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line);

// Reads a relation whose first CSV row names the attributes. Attributes and values are interned into q.
// Throws InputError on unreadable files or ragged rows.
void read_relation_csv(std::istream& in, const std::string& name, JoinQuery& q);
void read_relation_csv(const std::string& path, const std::string& name, JoinQuery& q);

struct JoinSpec {
    JoinQuery query;
    std::vector<DegreeConstraint> constraints;  // as declared; relation cardinalities are added on validation
};

// JSON join spec; relation files resolve relative to the spec's directory.
// Throws SchemaError on malformed JSON or schema mismatch, InputError on unreadable data files.
JoinSpec load_join_spec(const std::string& path);

// Edge list, one "u v" pair per line; blank lines and lines starting with '#' are skipped.
// Tokens are interned in order of first appearance. Throws InputError on self-loops or bad lines.
DirectedGraph read_directed_edges(std::istream& in);
DirectedGraph read_directed_edges(const std::string& path);
UndirectedGraph read_undirected_edges(std::istream& in);
UndirectedGraph read_undirected_edges(const std::string& path);

void write_edge_list(std::ostream& out, const UndirectedGraph& g);
void write_edge_list(std::ostream& out, const DirectedGraph& g);

}  // namespace dcs
