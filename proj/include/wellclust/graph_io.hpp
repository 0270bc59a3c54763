#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "wellclust/graph.hpp"

namespace wellclust {

/// Edge-list text: one `u v [w]` per line, 0-based ids, `#` starts a comment.
/// The vertex count is one more than the largest id seen. Duplicate edges
/// (either orientation) are a ParseError.
Graph read_edge_list(std::istream& in);
Graph read_edge_list(const std::filesystem::path& path);

/// Writes `u v` lines (or `u v w` when the graph is weighted) for u < v, with a
/// leading comment carrying n and m.
void write_edge_list(std::ostream& out, const Graph& g);

/// METIS adjacency format: header `n m [fmt]`, then one line per vertex with
/// 1-based neighbor ids (followed by weights when fmt ends in 1). `%` lines are
/// comments. Vertex weights (fmt 1x) are read and discarded.
Graph read_metis(std::istream& in);
Graph read_metis(const std::filesystem::path& path);
void write_metis(std::ostream& out, const Graph& g);

/// Chooses the reader from the extension: `.graph`/`.metis` are METIS,
/// anything else is an edge list.
Graph read_graph(const std::filesystem::path& path);

/// Partition text: one `vertex cluster` pair per line, both 0-based. Every
/// vertex must appear exactly once. k is one more than the largest cluster id
/// unless given explicitly.
Partition read_partition(std::istream& in, const Graph& g, int k = 0);
Partition read_partition(const std::filesystem::path& path, const Graph& g, int k = 0);
void write_partition(std::ostream& out, const Partition& p);

/// Writes `contents` to a temporary sibling of `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace wellclust
