#include "wellclust/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "wellclust/errors.hpp"

namespace wellclust {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::string strip_comment(const std::string& line, char marker) {
  const auto pos = line.find(marker);
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& tok, long line) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError("bad number '" + tok + "'", line);
  return value;
}

std::string format_double(double x) {
  std::ostringstream ss;
  ss.precision(17);
  ss << x;
  return ss.str();
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::set<std::pair<Vertex, Vertex>> seen;
  Vertex max_id = -1;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = split_ws(strip_comment(line, '#'));
    if (tok.empty()) continue;
    if (tok.size() != 2 && tok.size() != 3) {
      throw ParseError("expected `u v [w]`, got " + std::to_string(tok.size()) + " fields",
                       lineno);
    }
    Edge e;
    e.u = parse_number<Vertex>(tok[0], lineno);
    e.v = parse_number<Vertex>(tok[1], lineno);
    if (tok.size() == 3) e.weight = parse_number<double>(tok[2], lineno);
    if (e.u < 0 || e.v < 0) throw ParseError("negative vertex id", lineno);
    if (e.u == e.v) throw ParseError("self-loop", lineno);
    if (!(e.weight > 0.0)) throw ParseError("edge weight must be positive", lineno);
    auto key = std::minmax(e.u, e.v);
    if (!seen.emplace(key.first, key.second).second) throw ParseError("duplicate edge", lineno);
    max_id = std::max({max_id, e.u, e.v});
    edges.push_back(e);
  }
  if (max_id < 0) throw ParseError("edge list contains no edges", 0);
  return Graph::from_edges(max_id + 1, edges);
}

Graph read_edge_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices " << g.num_vertices() << " edges " << g.num_edges() << '\n';
  const bool weighted = !g.unweighted();
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (weighted) out << ' ' << format_double(e.weight);
    out << '\n';
  }
}

Graph read_metis(std::istream& in) {
  std::string line;
  long lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    header = split_ws(line);
    if (!header.empty()) break;
  }
  if (header.size() < 2) throw ParseError("missing METIS header `n m [fmt [ncon]]`", lineno);
  const auto n = parse_number<long>(header[0], lineno);
  const auto m = parse_number<long>(header[1], lineno);
  std::string fmt = header.size() > 2 ? header[2] : "0";
  while (fmt.size() < 3) fmt.insert(fmt.begin(), '0');
  const bool edge_weights = fmt[2] == '1';
  const bool vertex_weights = fmt[1] == '1';
  long ncon = header.size() > 3 ? parse_number<long>(header[3], lineno) : (vertex_weights ? 1 : 0);
  if (n <= 0) throw ParseError("METIS header declares no vertices", lineno);

  std::vector<Edge> directed;
  Vertex u = 0;
  while (u < n && std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    auto tok = split_ws(line);
    std::size_t pos = static_cast<std::size_t>(ncon);
    if (tok.size() < pos) throw ParseError("missing vertex weights", lineno);
    while (pos < tok.size()) {
      const auto v1 = parse_number<long>(tok[pos++], lineno);
      double w = 1.0;
      if (edge_weights) {
        if (pos >= tok.size()) throw ParseError("missing edge weight", lineno);
        w = parse_number<double>(tok[pos++], lineno);
      }
      if (v1 < 1 || v1 > n) throw ParseError("neighbor id out of range", lineno);
      const auto v = static_cast<Vertex>(v1 - 1);
      if (v == u) throw ParseError("self-loop", lineno);
      directed.push_back({u, v, w});
    }
    ++u;
  }
  if (u < n) throw ParseError("expected " + std::to_string(n) + " adjacency lines", lineno);
  if (static_cast<long>(directed.size()) != 2 * m) {
    throw ParseError("header declares " + std::to_string(m) + " edges, adjacency lists hold " +
                         std::to_string(directed.size()) + " endpoints",
                     0);
  }
  auto by_endpoints = [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  };
  std::sort(directed.begin(), directed.end(), by_endpoints);
  std::vector<Edge> edges;
  for (const Edge& e : directed) {
    if (e.u > e.v) continue;
    auto it = std::lower_bound(directed.begin(), directed.end(), Edge{e.v, e.u, 0.0},
                               by_endpoints);
    if (it == directed.end() || it->u != e.v || it->v != e.u || it->weight != e.weight) {
      throw ParseError("adjacency entry " + std::to_string(e.u + 1) + " -> " +
                           std::to_string(e.v + 1) + " is not mirrored",
                       0);
    }
    edges.push_back(e);
  }
  return Graph::from_edges(static_cast<Vertex>(n), edges);
}

Graph read_metis(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_metis(in);
}

void write_metis(std::ostream& out, const Graph& g) {
  const bool weighted = !g.unweighted();
  out << g.num_vertices() << ' ' << g.num_edges();
  if (weighted) out << " 001";
  out << '\n';
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (i > 0) out << ' ';
      out << nb[i] + 1;
      if (weighted) out << ' ' << format_double(w[i]);
    }
    out << '\n';
  }
}

Graph read_graph(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".graph" || ext == ".metis") return read_metis(path);
  return read_edge_list(path);
}

Partition read_partition(std::istream& in, const Graph& g, int k) {
  const Vertex n = g.num_vertices();
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  std::string line;
  long lineno = 0;
  int max_cluster = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = split_ws(strip_comment(line, '#'));
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError("expected `vertex cluster`", lineno);
    const auto u = parse_number<Vertex>(tok[0], lineno);
    const auto c = parse_number<int>(tok[1], lineno);
    if (u < 0 || u >= n) throw ParseError("vertex id out of range", lineno);
    if (c < 0) throw ParseError("negative cluster id", lineno);
    if (assignment[u] >= 0) throw ParseError("vertex listed twice", lineno);
    assignment[u] = c;
    max_cluster = std::max(max_cluster, c);
  }
  for (Vertex u = 0; u < n; ++u) {
    if (assignment[u] < 0) throw ParseError("vertex " + std::to_string(u) + " unassigned", 0);
  }
  if (k == 0) k = max_cluster + 1;
  if (max_cluster >= k) throw ParseError("cluster id exceeds k", 0);
  return Partition::from_assignment(g, k, std::move(assignment));
}

Partition read_partition(const std::filesystem::path& path, const Graph& g, int k) {
  auto in = open_input(path);
  return read_partition(in, g, k);
}

void write_partition(std::ostream& out, const Partition& p) {
  for (Vertex u = 0; u < p.num_vertices(); ++u) out << u << ' ' << p.cluster_of(u) << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wellclust
