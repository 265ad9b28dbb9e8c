#ifndef HAMLAB_IO_HPP
#define HAMLAB_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/partition.hpp"
#include "json.hpp"

namespace hamlab::io {

using nlohmann::json;

inline json to_json(const Digraph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return json{{"n", g.order()}, {"edges", std::move(edges)}};
}

inline Digraph digraph_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) fail(ErrorKind::malformed_input, "edge must be [u,v]");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Digraph(n, edges);
  } catch (const json::exception& ex) {
    fail(ErrorKind::malformed_input, std::string("graph json: ") + ex.what());
  }
}

/// Canonical serialization: compact JSON with edges in lexicographic order.
inline std::string write_graph_json(const Digraph& g) { return to_json(g).dump(); }

inline Digraph read_graph_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    fail(ErrorKind::malformed_input, std::string("graph json: ") + ex.what());
  }
  return digraph_from_json(j);
}

/// Plain edge list: first line n, then one "u v" pair per line.
inline std::string write_graph_text(const Digraph& g) {
  std::ostringstream out;
  out << g.order() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
  return out.str();
}

inline Digraph read_graph_text(const std::string& text) {
  std::istringstream in(text);
  int n = 0;
  if (!(in >> n)) fail(ErrorKind::malformed_input, "edge list: missing vertex count");
  std::vector<Edge> edges;
  int u = 0, v = 0;
  while (in >> u) {
    if (!(in >> v)) fail(ErrorKind::malformed_input, "edge list: dangling endpoint");
    edges.emplace_back(u, v);
  }
  if (!in.eof()) fail(ErrorKind::malformed_input, "edge list: non-integer token");
  return Digraph(n, edges);
}

/// Chooses the format from the first non-space character.
inline Digraph read_graph(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') return read_graph_json(text);
  return read_graph_text(text);
}

inline json to_json(const ClusterPartition& p) {
  return json{{"v0", p.v0}, {"clusters", p.clusters}};
}

inline ClusterPartition partition_from_json(const json& j) {
  try {
    ClusterPartition p;
    p.v0 = j.value("v0", std::vector<int>{});
    p.clusters = j.at("clusters").get<std::vector<std::vector<int>>>();
    return p;
  } catch (const json::exception& ex) {
    fail(ErrorKind::malformed_input, std::string("partition json: ") + ex.what());
  }
}

inline json to_json(const OneFactor& f) { return json{{"cycles", f.cycles()}}; }

inline OneFactor factor_from_json(const json& j, int n) {
  try {
    return OneFactor::from_cycles(n, j.at("cycles").get<std::vector<std::vector<int>>>());
  } catch (const json::exception& ex) {
    fail(ErrorKind::malformed_input, std::string("factor json: ") + ex.what());
  }
}

inline json to_json(const HamiltonCertificate& c) { return json{{"order", c.order}}; }

inline HamiltonCertificate certificate_from_json(const json& j) {
  try {
    return HamiltonCertificate{j.at("order").get<std::vector<int>>()};
  } catch (const json::exception& ex) {
    fail(ErrorKind::malformed_input, std::string("certificate json: ") + ex.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::malformed_input, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& ex) {
    fail(ErrorKind::malformed_input, path + ": " + ex.what());
  }
}

}  // namespace hamlab::io

#endif  // HAMLAB_IO_HPP
