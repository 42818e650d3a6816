#include "mmw/topology.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmw {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

bool crosses_wall(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Wall& w) {
  // Proper intersection only: all four orientations strict.
  const double d1 = cross2(w.a, w.b, p);
  const double d2 = cross2(w.a, w.b, q);
  const double d3 = cross2(p, q, w.a);
  const double d4 = cross2(p, q, w.b);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

void Topology::validate() const {
  if (width <= 0.0 || height <= 0.0) throw std::invalid_argument("topology area must be positive");
  if (aps.rows() < 1 || clients.rows() < 1)
    throw std::invalid_argument("topology needs at least one AP and one client");
  if (aps.cols() != 2 || clients.cols() != 2)
    throw std::invalid_argument("positions must be 2D points");
  auto inside = [&](const Matrix& pts) {
    return (pts.col(0).array() >= 0.0).all() && (pts.col(0).array() <= width).all() &&
           (pts.col(1).array() >= 0.0).all() && (pts.col(1).array() <= height).all();
  };
  if (!inside(aps) || !inside(clients))
    throw std::invalid_argument("topology has points outside the area");
  for (const auto& w : walls) w.validate();
}

void write_topology_csv(const std::string& path, const Topology& topo) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "kind,id,x,y,x2,y2,attenuation_db\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "area,0,%.10g,%.10g,0,0,0\n", topo.width, topo.height);
  out << buf;
  for (Index j = 0; j < topo.aps.rows(); ++j) {
    std::snprintf(buf, sizeof(buf), "ap,%lld,%.10g,%.10g,0,0,0\n", static_cast<long long>(j),
                  topo.aps(j, 0), topo.aps(j, 1));
    out << buf;
  }
  for (Index i = 0; i < topo.clients.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "client,%lld,%.10g,%.10g,0,0,0\n", static_cast<long long>(i),
                  topo.clients(i, 0), topo.clients(i, 1));
    out << buf;
  }
  for (std::size_t k = 0; k < topo.walls.size(); ++k) {
    const Wall& w = topo.walls[k];
    std::snprintf(buf, sizeof(buf), "wall,%lld,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  static_cast<long long>(k), w.a.x(), w.a.y(), w.b.x(), w.b.y(), w.attenuation_db);
    out << buf;
  }
}

Topology read_topology_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  Topology topo;
  std::vector<Eigen::Vector2d> aps, clients;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string kind, field;
    std::getline(ss, kind, ',');
    double v[6] = {0, 0, 0, 0, 0, 0};
    for (int k = 0; k < 6 && std::getline(ss, field, ','); ++k) v[k] = std::stod(field);
    if (kind == "area") {
      topo.width = v[1];
      topo.height = v[2];
    } else if (kind == "ap") {
      aps.emplace_back(v[1], v[2]);
    } else if (kind == "client") {
      clients.emplace_back(v[1], v[2]);
    } else if (kind == "wall") {
      topo.walls.push_back(Wall{{v[1], v[2]}, {v[3], v[4]}, v[5]});
    } else {
      throw std::runtime_error("unknown row kind '" + kind + "' in " + path);
    }
  }
  topo.aps.resize(static_cast<Index>(aps.size()), 2);
  for (std::size_t k = 0; k < aps.size(); ++k) topo.aps.row(static_cast<Index>(k)) = aps[k];
  topo.clients.resize(static_cast<Index>(clients.size()), 2);
  for (std::size_t k = 0; k < clients.size(); ++k) topo.clients.row(static_cast<Index>(k)) = clients[k];
  topo.validate();
  return topo;
}

}  // namespace mmw
