#include "sqtile/chart.hpp"

#include <sstream>

namespace sqt {

TrainTrackChart build_chart(const CylinderDiagram& d) {
  TrainTrackChart c;
  c.dia = d;
  c.n_edges = d.n_edges;
  c.k = (int)d.cyls.size();
  c.n_vars = c.n_edges + c.k;
  c.area.assign(c.n_vars, 0);
  c.norm.assign(c.n_vars, 1);
  std::vector<RatVec> rows;
  for (int i = 0; i < c.k; ++i) {
    RatVec eq(c.n_vars, 0), top(c.n_vars, 0);
    for (const auto& o : d.cyls[i].top) {
      eq[o.edge] += 1;
      top[o.edge] += 1;
    }
    for (const auto& o : d.cyls[i].bottom) eq[o.edge] -= 1;
    for (int v = 0; v < c.n_vars; ++v) c.area[v] += d.cyls[i].height * top[v];
    rows.push_back(eq);
    c.switch_eqs.push_back({std::move(eq), 0});
    // 0 <= u_i <= b_i
    RatVec un(c.n_vars, 0), up = top;
    un[c.n_edges + i] = -1;
    up[c.n_edges + i] = 0;
    for (auto& x : up) x = -x;
    up[c.n_edges + i] = 1;
    c.cone.push_back({std::move(un), 0});
    c.cone.push_back({std::move(up), 0});
  }
  for (int e = 0; e < c.n_edges; ++e) {
    RatVec a(c.n_vars, 0);
    a[e] = -1;
    c.cone.push_back({std::move(a), 0});
  }
  c.eq_rank = rank_of(std::move(rows));
  return c;
}

RatVec base_row(const TrainTrackChart& c, int cyl) {
  RatVec b(c.n_vars, 0);
  for (const auto& o : c.dia.cyls[cyl].top) b[o.edge] += 1;
  return b;
}

namespace {

std::string var_name(const TrainTrackChart& c, int v) {
  return v < c.n_edges ? "w" + std::to_string(v + 1)
                       : "u" + std::to_string(v - c.n_edges + 1);
}

std::string row_str(const TrainTrackChart& c, const RatVec& a) {
  std::ostringstream os;
  bool first = true;
  for (int v = 0; v < c.n_vars; ++v) {
    if (a[v] == 0) continue;
    if (!first) os << " ";
    if (a[v] == 1)
      os << (first ? "" : "+ ");
    else if (a[v] == -1)
      os << "- ";
    else
      os << (a[v] > 0 && !first ? "+ " : "") << a[v] << " ";
    os << var_name(c, v);
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace

std::string chart_text(const TrainTrackChart& c) {
  std::ostringstream os;
  os << "vars:";
  for (int v = 0; v < c.n_vars; ++v) os << " " << var_name(c, v);
  os << "\n";
  for (const auto& e : c.switch_eqs) os << "eq: " << row_str(c, e.a) << " = " << e.c << "\n";
  for (int e = 0; e < c.n_edges; ++e) os << "ineq: " << var_name(c, e) << " > 0\n";
  for (int i = 0; i < c.k; ++i) {
    RatVec b = base_row(c, i);
    os << "ineq: 0 < " << var_name(c, c.n_edges + i) << " <= " << row_str(c, b) << "\n";
  }
  os << "area: " << row_str(c, c.area) << "\n";
  return os.str();
}

Rat chart_volume(const TrainTrackChart& c) {
  Polytope p;
  p.dim = c.n_vars;
  p.eqs = c.switch_eqs;
  p.ineqs = c.cone;
  p.ineqs.push_back({c.area, 1});
  Reduction r = reduce(p);
  return volume(r.reduced);
}

Rat chart_volume_by_integration(const TrainTrackChart& c) {
  Polytope p;
  p.dim = c.n_edges;
  for (const auto& e : c.switch_eqs)
    p.eqs.push_back({RatVec(e.a.begin(), e.a.begin() + c.n_edges), e.c});
  for (int e = 0; e < c.n_edges; ++e) {
    RatVec a(c.n_edges, 0);
    a[e] = -1;
    p.ineqs.push_back({std::move(a), 0});
  }
  RatVec area_w(c.area.begin(), c.area.begin() + c.n_edges);
  p.ineqs.push_back({std::move(area_w), 1});
  Reduction r = reduce(p);
  std::vector<LinIneq> forms;
  for (int i = 0; i < c.k; ++i) {
    RatVec b = base_row(c, i);
    auto [a, cc] = r.push(RatVec(b.begin(), b.begin() + c.n_edges), 0);
    forms.push_back({std::move(a), std::move(cc)});
  }
  return integrate_product(r.reduced, forms);
}

}  // namespace sqt
