#include "sqtile/multicurve.hpp"

#include <algorithm>
#include <numeric>
#include <regex>
#include <sstream>

namespace sqt {

namespace {

std::string serialize(const MultiCurveType& t) {
  std::ostringstream out;
  for (size_t i = 0; i < t.pieces.size(); ++i) {
    const Piece& p = t.pieces[i];
    if (i) out << '|';
    out << 'g' << p.genus << ".b" << p.boundaries << ".s[";
    for (size_t j = 0; j < p.punctures.size(); ++j) {
      if (j) out << ',';
      out << p.punctures[j].first;
      if (p.punctures[j].second >= 0) out << ':' << p.punctures[j].second;
    }
    out << ']';
  }
  out << '/';
  for (size_t i = 0; i < t.edges.size(); ++i) {
    if (i) out << '|';
    out << 'e' << '(' << t.edges[i].a << ',' << t.edges[i].b << ",w=" << t.edges[i].w
        << ')';
  }
  return out.str();
}

MultiCurveType permuted(const MultiCurveType& t, const std::vector<int>& sigma) {
  MultiCurveType r;
  r.pieces.resize(t.pieces.size());
  for (size_t p = 0; p < t.pieces.size(); ++p) r.pieces[sigma[p]] = t.pieces[p];
  for (const auto& e : t.edges) {
    int a = sigma[e.a], b = sigma[e.b];
    r.edges.push_back({std::min(a, b), std::max(a, b), e.w});
  }
  std::sort(r.edges.begin(), r.edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.a, x.b, x.w) < std::tie(y.a, y.b, y.w);
  });
  return r;
}

}  // namespace

MultiCurveType canonicalize(MultiCurveType t) {
  for (auto& p : t.pieces) std::sort(p.punctures.begin(), p.punctures.end());
  std::vector<int> sigma(t.pieces.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  MultiCurveType best;
  std::string best_key;
  do {
    MultiCurveType cand = permuted(t, sigma);
    std::string key = serialize(cand);
    if (best_key.empty() || key < best_key) {
      best_key = std::move(key);
      best = std::move(cand);
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

std::string MultiCurveType::key() const { return serialize(canonicalize(*this)); }

MultiCurveType MultiCurveType::parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) throw InvalidMultiCurve("missing '/': " + text);
  MultiCurveType t;
  static const std::regex piece_re(R"(g(-?\d+)\.b(\d+)\.s\[([^\]]*)\])");
  static const std::regex punct_re(R"((-?\d+)(?::(\d+))?)");
  static const std::regex edge_re(R"(e\((\d+),(\d+),w=(\d+)\))");
  auto parts = [](const std::string& s) {
    std::vector<std::string> v;
    std::string cur;
    for (char c : s) {
      if (c == '|') {
        v.push_back(cur);
        cur.clear();
      } else
        cur.push_back(c);
    }
    if (!cur.empty() || !v.empty()) v.push_back(cur);
    return v;
  };
  for (const auto& ps : parts(text.substr(0, slash))) {
    std::smatch m;
    if (!std::regex_match(ps, m, piece_re))
      throw InvalidMultiCurve("bad piece: " + ps);
    Piece p;
    p.genus = std::stoi(m[1]);
    p.boundaries = std::stoi(m[2]);
    std::string s = m[3];
    if (!s.empty()) {
      std::istringstream in(s);
      std::string tok;
      while (std::getline(in, tok, ',')) {
        std::smatch pm;
        if (!std::regex_match(tok, pm, punct_re))
          throw InvalidMultiCurve("bad singularity entry: " + tok);
        p.punctures.push_back({std::stoi(pm[1]), pm[2].matched ? std::stoi(pm[2]) : -1});
      }
    }
    t.pieces.push_back(std::move(p));
  }
  std::string es = text.substr(slash + 1);
  if (!es.empty()) {
    for (const auto& e : parts(es)) {
      std::smatch m;
      if (!std::regex_match(e, m, edge_re)) throw InvalidMultiCurve("bad edge: " + e);
      MultiCurveType::Edge ed{std::stoi(m[1]), std::stoi(m[2]), std::stoll(m[3])};
      if (ed.a >= (int)t.pieces.size() || ed.b >= (int)t.pieces.size())
        throw InvalidMultiCurve("edge endpoint out of range: " + e);
      t.edges.push_back(ed);
    }
  }
  if (t.edges.empty()) throw InvalidMultiCurve("multi-curve needs at least one curve");
  std::vector<int> deg(t.pieces.size(), 0);
  for (const auto& e : t.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  for (size_t p = 0; p < t.pieces.size(); ++p)
    if (deg[p] != t.pieces[p].boundaries)
      throw InvalidMultiCurve("piece boundary count must equal its degree");
  return canonicalize(t);
}

namespace {

MultiCurveType build_type(const Decomposition& dec, const std::vector<int>& cycle_orders,
                          const std::vector<int>* labels) {
  MultiCurveType t;
  int nc = dec.n_comps;
  std::vector<int> n_edges(nc, 0), n_sides(nc, 0);
  for (int e = 0; e < (int)dec.edge_comp.size(); ++e) ++n_edges[dec.edge_comp[e]];
  for (int i = 0; i < (int)dec.dia.cyls.size(); ++i) {
    ++n_sides[dec.bottom_comp[i]];
    ++n_sides[dec.top_comp[i]];
  }
  for (int c = 0; c < nc; ++c) {
    Piece p;
    p.boundaries = n_sides[c];
    // the spine deformation-retract: chi = V - E, 2 - 2g = chi + b; a seam
    // circle with no singular vertex counts one base point
    int v = dec.comp_vertices[c].empty() ? 1 : (int)dec.comp_vertices[c].size();
    int chi = v - n_edges[c];
    int twog = 2 - chi - p.boundaries;
    if (twog < 0 || twog % 2 != 0)
      throw InvalidMultiCurve("inconsistent piece Euler characteristic");
    p.genus = twog / 2;
    for (int cyc : dec.comp_vertices[c])
      p.punctures.push_back({cycle_orders[cyc], labels ? (*labels)[cyc] : -1});
    t.pieces.push_back(std::move(p));
  }
  for (int i = 0; i < (int)dec.dia.cyls.size(); ++i) {
    int a = dec.bottom_comp[i], b = dec.top_comp[i];
    t.edges.push_back({std::min(a, b), std::max(a, b), dec.dia.cyls[i].height});
  }
  return canonicalize(t);
}

// Vertex correspondence under the +90 degree rotation: the corner (s, c) of
// the original marks the same point as (s, c+1 mod 4) of the rotated surface.
std::vector<int> rotated_cycle_map(const SquareTiledSurface& q,
                                   const SquareTiledSurface& qr,
                                   const SingularityProfile& pq,
                                   const SingularityProfile& pr) {
  std::vector<int> cyc_r(4 * qr.n, -1);
  for (int c = 0; c < (int)pr.cycles.size(); ++c)
    for (int corner : pr.cycles[c]) cyc_r[corner] = c;
  std::vector<int> map(pq.cycles.size(), -1);
  for (int c = 0; c < (int)pq.cycles.size(); ++c)
    for (int corner : pq.cycles[c]) {
      int corner_r = 4 * (corner / 4) + (corner % 4 + 1) % 4;
      if (map[c] == -1)
        map[c] = cyc_r[corner_r];
      else if (map[c] != cyc_r[corner_r])
        throw InvalidMultiCurve("rotation does not respect vertices");
    }
  return map;
}

}  // namespace

MultiCurveType core_type(const SquareTiledSurface& q, const Decomposition& dec,
                         bool labeled) {
  SingularityProfile prof = singularity_profile(q);
  std::vector<int> labels;
  if (labeled) labels = canonical_vertex_labels(q);
  return build_type(dec, prof.orders, labeled ? &labels : nullptr);
}

MultiCurveType horizontal_core(const SquareTiledSurface& q, bool labeled) {
  return core_type(q, decompose(q), labeled);
}

MultiCurveType vertical_core(const SquareTiledSurface& q, bool labeled) {
  SquareTiledSurface qr = rotate90(q);
  Decomposition dec = decompose(qr);
  SingularityProfile pr = singularity_profile(qr);
  if (!labeled) return build_type(dec, pr.orders, nullptr);
  // labels must name the singularities of q itself so that horizontal and
  // vertical types of one surface speak about the same points
  SingularityProfile pq = singularity_profile(q);
  std::vector<int> lq = canonical_vertex_labels(q);
  std::vector<int> map = rotated_cycle_map(q, qr, pq, pr);
  std::vector<int> lr(pr.cycles.size(), -1);
  for (int c = 0; c < (int)pq.cycles.size(); ++c) lr[map[c]] = lq[c];
  return build_type(dec, pr.orders, &lr);
}

}  // namespace sqt
