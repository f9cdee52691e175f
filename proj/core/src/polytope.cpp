#include "sqtile/polytope.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sqt {

Rat dot(const RatVec& a, const RatVec& x) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
  return s;
}

bool contains(const Polytope& p, const RatVec& x) {
  for (const auto& e : p.eqs)
    if (dot(e.a, x) != e.c) return false;
  for (const auto& h : p.ineqs)
    if (dot(h.a, x) > h.c) return false;
  return true;
}

int rank_of(std::vector<RatVec> rows) {
  int rank = 0;
  size_t cols = rows.empty() ? 0 : rows[0].size();
  for (size_t c = 0; c < cols; ++c) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    for (size_t r = 0; r < rows.size(); ++r) {
      if ((int)r == rank || rows[r][c] == 0) continue;
      Rat f = rows[r][c] / rows[rank][c];
      for (size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
    }
    ++rank;
    if (rank == (int)rows.size()) break;
  }
  return rank;
}

Reduction reduce(const Polytope& p) {
  int d = p.dim;
  std::vector<RatVec> rows;
  for (const auto& e : p.eqs) {
    RatVec r = e.a;
    r.push_back(e.c);
    rows.push_back(std::move(r));
  }
  std::vector<int> pivot_col;
  int rank = 0;
  for (int c = 0; c < d; ++c) {
    int piv = -1;
    for (int r = rank; r < (int)rows.size(); ++r)
      if (rows[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    Rat lead = rows[rank][c];
    for (int j = 0; j <= d; ++j) rows[rank][j] /= lead;
    for (int r = 0; r < (int)rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      Rat f = rows[r][c];
      for (int j = 0; j <= d; ++j) rows[r][j] -= f * rows[rank][j];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (int r = rank; r < (int)rows.size(); ++r)
    if (rows[r][d] != 0) throw EmptyPolytope("inconsistent equality system");

  Reduction out;
  std::vector<char> is_pivot(d, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  for (int c = 0; c < d; ++c)
    if (!is_pivot[c]) out.free_vars.push_back(c);
  int nf = (int)out.free_vars.size();
  out.basis.assign(d, RatVec(nf, 0));
  out.shift.assign(d, 0);
  for (int j = 0; j < nf; ++j) out.basis[out.free_vars[j]][j] = 1;
  for (int r = 0; r < rank; ++r) {
    int c = pivot_col[r];
    out.shift[c] = rows[r][d];
    for (int j = 0; j < nf; ++j) out.basis[c][j] = -rows[r][out.free_vars[j]];
  }
  out.reduced.dim = nf;
  for (const auto& h : p.ineqs) {
    auto [a, cc] = out.push(h.a, h.c);
    out.reduced.ineqs.push_back({std::move(a), std::move(cc)});
  }
  return out;
}

RatVec Reduction::lift(const RatVec& y) const {
  RatVec x = shift;
  for (size_t v = 0; v < basis.size(); ++v)
    for (size_t j = 0; j < y.size(); ++j) x[v] += basis[v][j] * y[j];
  return x;
}

std::pair<RatVec, Rat> Reduction::push(const RatVec& a, const Rat& c) const {
  int nf = (int)free_vars.size();
  RatVec ay(nf, 0);
  Rat cy = c;
  for (size_t v = 0; v < a.size(); ++v) {
    if (a[v] == 0) continue;
    cy -= a[v] * shift[v];
    for (int j = 0; j < nf; ++j) ay[j] += a[v] * basis[v][j];
  }
  return {std::move(ay), std::move(cy)};
}

namespace {

// Solve M y = rhs for square M; false if singular.
bool solve_square(std::vector<RatVec> M, RatVec rhs, RatVec& y) {
  int d = (int)rhs.size();
  for (int c = 0; c < d; ++c) {
    int piv = -1;
    for (int r = c; r < d; ++r)
      if (M[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return false;
    std::swap(M[c], M[piv]);
    std::swap(rhs[c], rhs[piv]);
    for (int r = 0; r < d; ++r) {
      if (r == c || M[r][c] == 0) continue;
      Rat f = M[r][c] / M[c][c];
      for (int j = c; j < d; ++j) M[r][j] -= f * M[c][j];
      rhs[r] -= f * rhs[c];
    }
  }
  y.assign(d, 0);
  for (int c = 0; c < d; ++c) y[c] = rhs[c] / M[c][c];
  return true;
}

std::vector<RatVec> vertices_fulldim(const Polytope& p) {
  int d = p.dim;
  std::set<RatVec> found;
  if (d == 0) {
    RatVec pt;
    if (contains(p, pt)) found.insert(pt);
  } else {
    int m = (int)p.ineqs.size();
    std::vector<int> pick(d);
    std::function<void(int, int)> rec = [&](int from, int got) {
      if (got == d) {
        std::vector<RatVec> M(d);
        RatVec rhs(d);
        for (int j = 0; j < d; ++j) {
          M[j] = p.ineqs[pick[j]].a;
          rhs[j] = p.ineqs[pick[j]].c;
        }
        RatVec y;
        if (solve_square(std::move(M), std::move(rhs), y) && contains(p, y))
          found.insert(std::move(y));
        return;
      }
      for (int i = from; i <= m - (d - got); ++i) {
        pick[got] = i;
        rec(i + 1, got + 1);
      }
    };
    rec(0, 0);
  }
  return {found.begin(), found.end()};
}

int affine_rank(const std::vector<RatVec>& pts) {
  if (pts.size() <= 1) return 0;
  std::vector<RatVec> rows;
  for (size_t i = 1; i < pts.size(); ++i) {
    RatVec r(pts[i].size());
    for (size_t j = 0; j < r.size(); ++j) r[j] = pts[i][j] - pts[0][j];
    rows.push_back(std::move(r));
  }
  return rank_of(std::move(rows));
}

Rat abs_det(std::vector<RatVec> M) {
  int d = (int)M.size();
  Rat det = 1;
  for (int c = 0; c < d; ++c) {
    int piv = -1;
    for (int r = c; r < d; ++r)
      if (M[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) std::swap(M[c], M[piv]);
    for (int r = c + 1; r < d; ++r) {
      if (M[r][c] == 0) continue;
      Rat f = M[r][c] / M[c][c];
      for (int j = c; j < d; ++j) M[r][j] -= f * M[c][j];
    }
    det *= M[c][c];
  }
  return det < 0 ? Rat(-det) : det;
}

Rat factorial(int n) {
  Rat f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Recursive boundary triangulation: cone the lex-min vertex over the
// triangulated proper faces that avoid it.
void triangulate(const Polytope& p, const std::vector<RatVec>& verts, int fdim,
                 std::vector<std::vector<RatVec>>& out) {
  if ((int)verts.size() == fdim + 1) {
    out.push_back(verts);
    return;
  }
  const RatVec& v0 = verts.front();  // verts are lex-sorted
  std::set<std::vector<RatVec>> faces;
  for (const auto& h : p.ineqs) {
    std::vector<RatVec> tight;
    bool has_v0 = false;
    for (const auto& v : verts) {
      if (dot(h.a, v) == h.c) {
        if (v == v0) has_v0 = true;
        tight.push_back(v);
      }
    }
    if (has_v0 || tight.size() == verts.size()) continue;
    if (affine_rank(tight) != fdim - 1) continue;
    faces.insert(std::move(tight));
  }
  for (const auto& f : faces) {
    std::vector<std::vector<RatVec>> sub;
    triangulate(p, f, fdim - 1, sub);
    for (auto& s : sub) {
      s.push_back(v0);
      out.push_back(std::move(s));
    }
  }
}

Rat simplex_integral(const std::vector<RatVec>& simplex, int d,
                     const std::vector<LinIneq>& forms) {
  std::vector<RatVec> M(d);
  for (int i = 0; i < d; ++i) {
    M[i].resize(d);
    for (int j = 0; j < d; ++j) M[i][j] = simplex[i][j] - simplex[d][j];
  }
  Rat vol = abs_det(std::move(M)) / factorial(d);
  if (vol == 0) return 0;
  int m = (int)forms.size();
  if (m == 0) return vol;
  std::vector<RatVec> val(m, RatVec(d + 1));
  for (int t = 0; t < m; ++t)
    for (int j = 0; j <= d; ++j) val[t][j] = dot(forms[t].a, simplex[j]) + forms[t].c;
  Rat acc = 0;
  std::vector<int> tup(m, 0);
  std::vector<int> mult(d + 1);
  while (true) {
    Rat term = 1;
    std::fill(mult.begin(), mult.end(), 0);
    for (int t = 0; t < m; ++t) {
      term *= val[t][tup[t]];
      ++mult[tup[t]];
    }
    for (int j = 0; j <= d; ++j) term *= factorial(mult[j]);
    acc += term;
    int t = 0;
    while (t < m && tup[t] == d) tup[t++] = 0;
    if (t == m) break;
    ++tup[t];
  }
  return vol * factorial(d) / factorial(d + m) * acc;
}

}  // namespace

std::vector<RatVec> vertices(const Polytope& p) {
  if (p.eqs.empty()) return vertices_fulldim(p);
  Reduction r = reduce(p);
  std::set<RatVec> out;
  for (const auto& y : vertices_fulldim(r.reduced)) out.insert(r.lift(y));
  return {out.begin(), out.end()};
}

std::pair<Rat, Rat> extrema(const Polytope& p, const RatVec& a, const Rat& c) {
  auto vs = vertices(p);
  if (vs.empty()) throw EmptyPolytope("extrema of empty polytope");
  Rat lo = dot(a, vs[0]) + c, hi = lo;
  for (const auto& v : vs) {
    Rat x = dot(a, v) + c;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

Rat integrate_product(const Polytope& p, const std::vector<LinIneq>& forms) {
  if (!p.eqs.empty()) throw Error("integrate_product needs a reduced polytope");
  auto verts = vertices_fulldim(p);
  if (p.dim == 0) {
    if (verts.empty()) return 0;
    Rat prod = 1;
    for (const auto& f : forms) prod *= f.c;
    return prod;
  }
  if ((int)verts.size() < p.dim + 1 || affine_rank(verts) < p.dim) return 0;
  std::vector<std::vector<RatVec>> simplices;
  triangulate(p, verts, p.dim, simplices);
  Rat total = 0;
  for (const auto& s : simplices) total += simplex_integral(s, p.dim, forms);
  return total;
}

Rat volume(const Polytope& p) { return integrate_product(p, {}); }

}  // namespace sqt
