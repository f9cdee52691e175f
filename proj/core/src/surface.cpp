#include "sqtile/surface.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace sqt {

Stratum::Stratum(std::vector<int> sigma_, int eps_) : sigma(std::move(sigma_)), eps(eps_) {
  if (eps != 0 && eps != 1) throw InvalidStratum("eps must be 0 or 1");
  if (sigma.empty()) throw InvalidStratum("sigma must be nonempty");
  int sum = 0;
  for (int s : sigma) {
    if (s < -1) throw InvalidStratum("orders must be >= -1");
    sum += s;
  }
  if (sum % 4 != 0 || sum < -4) throw InvalidStratum("sum sigma must be 4g-4 for integer g >= 0");
  if (eps == 1) {
    for (int s : sigma)
      if (s % 2 != 0 || s < 0) throw InvalidStratum("eps=1 requires even nonnegative orders");
  }
  if (dim() <= 0) throw InvalidStratum("stratum dimension must be positive");
}

int Stratum::genus() const {
  int sum = std::accumulate(sigma.begin(), sigma.end(), 0);
  return (sum + 4) / 4;
}

int Stratum::dim() const { return 2 * genus() - 2 + punctures() + eps; }

std::vector<int> Stratum::nonzero_orders() const {
  std::vector<int> out;
  for (int s : sigma)
    if (s != 0) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

std::string Stratum::str() const {
  std::ostringstream os;
  os << "sigma=[";
  for (size_t i = 0; i < sigma.size(); ++i) os << (i ? "," : "") << sigma[i];
  os << "];eps=" << eps;
  return os.str();
}

Stratum Stratum::parse(const std::string& text) {
  auto fail = [&] { throw InvalidStratum("bad stratum spec: " + text); };
  std::string s;
  for (char c : text)
    if (!std::isspace((unsigned char)c)) s.push_back(c);
  auto spos = s.find("sigma=[");
  auto epos = s.find("eps=");
  if (spos == std::string::npos || epos == std::string::npos) fail();
  auto close = s.find(']', spos);
  if (close == std::string::npos) fail();
  std::string list = s.substr(spos + 7, close - (spos + 7));
  std::vector<int> sigma;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) sigma.push_back(std::stoi(tok));
  int eps = std::stoi(s.substr(epos + 4));
  return Stratum(sigma, eps);
}

void SquareTiledSurface::glue(int a, Side sa, int b, Side sb, bool rotation) {
  partner.resize(4 * n, -1);
  rot.resize(4 * n, 0);
  int x = slot(a, sa), y = slot(b, sb);
  partner[x] = y;
  partner[y] = x;
  rot[x] = rot[y] = rotation ? 1 : 0;
}

SquareTiledSurface build_from_permutations(const std::vector<int>& h, const std::vector<int>& v) {
  if (h.size() != v.size() || h.empty()) throw InvalidSurface("h and v must have equal positive size");
  int n = (int)h.size();
  auto check_perm = [&](const std::vector<int>& p) {
    std::vector<char> seen(n, 0);
    for (int x : p) {
      if (x < 0 || x >= n || seen[x]) throw InvalidSurface("not a permutation");
      seen[x] = 1;
    }
  };
  check_perm(h);
  check_perm(v);
  SquareTiledSurface q;
  q.n = n;
  q.partner.assign(4 * n, -1);
  q.rot.assign(4 * n, 0);
  for (int i = 0; i < n; ++i) {
    q.glue(i, R, h[i], L, false);
    q.glue(i, T, v[i], B, false);
  }
  return q;
}

// Corner geometry. Corner c exits counterclockwise through one side, at one
// endpoint of that side (0 = low, 1 = high; vertical sides ordered by y,
// horizontal ones by x). Translation gluings match endpoints, rotations swap.
namespace {
struct Exit {
  Side side;
  int pos;
};
constexpr Exit kExit[4] = {{L, 0}, {B, 1}, {R, 1}, {T, 0}};  // BL BR TR TL
int arrive_corner(Side s, int pos) {
  switch (s) {
    case R: return pos ? TR : BR;
    case L: return pos ? TL : BL;
    case T: return pos ? TR : TL;
    default: return pos ? BR : BL;
  }
}
}  // namespace

int corner_step(const SquareTiledSurface& q, int corner_id) {
  int sq = corner_id / 4;
  Exit e = kExit[corner_id % 4];
  int s = SquareTiledSurface::slot(sq, e.side);
  int p = q.partner[s];
  int pos = q.rot[s] ? 1 - e.pos : e.pos;
  return 4 * SquareTiledSurface::square_of(p) + arrive_corner(SquareTiledSurface::side_of(p), pos);
}

ValidationReport validate(const SquareTiledSurface& q) {
  ValidationReport rep;
  auto bad = [&](const std::string& m) {
    rep.ok = false;
    rep.problems.push_back(m);
  };
  if (q.n <= 0 || (int)q.partner.size() != 4 * q.n || (int)q.rot.size() != 4 * q.n) {
    bad("sizes inconsistent");
    return rep;
  }
  for (int s = 0; s < 4 * q.n; ++s) {
    int p = q.partner[s];
    if (p < 0 || p >= 4 * q.n || p == s) {
      bad("pairing is not a fixed-point-free involution");
      return rep;
    }
    if (q.partner[p] != s) {
      bad("pairing is not an involution");
      return rep;
    }
    if (q.rot[s] != q.rot[p]) bad("flag mismatch across a pair");
    Side a = SquareTiledSurface::side_of(s), b = SquareTiledSurface::side_of(p);
    if (is_vertical(a) != is_vertical(b)) bad("axis mismatch");
    if (!q.rot[s] && b != opposite(a)) bad("translation gluing on non-opposite sides");
    if (q.rot[s] && a != b) rep.orientable = false;  // rotation-opposite pair
  }
  if (!rep.ok) return rep;
  // Connectivity over gluings.
  std::vector<char> seen(q.n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int s = 0; s < 4; ++s) {
      int j = SquareTiledSurface::square_of(q.partner[4 * i + s]);
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  if (reached != q.n) bad("surface not connected");
  // Corner cycles must close with even length >= 2.
  std::vector<char> visited(4 * q.n, 0);
  for (int c0 = 0; c0 < 4 * q.n; ++c0) {
    if (visited[c0]) continue;
    int c = c0, len = 0;
    do {
      visited[c] = 1;
      c = corner_step(q, c);
      ++len;
      if (len > 4 * q.n) {
        bad("corner walk does not close");
        return rep;
      }
    } while (c != c0);
    if (len % 2 != 0) bad("odd corner cycle");
  }
  return rep;
}

void require_valid(const SquareTiledSurface& q) {
  auto rep = validate(q);
  if (!rep.ok) throw InvalidSurface("invalid surface: " + (rep.problems.empty() ? "?" : rep.problems[0]));
}

SingularityProfile singularity_profile(const SquareTiledSurface& q) {
  SingularityProfile prof;
  std::vector<char> visited(4 * q.n, 0);
  for (int c0 = 0; c0 < 4 * q.n; ++c0) {
    if (visited[c0]) continue;
    std::vector<int> cyc;
    int c = c0;
    do {
      visited[c] = 1;
      cyc.push_back(c);
      c = corner_step(q, c);
    } while (c != c0);
    if (cyc.size() % 2 != 0) throw InvalidSurface("odd corner cycle");
    prof.cycles.push_back(std::move(cyc));
  }
  int sum = 0;
  for (auto& cyc : prof.cycles) {
    int order = (int)cyc.size() / 2 - 2;
    prof.orders.push_back(order);
    sum += order;
  }
  if (sum % 4 != 0 || sum < -4)
    throw InvalidSurface("order sum " + std::to_string(sum) + " is not 4g-4");
  prof.genus = (sum + 4) / 4;
  // Euler cross-check: V - E + F with E = 2n, F = n.
  int chi = (int)prof.cycles.size() - 2 * q.n + q.n;
  if (chi != 2 - 2 * prof.genus) throw InvalidSurface("Euler characteristic mismatch");
  return prof;
}

std::vector<int> SingularityProfile::nonzero_orders() const {
  std::vector<int> out;
  for (int o : orders)
    if (o != 0) out.push_back(o);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {
// 2-coloring of the sign-constraint graph; empty result if an odd loop exists.
std::optional<std::vector<uint8_t>> two_coloring(const SquareTiledSurface& q) {
  std::vector<int> color(q.n, -1);
  std::vector<int> stack{0};
  color[0] = 0;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int s = 0; s < 4; ++s) {
      int slot = 4 * i + s;
      int j = SquareTiledSurface::square_of(q.partner[slot]);
      int want = color[i] ^ (q.rot[slot] ? 1 : 0);
      if (color[j] == -1) {
        color[j] = want;
        stack.push_back(j);
      } else if (color[j] != want) {
        return std::nullopt;
      }
    }
  }
  return std::vector<uint8_t>(color.begin(), color.end());
}
}  // namespace

int epsilon(const SquareTiledSurface& q) { return two_coloring(q) ? 1 : 0; }

SquareTiledSurface flip_squares(const SquareTiledSurface& q, const std::vector<uint8_t>& flip) {
  SquareTiledSurface out;
  out.n = q.n;
  out.partner.assign(4 * q.n, -1);
  out.rot.assign(4 * q.n, 0);
  auto map_slot = [&](int s) {
    int sq = SquareTiledSurface::square_of(s);
    Side side = SquareTiledSurface::side_of(s);
    if (flip[sq]) side = opposite(side);
    return SquareTiledSurface::slot(sq, side);
  };
  for (int s = 0; s < 4 * q.n; ++s) {
    int p = q.partner[s];
    int a = map_slot(s), b = map_slot(p);
    int f = q.rot[s] ^ flip[SquareTiledSurface::square_of(s)] ^ flip[SquareTiledSurface::square_of(p)];
    out.partner[a] = b;
    out.partner[b] = a;
    out.rot[a] = out.rot[b] = (uint8_t)f;
  }
  return out;
}

std::optional<SquareTiledSurface> translation_normal_form(const SquareTiledSurface& q) {
  auto coloring = two_coloring(q);
  if (!coloring) return std::nullopt;
  return flip_squares(q, *coloring);
}

namespace {
// BFS code from a fixed (start, flip) seed. Tree gluings are forced to read as
// translations by choosing each newly met square's flip state.
std::vector<int16_t> bfs_code(const SquareTiledSurface& q, int start, int flip0) {
  std::vector<int> label(q.n, -1), order;
  std::vector<uint8_t> flip(q.n, 0);
  label[start] = 0;
  flip[start] = (uint8_t)flip0;
  order.push_back(start);
  std::vector<int16_t> code;
  code.reserve(12 * q.n + 1);
  code.push_back((int16_t)q.n);
  for (size_t qi = 0; qi < order.size(); ++qi) {
    int i = order[qi];
    for (int sv = 0; sv < 4; ++sv) {
      Side actual = flip[i] ? opposite((Side)sv) : (Side)sv;
      int slot = SquareTiledSurface::slot(i, actual);
      int p = q.partner[slot];
      int j = SquareTiledSurface::square_of(p);
      Side pside = SquareTiledSurface::side_of(p);
      if (label[j] == -1) {
        flip[j] = (uint8_t)(q.rot[slot] ^ flip[i]);
        label[j] = (int)order.size();
        order.push_back(j);
      }
      int eff = q.rot[slot] ^ flip[i] ^ flip[j];
      Side pview = flip[j] ? opposite(pside) : pside;
      code.push_back((int16_t)label[j]);
      code.push_back((int16_t)pview);
      code.push_back((int16_t)eff);
    }
  }
  return code;
}
}  // namespace

std::string canonical_form(const SquareTiledSurface& q) {
  std::vector<int16_t> best;
  for (int start = 0; start < q.n; ++start)
    for (int f = 0; f < 2; ++f) {
      auto code = bfs_code(q, start, f);
      if (best.empty() || code < best) best = std::move(code);
    }
  std::string bytes;
  bytes.reserve(best.size() * 2);
  for (int16_t v : best) {
    bytes.push_back((char)(v & 0xff));
    bytes.push_back((char)((v >> 8) & 0xff));
  }
  return bytes;
}

std::vector<int> canonical_vertex_labels(const SquareTiledSurface& q) {
  // winning seed of the canonical form, first in scan order
  std::vector<int16_t> best;
  int bstart = 0, bf = 0;
  for (int start = 0; start < q.n; ++start)
    for (int f = 0; f < 2; ++f) {
      auto code = bfs_code(q, start, f);
      if (best.empty() || code < best) {
        best = std::move(code);
        bstart = start;
        bf = f;
      }
    }
  std::vector<int> label(q.n, -1), order;
  std::vector<uint8_t> flip(q.n, 0);
  label[bstart] = 0;
  flip[bstart] = (uint8_t)bf;
  order.push_back(bstart);
  for (size_t qi = 0; qi < order.size(); ++qi) {
    int i = order[qi];
    for (int sv = 0; sv < 4; ++sv) {
      Side actual = flip[i] ? opposite((Side)sv) : (Side)sv;
      int slot = SquareTiledSurface::slot(i, actual);
      int j = SquareTiledSurface::square_of(q.partner[slot]);
      if (label[j] == -1) {
        flip[j] = (uint8_t)(q.rot[slot] ^ flip[i]);
        label[j] = (int)order.size();
        order.push_back(j);
      }
    }
  }
  SingularityProfile prof = singularity_profile(q);
  std::vector<int> cyc_of(4 * q.n, -1);
  for (int c = 0; c < (int)prof.cycles.size(); ++c)
    for (int corner : prof.cycles[c]) cyc_of[corner] = c;
  std::vector<int> out(prof.cycles.size(), -1);
  int next = 0;
  for (int i : order)
    for (int cv = 0; cv < 4; ++cv) {
      int corner = 4 * i + (flip[i] ? (cv + 2) % 4 : cv);
      int cyc = cyc_of[corner];
      if (out[cyc] == -1) out[cyc] = next++;
    }
  return out;
}

SquareTiledSurface rotate90(const SquareTiledSurface& q) {
  // +90 rotation: old R face becomes the new T face, etc.
  auto newside = [](Side s) {
    switch (s) {
      case R: return T;
      case T: return L;
      case L: return B;
      default: return R;
    }
  };
  SquareTiledSurface out;
  out.n = q.n;
  out.partner.assign(4 * q.n, -1);
  out.rot.assign(4 * q.n, 0);
  for (int s = 0; s < 4 * q.n; ++s) {
    int p = q.partner[s];
    int a = SquareTiledSurface::slot(SquareTiledSurface::square_of(s), newside(SquareTiledSurface::side_of(s)));
    int b = SquareTiledSurface::slot(SquareTiledSurface::square_of(p), newside(SquareTiledSurface::side_of(p)));
    out.partner[a] = b;
    out.partner[b] = a;
    out.rot[a] = out.rot[b] = q.rot[s];
  }
  return out;
}

std::string encode(const SquareTiledSurface& q) {
  std::ostringstream os;
  os << "n=" << q.n << "\n";
  for (int s = 0; s < 4 * q.n; ++s) {
    int p = q.partner[s];
    if (p < s) continue;
    os << SquareTiledSurface::square_of(s) + 1 << ":" << side_name(SquareTiledSurface::side_of(s)) << " "
       << SquareTiledSurface::square_of(p) + 1 << ":" << side_name(SquareTiledSurface::side_of(p)) << " "
       << (q.rot[s] ? "r" : "t") << "\n";
  }
  return os.str();
}

namespace {
std::vector<int> parse_cycles(const std::string& text, int& max_elem) {
  // "(1 2)(3)" -> permutation; singletons may be omitted.
  std::vector<std::vector<int>> cycles;
  std::vector<int> cur;
  std::string num;
  bool in = false;
  auto flush_num = [&] {
    if (!num.empty()) {
      cur.push_back(std::stoi(num) - 1);
      num.clear();
    }
  };
  for (char c : text) {
    if (c == '(') {
      in = true;
      cur.clear();
    } else if (c == ')') {
      flush_num();
      in = false;
      cycles.push_back(cur);
    } else if (std::isdigit((unsigned char)c)) {
      num.push_back(c);
    } else {
      flush_num();
    }
  }
  if (in) throw InvalidSurface("unbalanced cycle notation");
  for (auto& cy : cycles)
    for (int x : cy) max_elem = std::max(max_elem, x + 1);
  std::vector<int> perm;
  auto build = [&](int n) {
    perm.assign(n, -1);
    for (auto& cy : cycles)
      for (size_t i = 0; i < cy.size(); ++i) {
        if (cy[i] >= n || perm[cy[i]] != -1) throw InvalidSurface("bad cycle notation");
        perm[cy[i]] = cy[(i + 1) % cy.size()];
      }
    for (int i = 0; i < n; ++i)
      if (perm[i] == -1) perm[i] = i;
  };
  build(max_elem);
  return perm;
}
}  // namespace

SquareTiledSurface decode(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    while (!line.empty() && std::isspace((unsigned char)line.back())) line.pop_back();
    size_t b = 0;
    while (b < line.size() && std::isspace((unsigned char)line[b])) ++b;
    line = line.substr(b);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw InvalidSurface("empty surface text");
  if (lines[0].rfind("h=", 0) == 0 || (lines.size() > 1 && lines[1].rfind("v=", 0) == 0 && lines[0].rfind("h=", 0) == 0)) {
    std::string all;
    for (auto& l : lines) all += l + " ";
    auto hpos = all.find("h=");
    auto vpos = all.find("v=");
    if (hpos == std::string::npos || vpos == std::string::npos)
      throw InvalidSurface("shorthand needs h= and v=");
    std::string hs = all.substr(hpos + 2, vpos - (hpos + 2));
    std::string vs = all.substr(vpos + 2);
    int n = 1;
    auto h = parse_cycles(hs, n);
    auto v = parse_cycles(vs, n);
    // Re-parse so both have the common size.
    int m = n;
    h = parse_cycles(hs, m);
    v = parse_cycles(vs, m);
    h.resize(m);
    v.resize(m);
    for (int i = (int)h.size(); i < m; ++i) h.push_back(i);
    for (int i = (int)v.size(); i < m; ++i) v.push_back(i);
    return build_from_permutations(h, v);
  }
  if (lines[0].rfind("n=", 0) != 0) throw InvalidSurface("expected n=<int>");
  int n = std::stoi(lines[0].substr(2));
  if (n <= 0) throw InvalidSurface("n must be positive");
  SquareTiledSurface q;
  q.n = n;
  q.partner.assign(4 * n, -1);
  q.rot.assign(4 * n, 0);
  auto parse_slot = [&](const std::string& tok) {
    auto c = tok.find(':');
    if (c == std::string::npos) throw InvalidSurface("bad slot: " + tok);
    int sq = std::stoi(tok.substr(0, c)) - 1;
    std::string sd = tok.substr(c + 1);
    Side side;
    if (sd == "R") side = R;
    else if (sd == "L") side = L;
    else if (sd == "T") side = T;
    else if (sd == "B") side = B;
    else throw InvalidSurface("bad side: " + sd);
    if (sq < 0 || sq >= n) throw InvalidSurface("square out of range: " + tok);
    return SquareTiledSurface::slot(sq, side);
  };
  for (size_t i = 1; i < lines.size(); ++i) {
    std::istringstream ls(lines[i]);
    std::string a, b, f;
    if (!(ls >> a >> b >> f)) throw InvalidSurface("bad gluing line: " + lines[i]);
    int x = parse_slot(a), y = parse_slot(b);
    bool rotf;
    if (f == "t" || f == "translation") rotf = false;
    else if (f == "r" || f == "rotation") rotf = true;
    else throw InvalidSurface("bad flag: " + f);
    if (q.partner[x] != -1 || q.partner[y] != -1 || x == y)
      throw InvalidSurface("slot glued twice");
    q.partner[x] = y;
    q.partner[y] = x;
    q.rot[x] = q.rot[y] = rotf ? 1 : 0;
  }
  for (int s = 0; s < 4 * n; ++s)
    if (q.partner[s] == -1) throw InvalidSurface("unglued slot");
  return q;
}

std::string hex_code(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

}  // namespace sqt
