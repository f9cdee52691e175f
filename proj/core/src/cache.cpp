#include "sqtile/cache.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "sqtile/component.hpp"
#include "sqtile/multicurve.hpp"

namespace sqt {

namespace {

std::string join_csv(const std::vector<int>& v) {
  if (v.empty()) return "-";
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::vector<int> split_csv(const std::string& s) {
  std::vector<int> out;
  if (s == "-") return out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

std::string cache_magic() { return "sqtile-census-cache v1"; }

CensusCache build_cache(int max_squares, const CensusFilter& f, bool labeled, int jobs) {
  CensusCache c;
  c.header.max_squares = max_squares;
  c.header.stratum = f.stratum ? f.stratum->str() : "*";
  c.header.component = f.component.empty() ? "*" : f.component;
  c.header.labeled = labeled;
  census(max_squares, f, jobs, true, [&](const SquareTiledSurface& q) {
    CacheRecord r;
    r.area = q.n;
    r.code_hex = hex_code(canonical_form(q));
    auto prof = singularity_profile(q);
    r.orders = prof.nonzero_orders();
    std::sort(r.orders.begin(), r.orders.end());
    r.genus = prof.genus;
    r.eps = epsilon(q);
    try {
      r.component = component_of(q);
    } catch (const UnclassifiedStratum&) {
      r.component = "-";
    }
    r.htype = canonicalize(horizontal_core(q, labeled)).key();
    r.vtype = canonicalize(vertical_core(q, labeled)).key();
    r.q = q;
    c.records.push_back(std::move(r));
  });
  return c;
}

void write_cache(std::ostream& os, const CensusCache& c) {
  os << cache_magic() << "\n";
  os << "version=" << c.header.version << "\n";
  os << "max_squares=" << c.header.max_squares << "\n";
  os << "stratum=" << c.header.stratum << "\n";
  os << "component=" << c.header.component << "\n";
  os << "labeled=" << (c.header.labeled ? 1 : 0) << "\n";
  os << "records=" << c.records.size() << "\n";
  for (const auto& r : c.records) {
    os << r.area << " " << r.code_hex << " " << join_csv(r.orders) << " " << r.genus
       << " " << r.eps << " " << r.component << " " << r.htype << " " << r.vtype << " ";
    std::vector<int> p(r.q.partner.begin(), r.q.partner.end());
    os << join_csv(p) << " ";
    for (uint8_t b : r.q.rot) os << (b ? '1' : '0');
    os << "\n";
  }
}

CensusCache read_cache(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != cache_magic())
    throw CacheError("not a census cache file");
  CensusCache c;
  auto header_int = [&](const std::string& key) {
    if (!std::getline(is, line) || line.rfind(key + "=", 0) != 0)
      throw CacheError("malformed cache header: expected " + key);
    return std::stoll(line.substr(key.size() + 1));
  };
  auto header_str = [&](const std::string& key) {
    if (!std::getline(is, line) || line.rfind(key + "=", 0) != 0)
      throw CacheError("malformed cache header: expected " + key);
    return line.substr(key.size() + 1);
  };
  c.header.version = (int)header_int("version");
  if (c.header.version != 1) throw CacheError("unsupported cache version");
  c.header.max_squares = (int)header_int("max_squares");
  c.header.stratum = header_str("stratum");
  c.header.component = header_str("component");
  c.header.labeled = header_int("labeled") != 0;
  long long nrec = header_int("records");
  for (long long i = 0; i < nrec; ++i) {
    if (!std::getline(is, line)) throw CacheError("truncated cache: missing records");
    std::istringstream ls(line);
    CacheRecord r;
    std::string orders, partner, rot;
    if (!(ls >> r.area >> r.code_hex >> orders >> r.genus >> r.eps >> r.component >>
          r.htype >> r.vtype >> partner >> rot))
      throw CacheError("malformed cache record");
    r.orders = split_csv(orders);
    auto p = split_csv(partner);
    if (p.size() != rot.size() || p.size() % 4 != 0)
      throw CacheError("malformed cache record: surface data");
    r.q.n = (int)p.size() / 4;
    r.q.partner.assign(p.begin(), p.end());
    r.q.rot.clear();
    for (char ch : rot) r.q.rot.push_back(ch == '1');
    require_valid(r.q);
    c.records.push_back(std::move(r));
  }
  for (size_t i = 1; i < c.records.size(); ++i)
    if (std::tie(c.records[i - 1].area, c.records[i - 1].code_hex) >
        std::tie(c.records[i].area, c.records[i].code_hex))
      throw CacheError("cache records out of order");
  return c;
}

bool cache_compatible(const CacheHeader& h, int max_squares, const CensusFilter& f,
                      bool labeled) {
  if (h.max_squares < max_squares) return false;
  if (h.stratum != (f.stratum ? f.stratum->str() : "*")) return false;
  if (h.component != (f.component.empty() ? "*" : f.component)) return false;
  return h.labeled == labeled;
}

}  // namespace sqt
