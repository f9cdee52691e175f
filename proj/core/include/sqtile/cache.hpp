#pragma once
// Versioned line-oriented text cache of census runs: one record per class,
// sorted by (area, canonical code), with precomputed invariants so engines can
// re-filter without recomputing profiles or core types.

#include <iosfwd>
#include <string>
#include <vector>

#include "sqtile/counting.hpp"

namespace sqt {

struct CacheError : Error {
  using Error::Error;
};

struct CacheRecord {
  int area = 0;
  std::string code_hex;         // canonical form, hex
  std::vector<int> orders;      // nonzero singularity orders, sorted
  int genus = 0;
  int eps = 0;
  std::string component;        // "-" when unclassified
  std::string htype, vtype;     // canonical core type keys
  SquareTiledSurface q;
};

struct CacheHeader {
  int version = 1;
  int max_squares = 0;
  std::string stratum = "*";    // Stratum::str() or "*"
  std::string component = "*";  // "*" = unfiltered
  bool labeled = false;
};

struct CensusCache {
  CacheHeader header;
  std::vector<CacheRecord> records;
};

std::string cache_magic();

CensusCache build_cache(int max_squares, const CensusFilter& f, bool labeled, int jobs);

void write_cache(std::ostream& os, const CensusCache& c);
CensusCache read_cache(std::istream& is);  // throws CacheError

// Usable for a run needing `max_squares` under filter `f`: same stratum,
// component, and labeling, and at least as deep.
bool cache_compatible(const CacheHeader& h, int max_squares, const CensusFilter& f,
                      bool labeled);

}  // namespace sqt
