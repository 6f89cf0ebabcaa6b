#include "tracemob/boundary.hpp"

namespace tracemob {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::vector<LetterIndex> letters_parallel_to(const IndependenceGraph& g, Clique c) {
  std::vector<LetterIndex> out;
  for (LetterIndex a = 0; a < g.letter_count(); ++a) {
    if (!c.contains(a) && parallel(g, Clique::singleton(a), c)) out.push_back(a);
  }
  return out;
}

}  // namespace tracemob
