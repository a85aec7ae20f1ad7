#pragma once

// Reference implementations used only by the tests. They work on plain
// integers and recursion, independent of the library's element machinery.

#include "cantor/tree.hpp"

#include <cstdint>
#include <random>

namespace oracle {

using cantor::Word;

// Binary word read with the first digit least significant.
inline std::uint64_t word_value(const Word& w) {
  std::uint64_t v = 0;
  for (std::size_t i = w.size(); i-- > 0;)
    v = v * 2 + w[i];
  return v;
}

inline Word value_word(std::uint64_t v, std::size_t len) {
  Word w(len);
  for (std::size_t i = 0; i < len; ++i, v >>= 1)
    w[i] = v & 1;
  return w;
}

// Adding machine: w -> w + k mod 2^len.
inline Word odometer(const Word& w, std::int64_t k) {
  const std::uint64_t mod = std::uint64_t{1} << w.size();
  const auto v = (word_value(w) + static_cast<std::uint64_t>(k % static_cast<std::int64_t>(mod) +
                                                              static_cast<std::int64_t>(mod))) %
                 mod;
  return value_word(v, w.size());
}

// Negation: w -> -w mod 2^len.
inline Word negate(const Word& w) {
  const std::uint64_t mod = std::uint64_t{1} << w.size();
  return value_word((mod - word_value(w)) % mod, w.size());
}

// Grigorchuk generators by their recursion.
inline Word grigorchuk(char g, Word w, std::size_t from = 0) {
  for (std::size_t i = from; i < w.size(); ++i) {
    switch (g) {
    case 'a':
      w[i] ^= 1;
      return w;
    case 'b':
      g = w[i] == 0 ? 'a' : 'c';
      break;
    case 'c':
      g = w[i] == 0 ? 'a' : 'd';
      break;
    case 'd':
      if (w[i] == 0)
        return w;
      g = 'b';
      break;
    default:
      return w;
    }
  }
  return w;
}

// Mixed-radix odometer on digits with radices n: +1 with carry to the right.
inline Word mixed_add_one(Word w, const std::vector<std::uint64_t>& n, std::size_t from = 0) {
  for (std::size_t i = from; i < w.size(); ++i) {
    if (++w[i] < n[i])
      return w;
    w[i] = 0;
  }
  return w;
}

inline std::vector<Word> all_words(const std::vector<std::uint64_t>& radices) {
  std::vector<Word> out{Word{}};
  for (auto n : radices) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (std::uint64_t k = 0; k < n; ++k) {
        auto v = w;
        v.push_back(k);
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

} // namespace oracle
