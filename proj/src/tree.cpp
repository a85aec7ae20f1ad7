#include "cantor/tree.hpp"

#include "cantor/error.hpp"

#include <algorithm>
#include <sstream>

namespace cantor {

namespace {

void require_entries(const std::vector<std::uint64_t>& entries) {
  for (auto n : entries)
    if (n < 2)
      fail(ErrorKind::InvalidIndex, "spherical index entries must be >= 2");
}

void add_prime_factors(std::uint64_t n, std::set<std::uint64_t>& out) {
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0)
      continue;
    out.insert(p);
    while (n % p == 0)
      n /= p;
  }
  if (n > 1)
    out.insert(n);
}

} // namespace

SphericalIndex SphericalIndex::eventually_periodic(
    std::vector<std::uint64_t> prefix, std::vector<std::uint64_t> cycle) {
  if (cycle.empty())
    fail(ErrorKind::InvalidIndex, "eventually periodic index needs a nonempty cycle");
  require_entries(prefix);
  require_entries(cycle);
  SphericalIndex index;
  index.mode_ = Mode::EventuallyPeriodic;
  index.prefix_ = std::move(prefix);
  index.cycle_ = std::move(cycle);
  return index;
}

SphericalIndex SphericalIndex::geometric(std::vector<std::uint64_t> prefix,
                                         std::uint64_t ratio) {
  if (prefix.empty())
    fail(ErrorKind::InvalidIndex, "geometric index needs a nonempty prefix");
  if (ratio < 2)
    fail(ErrorKind::InvalidIndex, "geometric ratio must be >= 2");
  require_entries(prefix);
  SphericalIndex index;
  index.mode_ = Mode::Geometric;
  index.prefix_ = std::move(prefix);
  index.ratio_ = ratio;
  return index;
}

std::uint64_t SphericalIndex::at(std::size_t level) const {
  if (level == 0)
    fail(ErrorKind::InvalidIndex, "levels of the spherical index start at 1");
  if (level <= prefix_.size())
    return prefix_[level - 1];
  const std::size_t past = level - prefix_.size();
  if (mode_ == Mode::EventuallyPeriodic)
    return cycle_[(past - 1) % cycle_.size()];
  unsigned __int128 value = prefix_.back();
  for (std::size_t i = 0; i < past; ++i) {
    value *= ratio_;
    if (value > static_cast<unsigned __int128>(UINT64_MAX))
      fail(ErrorKind::InvalidIndex,
           "spherical index entry at level " + std::to_string(level) +
               " exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

SphericalIndex SphericalIndex::shifted(std::size_t levels) const {
  if (levels == 0)
    return *this;
  SphericalIndex out;
  out.mode_ = mode_;
  out.ratio_ = ratio_;
  if (levels < prefix_.size()) {
    out.prefix_.assign(prefix_.begin() + static_cast<std::ptrdiff_t>(levels),
                       prefix_.end());
    out.cycle_ = cycle_;
    return out;
  }
  if (mode_ == Mode::EventuallyPeriodic) {
    const std::size_t rot = (levels - prefix_.size()) % cycle_.size();
    out.cycle_.assign(cycle_.begin() + static_cast<std::ptrdiff_t>(rot), cycle_.end());
    out.cycle_.insert(out.cycle_.end(), cycle_.begin(),
                      cycle_.begin() + static_cast<std::ptrdiff_t>(rot));
    return out;
  }
  out.prefix_ = {at(levels + 1)};
  return out;
}

std::optional<std::uint64_t> SphericalIndex::constant_degree() const {
  if (mode_ != Mode::EventuallyPeriodic)
    return std::nullopt;
  const auto d = cycle_.front();
  auto same = [d](std::uint64_t n) { return n == d; };
  if (std::all_of(prefix_.begin(), prefix_.end(), same) &&
      std::all_of(cycle_.begin(), cycle_.end(), same))
    return d;
  return std::nullopt;
}

std::optional<std::uint64_t> SphericalIndex::bound() const {
  if (mode_ != Mode::EventuallyPeriodic)
    return std::nullopt;
  std::uint64_t m = *std::max_element(cycle_.begin(), cycle_.end());
  for (auto n : prefix_)
    m = std::max(m, n);
  return m;
}

BigInt SphericalIndex::level_size(std::size_t level) const {
  BigInt size = 1;
  for (std::size_t l = 1; l <= level; ++l)
    size *= at(l);
  return size;
}

std::uint64_t SphericalIndex::level_size_capped(std::size_t level,
                                                std::uint64_t cap) const {
  std::uint64_t size = 1;
  for (std::size_t l = 1; l <= level; ++l) {
    const std::uint64_t n = at(l);
    if (size > cap / n)
      fail(ErrorKind::CapExceeded, "level " + std::to_string(level) +
                                       " has more than " + std::to_string(cap) +
                                       " vertices");
    size *= n;
  }
  if (size > cap)
    fail(ErrorKind::CapExceeded, "level " + std::to_string(level) +
                                     " has more than " + std::to_string(cap) +
                                     " vertices");
  return size;
}

std::set<std::uint64_t> SphericalIndex::prime_support() const {
  std::set<std::uint64_t> primes;
  for (auto n : prefix_)
    add_prime_factors(n, primes);
  if (mode_ == Mode::EventuallyPeriodic) {
    for (auto n : cycle_)
      add_prime_factors(n, primes);
  } else {
    add_prime_factors(ratio_, primes);
  }
  return primes;
}

nlohmann::json SphericalIndex::to_json() const {
  if (mode_ == Mode::EventuallyPeriodic)
    return {{"mode", "eventually_periodic"}, {"prefix", prefix_}, {"cycle", cycle_}};
  return {{"mode", "geometric"}, {"prefix", prefix_}, {"ratio", ratio_}};
}

SphericalIndex SphericalIndex::from_json(const nlohmann::json& j) {
  try {
    const auto mode = j.at("mode").get<std::string>();
    auto prefix = j.value("prefix", std::vector<std::uint64_t>{});
    if (mode == "eventually_periodic")
      return eventually_periodic(std::move(prefix),
                                 j.at("cycle").get<std::vector<std::uint64_t>>());
    if (mode == "geometric")
      return geometric(std::move(prefix), j.at("ratio").get<std::uint64_t>());
    fail(ErrorKind::InvalidIndex, "unknown spherical index mode '" + mode + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidIndex, std::string("malformed spherical index: ") + e.what());
  }
}

void validate_word(const SphericalIndex& index, const Word& word) {
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] >= index.at(i + 1))
      fail(ErrorKind::InvalidDigit, "digit " + std::to_string(word[i]) +
                                        " out of range at level " +
                                        std::to_string(i + 1));
  }
}

Rational cylinder_measure(const SphericalIndex& index, const Vertex& v) {
  validate_word(index, v.digits);
  return Rational(BigInt(1), index.level_size(v.level()));
}

MetricValue boundary_metric(const SphericalIndex& index, const BoundaryPrefix& x,
                            const BoundaryPrefix& y) {
  if (x.depth() != y.depth())
    fail(ErrorKind::IndexMismatch, "boundary prefixes have different depths");
  validate_word(index, x.digits);
  validate_word(index, y.digits);
  MetricValue out;
  for (std::size_t i = 0; i < x.depth(); ++i) {
    if (x.digits[i] != y.digits[i]) {
      out.resolved = true;
      out.first_difference = i + 1;
      out.value = inverse_power_of_two(static_cast<unsigned>(i + 1));
      return out;
    }
  }
  out.value = inverse_power_of_two(static_cast<unsigned>(x.depth()));
  return out;
}

LevelCodec::LevelCodec(const SphericalIndex& index, std::size_t level,
                       std::uint64_t cap) {
  size_ = index.level_size_capped(level, cap);
  radices_.reserve(level);
  for (std::size_t l = 1; l <= level; ++l)
    radices_.push_back(index.at(l));
}

std::uint64_t LevelCodec::rank(const Word& word) const {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < radices_.size(); ++i)
    r = r * radices_[i] + word[i];
  return r;
}

Word LevelCodec::unrank(std::uint64_t rank) const {
  Word word(radices_.size());
  for (std::size_t i = radices_.size(); i-- > 0;) {
    word[i] = rank % radices_[i];
    rank /= radices_[i];
  }
  return word;
}

std::string word_to_string(const Word& word) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < word.size(); ++i)
    out << (i ? "," : "") << word[i];
  out << ')';
  return out.str();
}

Word parse_word(const std::string& text) {
  Word word;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](char c) { return c == ' ' || c == '(' || c == ')'; }),
                token.end());
    if (token.empty())
      continue;
    try {
      word.push_back(std::stoull(token));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidDigit, "cannot parse digit '" + token + "'");
    }
  }
  return word;
}

} // namespace cantor
