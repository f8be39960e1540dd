#include "carlab/protocol.hpp"

#include <algorithm>
#include <thread>

namespace carlab {

Protocol from_kernel(const NaiveDistribution& prior, ObservationAlphabet alphabet, const Matrix<Rational>& kernel) {
  const auto worlds = static_cast<Eigen::Index>(prior.size());
  const auto obs = static_cast<Eigen::Index>(alphabet.size());
  if (kernel.rows() != worlds || kernel.cols() != obs) {
    throw Error(ErrorCode::ValidationError, "kernel shape does not match worlds x observations");
  }
  Matrix<Rational> joint(worlds, obs);
  for (Eigen::Index w = 0; w < worlds; ++w) {
    Rational row_total(0);
    for (Eigen::Index o = 0; o < obs; ++o) {
      if (kernel(w, o) < Rational(0)) throw Error(ErrorCode::ValidationError, "negative kernel entry");
      row_total += kernel(w, o);
      joint(w, o) = prior[static_cast<std::size_t>(w)] * kernel(w, o);
    }
    if (row_total != Rational(1)) {
      throw Error(ErrorCode::RowNotNormalized, "kernel row for world \"" +
                                                   prior.space().label(static_cast<std::size_t>(w)) +
                                                   "\" sums to " + row_total.str());
    }
  }
  return Protocol(prior.space(), std::move(alphabet), std::move(joint));
}

std::vector<std::optional<Rational>> kernel_column(const Protocol& p, std::size_t observation) {
  const auto prior = marginal_worlds(p);
  std::vector<std::optional<Rational>> out(p.world_count());
  for (std::size_t w = 0; w < p.world_count(); ++w) {
    if (prior[w] > Rational(0)) out[w] = p.mass(w, observation) / prior[w];
  }
  return out;
}

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct Atom {
  RunSample run;
  unsigned __int128 upper;  // u < upper selects this atom (u in [0, 2^64))
};

std::vector<Atom> cumulative_atoms(const Protocol& p) {
  std::vector<Atom> atoms;
  Rational cumulative(0);
  for (std::size_t w = 0; w < p.world_count(); ++w) {
    for (std::size_t o = 0; o < p.observation_count(); ++o) {
      if (!(p.mass(w, o) > Rational(0))) continue;
      cumulative += p.mass(w, o);
      atoms.push_back({{w, o}, scaled_floor(cumulative, 64)});
    }
  }
  return atoms;
}

void fill(const std::vector<Atom>& atoms, std::uint64_t seed, std::size_t begin, std::size_t end,
          std::vector<RunSample>& out) {
  for (std::size_t i = begin; i < end; ++i) {
    const unsigned __int128 u = splitmix64_at(seed, i);
    auto it = std::upper_bound(atoms.begin(), atoms.end(), u,
                               [](unsigned __int128 value, const Atom& a) { return value < a.upper; });
    // The last threshold is exactly 2^64, so `it` is always valid.
    out[i] = it->run;
  }
}

}  // namespace

std::vector<RunSample> sample_runs(const Protocol& p, std::uint64_t seed, std::size_t n) {
  std::vector<RunSample> out(n);
  if (n == 0) return out;
  fill(cumulative_atoms(p), seed, 0, n, out);
  return out;
}

std::vector<RunSample> sample_runs_parallel(const Protocol& p, std::uint64_t seed, std::size_t n, unsigned threads) {
  std::vector<RunSample> out(n);
  if (n == 0) return out;
  const auto atoms = cumulative_atoms(p);
  threads = std::max(1u, threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(n, t * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    if (begin == end) break;
    workers.emplace_back([&, begin, end] { fill(atoms, seed, begin, end, out); });
  }
  workers.clear();  // join before `out` is handed back
  return out;
}

}  // namespace carlab
