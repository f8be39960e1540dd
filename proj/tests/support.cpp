#include "support.hpp"

#include "carlab/exact_lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace testsupport {

long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

WorldSet numbered_worlds(std::size_t n, const std::string& prefix) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return WorldSet(std::move(labels));
}

Event random_nonempty_subset(Rng& rng, std::size_t n) {
  Event e(n);
  while (e.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (uniform_int(rng, 0, 1)) e.insert(i);
    }
  }
  return e;
}

std::vector<Event> random_partition(Rng& rng, std::size_t n, std::size_t max_cells) {
  const auto k = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<long>(std::min(n, max_cells))));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Event> cells(k, Event(n));
  for (std::size_t i = 0; i < n; ++i) {
    // The first k worlds seed the cells so none is empty.
    const std::size_t c = i < k ? i : static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(k) - 1));
    cells[c].insert(order[i]);
  }
  return cells;
}

NaiveDistribution random_positive(Rng& rng, const WorldSet& space, long hi) {
  Vector<Rational> w(static_cast<Eigen::Index>(space.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = Rational(uniform_int(rng, 1, hi));
  return normalize(space, w);
}

NaiveDistribution random_with_zeros(Rng& rng, const WorldSet& space, long hi) {
  Vector<Rational> w(static_cast<Eigen::Index>(space.size()));
  bool any = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = Rational(uniform_int(rng, 0, 2) == 0 ? 0 : uniform_int(rng, 1, hi));
    any = any || !w[i].is_zero();
  }
  if (!any) w[uniform_int(rng, 0, w.size() - 1)] = Rational(1);
  return normalize(space, w);
}

namespace {

std::vector<Event> distinct_subsets(Rng& rng, std::size_t n, std::size_t count) {
  count = std::min(count, (std::size_t{1} << n) - 1);
  std::vector<Event> out;
  while (out.size() < count) {
    Event e = random_nonempty_subset(rng, n);
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(std::move(e));
  }
  return out;
}

ObservationAlphabet event_alphabet(const std::vector<Event>& sets, std::size_t n) {
  std::vector<Observation> items;
  for (std::size_t i = 0; i < sets.size(); ++i) items.emplace_back(EventObservation{"o" + std::to_string(i), sets[i]});
  return ObservationAlphabet(std::move(items), n);
}

// Prior with zero mass on worlds no observation covers.
NaiveDistribution covered_prior(Rng& rng, const WorldSet& space, const std::vector<Event>& sets) {
  const std::size_t n = space.size();
  Vector<Rational> w(static_cast<Eigen::Index>(n));
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool covered = std::any_of(sets.begin(), sets.end(), [&](const Event& e) { return e.contains(i); });
    w[static_cast<Eigen::Index>(i)] = Rational(covered && uniform_int(rng, 0, 3) != 0 ? uniform_int(rng, 1, 9) : 0);
    any = any || !w[static_cast<Eigen::Index>(i)].is_zero();
  }
  if (!any) w[static_cast<Eigen::Index>(sets.front().indices().front())] = Rational(1);
  return normalize(space, w);
}

}  // namespace

Protocol random_event_protocol(Rng& rng, std::size_t max_w, std::size_t max_o) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 2, static_cast<long>(max_w)));
  const auto k = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<long>(max_o)));
  const WorldSet space = numbered_worlds(n);
  const auto sets = distinct_subsets(rng, n, k);
  const auto prior = covered_prior(rng, space, sets);
  Matrix<Rational> kernel = Matrix<Rational>::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sets.size()),
                                                       Rational(0));
  for (std::size_t w = 0; w < n; ++w) {
    std::vector<std::size_t> holders;
    for (std::size_t o = 0; o < sets.size(); ++o) {
      if (sets[o].contains(w)) holders.push_back(o);
    }
    if (holders.empty()) {
      kernel(static_cast<Eigen::Index>(w), 0) = Rational(1);
      continue;
    }
    Rational total(0);
    for (std::size_t o : holders) {
      kernel(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(o)) = Rational(uniform_int(rng, 0, 4));
      total += kernel(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(o));
    }
    if (total.is_zero()) {
      kernel(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(holders[uniform_int(rng, 0, static_cast<long>(holders.size()) - 1)])) =
          Rational(1);
      total = Rational(1);
    }
    for (std::size_t o : holders) kernel(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(o)) /= total;
  }
  return from_kernel(prior, event_alphabet(sets, n), kernel);
}

Protocol disjoint_support_protocol(Rng& rng) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 5));
  const WorldSet space = numbered_worlds(n);
  const auto sets = distinct_subsets(rng, n, static_cast<std::size_t>(uniform_int(rng, 1, 4)));
  const auto prior = covered_prior(rng, space, sets);
  Matrix<Rational> kernel = Matrix<Rational>::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sets.size()),
                                                       Rational(0));
  for (std::size_t w = 0; w < n; ++w) {
    std::vector<std::size_t> holders;
    for (std::size_t o = 0; o < sets.size(); ++o) {
      if (sets[o].contains(w)) holders.push_back(o);
    }
    const std::size_t pick = holders.empty() ? 0 : holders[uniform_int(rng, 0, static_cast<long>(holders.size()) - 1)];
    kernel(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(pick)) = Rational(1);
  }
  return from_kernel(prior, event_alphabet(sets, n), kernel);
}

Protocol overlapping_support_protocol(Rng& rng) {
  for (;;) {
    auto p = random_event_protocol(rng, 5, 4);
    const auto supports = observed_supports(p).sets;
    for (std::size_t i = 0; i < supports.size(); ++i) {
      for (std::size_t j = i + 1; j < supports.size(); ++j) {
        if (supports[i].intersects(supports[j])) return p;
      }
    }
  }
}

Protocol random_two_constraint_protocol(Rng& rng) {
  const std::size_t n = 5;
  const WorldSet space = numbered_worlds(n);
  for (;;) {
    // Region codes: 0 outside, 1 U1 only, 2 U2 only, 3 both.
    std::vector<int> region{0, 1, 2, 3, static_cast<int>(uniform_int(rng, 0, 3))};
    std::shuffle(region.begin(), region.end(), rng);
    Event u1(n), u2(n);
    for (std::size_t w = 0; w < n; ++w) {
      if (region[w] & 1) u1.insert(w);
      if (region[w] & 2) u2.insert(w);
    }
    const auto q1 = random_positive(rng, space);
    const auto q2 = random_positive(rng, space);
    const Rational lambda(uniform_int(rng, 5, 15), 20);
    ConstraintObservation c1{"C1", {u1, u2}, {prob(q1, u1), prob(q1, u2)}, {}};
    ConstraintObservation c2{"C2", {u1, u2}, {prob(q2, u1), prob(q2, u2)}, {}};
    if (c1.targets == c2.targets) continue;
    Matrix<Rational> joint(static_cast<Eigen::Index>(n), 2);
    for (std::size_t w = 0; w < n; ++w) {
      joint(static_cast<Eigen::Index>(w), 0) = lambda * q1[w];
      joint(static_cast<Eigen::Index>(w), 1) = (Rational(1) - lambda) * q2[w];
    }
    return Protocol(space, ObservationAlphabet({std::move(c1), std::move(c2)}, n), std::move(joint));
  }
}

ConstructDraw random_construct_draw(Rng& rng, std::size_t min_observations) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 6));
  ConstructDraw d;
  d.space = numbered_worlds(n);
  d.cells = random_partition(rng, n, 4);
  const auto cells = static_cast<Eigen::Index>(d.cells.size());
  // A single cell admits only the all-ones alpha row.
  const auto k = cells == 1 ? Eigen::Index{1}
                            : static_cast<Eigen::Index>(uniform_int(rng, static_cast<long>(min_observations), 4));
  d.alphas = Matrix<Rational>(k, cells);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (;;) {
      Rational total(0);
      for (Eigen::Index j = 0; j < cells; ++j) {
        d.alphas(i, j) = Rational(uniform_int(rng, 1, 9));
        total += d.alphas(i, j);
      }
      for (Eigen::Index j = 0; j < cells; ++j) d.alphas(i, j) /= total;
      bool duplicate = false;
      for (Eigen::Index r = 0; r < i; ++r) duplicate = duplicate || d.alphas.row(r) == d.alphas.row(i);
      if (!duplicate) break;
    }
  }
  d.pr_o = Vector<Rational>(k);
  Rational total(0);
  for (Eigen::Index i = 0; i < k; ++i) {
    d.pr_o[i] = Rational(uniform_int(rng, 1, 9));
    total += d.pr_o[i];
  }
  for (Eigen::Index i = 0; i < k; ++i) d.pr_o[i] /= total;
  for (const auto& cell : d.cells) {
    Vector<Rational> w = Vector<Rational>::Constant(static_cast<Eigen::Index>(n), Rational(0));
    bool any = false;
    for (std::size_t x : cell.indices()) {
      w[static_cast<Eigen::Index>(x)] = Rational(uniform_int(rng, 0, 4) == 0 ? 0 : uniform_int(rng, 1, 9));
      any = any || !w[static_cast<Eigen::Index>(x)].is_zero();
    }
    if (!any) w[static_cast<Eigen::Index>(cell.indices().front())] = Rational(1);
    d.conditionals.push_back(normalize(d.space, w));
  }
  return d;
}

std::vector<Atom> atoms_of(const Protocol& p) {
  std::vector<Atom> out;
  for (std::size_t w = 0; w < p.world_count(); ++w) {
    for (std::size_t o = 0; o < p.observation_count(); ++o) {
      if (!p.mass(w, o).is_zero()) out.push_back({w, o, p.mass(w, o)});
    }
  }
  return out;
}

std::vector<Rational> enumerate_posterior(const std::vector<Atom>& atoms, std::size_t worlds, std::size_t observation) {
  std::vector<Rational> out(worlds, Rational(0));
  Rational total(0);
  for (const auto& a : atoms) {
    if (a.observation != observation) continue;
    out[a.world] += a.mass;
    total += a.mass;
  }
  for (auto& x : out) x /= total;
  return out;
}

std::vector<Rational> enumerate_condition(const std::vector<Atom>& atoms, std::size_t worlds, const Event& u) {
  std::vector<Rational> out(worlds, Rational(0));
  Rational total(0);
  for (const auto& a : atoms) {
    if (!u.contains(a.world)) continue;
    out[a.world] += a.mass;
    total += a.mass;
  }
  for (auto& x : out) x /= total;
  return out;
}

bool grid_kernel_feasible(const std::set<int>& codes, bool require_positive) {
  constexpr long kL = 27720;  // lcm(1..12)
  static const std::vector<long> grid = [] {
    std::set<long> values;
    for (long b = 1; b <= 12; ++b) {
      for (long a = 0; a <= b; ++a) values.insert(a * (kL / b));
    }
    return std::vector<long>(values.begin(), values.end());
  }();
  if (require_positive) {
    for (int bit = 0; bit < 3; ++bit) {
      if (std::none_of(codes.begin(), codes.end(), [&](int c) { return c & (1 << bit); })) return false;
    }
  }
  for (long c1 : grid) {
    for (long c2 : grid) {
      for (long c3 : grid) {
        if (require_positive && (c1 == 0 || c2 == 0 || c3 == 0)) continue;
        const bool ok = std::all_of(codes.begin(), codes.end(), [&](int code) {
          return ((code & 1) ? c1 : 0) + ((code & 2) ? c2 : 0) + ((code & 4) ? c3 : 0) == kL;
        });
        if (ok) return true;
      }
    }
  }
  return false;
}

double judy_closed_form_blue(double alpha) {
  // p ~ prior * exp(t c) with c = (0, 0, 1, -alpha); the odds row forces
  // e^t = alpha e^{-alpha t}.
  const double t = std::log(alpha) / (1.0 + alpha);
  const double z = 2.0 + std::exp(t) + std::exp(-alpha * t);
  return 2.0 / z;
}

std::vector<double> projected_gradient_mre(const std::vector<double>& prior, const std::vector<std::vector<double>>& rows,
                                           const std::vector<double>& start, int iterations) {
  const auto n = static_cast<Eigen::Index>(prior.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()) + 1, n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index w = 0; w < n; ++w) m(static_cast<Eigen::Index>(r), w) = rows[r][static_cast<std::size_t>(w)];
  }
  m.row(m.rows() - 1).setOnes();
  const Eigen::MatrixXd null_basis = m.fullPivLu().kernel();
  const Eigen::MatrixXd q = null_basis.householderQr().householderQ() * Eigen::MatrixXd::Identity(n, null_basis.cols());
  const Eigen::MatrixXd proj = q * q.transpose();

  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(start.data(), n);
  const Eigen::VectorXd pr = Eigen::Map<const Eigen::VectorXd>(prior.data(), n);
  const auto f = [&](const Eigen::VectorXd& x) { return (x.array() * (x.array() / pr.array()).log()).sum(); };
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd g = ((p.array() / pr.array()).log() + 1.0).matrix();
    const Eigen::VectorXd d = -(proj * g);
    if (d.norm() < 1e-15) break;
    double t = 1.0;
    const double fp = f(p);
    while (t > 1e-20) {
      const Eigen::VectorXd next = p + t * d;
      if ((next.array() > 0).all() && f(next) <= fp + 1e-4 * t * g.dot(d)) break;
      t *= 0.5;
    }
    if (t <= 1e-20) break;
    p += t * d;
  }
  return std::vector<double>(p.data(), p.data() + n);
}

std::vector<NaiveDistribution> random_feasible_points(Rng& rng, const LinearConstraintSet& cs, const Event& support,
                                                      std::size_t count) {
  const auto idx = support.indices();
  const auto k = static_cast<Eigen::Index>(idx.size());
  const auto m = static_cast<Eigen::Index>(cs.rows.size());
  Matrix<Rational> a(m + 1, k);
  Vector<Rational> b(m + 1);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index j = 0; j < k; ++j) a(r, j) = cs.rows[static_cast<std::size_t>(r)].coefficients[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)])];
    b[r] = cs.rows[static_cast<std::size_t>(r)].rhs;
  }
  for (Eigen::Index j = 0; j < k; ++j) a(m, j) = Rational(1);
  b[m] = Rational(1);

  std::vector<Vector<Rational>> vertices;
  for (int draw = 0; draw < 12; ++draw) {
    Vector<Rational> c(k);
    for (Eigen::Index j = 0; j < k; ++j) c[j] = Rational(uniform_int(rng, -5, 5));
    const auto res = lp::minimize(a, b, c);
    if (res.status == lp::LpStatus::Optimal) vertices.push_back(res.x);
  }
  std::vector<NaiveDistribution> out;
  if (vertices.empty()) return out;
  for (std::size_t i = 0; i < count; ++i) {
    Vector<Rational> mix = Vector<Rational>::Constant(k, Rational(0));
    Rational total(0);
    const long parts = uniform_int(rng, 1, 3);
    for (long s = 0; s < parts; ++s) {
      const Rational weight(uniform_int(rng, 1, 7));
      const auto& v = vertices[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(vertices.size()) - 1))];
      for (Eigen::Index j = 0; j < k; ++j) mix[j] += weight * v[j];
      total += weight;
    }
    Vector<Rational> full = Vector<Rational>::Constant(static_cast<Eigen::Index>(cs.space.size()), Rational(0));
    for (Eigen::Index j = 0; j < k; ++j) full[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)])] = mix[j] / total;
    out.emplace_back(cs.space, std::move(full));
  }
  return out;
}

double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) total += p[i] * std::log2(p[i] / q[i]);
  }
  return total;
}

}  // namespace testsupport
