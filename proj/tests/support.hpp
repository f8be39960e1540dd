// Random instance generators and independent oracles shared by the unit tests
// and the acceptance suite. Oracles deliberately avoid the library's own
// algorithms: plain loops over atoms, grids, closed forms, gradient descent.
#pragma once

#include "carlab/car_analysis.hpp"
#include "carlab/mre_solver.hpp"
#include "carlab/protocol.hpp"

#include <random>
#include <set>
#include <vector>

namespace testsupport {

using namespace carlab;
using Rng = std::mt19937_64;

long uniform_int(Rng& rng, long lo, long hi);
WorldSet numbered_worlds(std::size_t n, const std::string& prefix = "w");
Event random_nonempty_subset(Rng& rng, std::size_t n);
std::vector<Event> random_partition(Rng& rng, std::size_t n, std::size_t max_cells);
/// Positive integer weights 1..hi, normalized.
NaiveDistribution random_positive(Rng& rng, const WorldSet& space, long hi = 9);
/// Like random_positive but with zeros allowed (never all zero).
NaiveDistribution random_with_zeros(Rng& rng, const WorldSet& space, long hi = 9);

/// Event protocol with 2..max_w worlds and 1..max_o distinct observations and
/// random rational kernel rows (zeros allowed). Worlds in no observation get
/// prior mass 0.
Protocol random_event_protocol(Rng& rng, std::size_t max_w, std::size_t max_o);
/// Every supported world is reported by exactly one observation.
Protocol disjoint_support_protocol(Rng& rng);
/// Some world is reported by two observations with positive probability.
Protocol overlapping_support_protocol(Rng& rng);

/// Accurate protocol over 5 worlds with two constraint observations on shared
/// (U1, U2), all four Venn regions nonempty: joint(w, i) = lambda_i q_i(w),
/// alpha_ij = q_i(U_j).
Protocol random_two_constraint_protocol(Rng& rng);

/// Inputs for construct_car_joint: 2..6 worlds, a random partition, 1..4
/// observations with distinct strictly positive alpha rows, positive pr_O and
/// cell conditionals (zeros allowed inside a cell, never the whole cell).
struct ConstructDraw {
  WorldSet space;
  std::vector<Event> cells;
  Vector<Rational> pr_o;
  Matrix<Rational> alphas;
  std::vector<NaiveDistribution> conditionals;
};
ConstructDraw random_construct_draw(Rng& rng, std::size_t min_observations = 1);

struct Atom {
  std::size_t world;
  std::size_t observation;
  Rational mass;
};
std::vector<Atom> atoms_of(const Protocol& p);
/// Pr(world | observation) by summing atoms.
std::vector<Rational> enumerate_posterior(const std::vector<Atom>& atoms, std::size_t worlds, std::size_t observation);
/// Pr(world | U) from the atoms' world marginal.
std::vector<Rational> enumerate_condition(const std::vector<Atom>& atoms, std::size_t worlds, const Event& u);

/// Grid search over coarsening kernels (c_1, c_2, c_3) with every entry a
/// fraction of denominator <= 12. `codes` are the Venn codes of the supported
/// worlds (bit i set when the world lies in U_{i+1}).
bool grid_kernel_feasible(const std::set<int>& codes, bool require_positive);

/// Closed-form MRE for the uniform four-quadrant prior under
/// p(Red-HQ) = alpha p(Red-2nd): returns Pr(Blue).
double judy_closed_form_blue(double alpha);

/// Projected gradient descent for min KL(p || prior) subject to rows; the
/// optimum must be interior. `start` must be feasible and strictly positive.
std::vector<double> projected_gradient_mre(const std::vector<double>& prior, const std::vector<std::vector<double>>& rows,
                                           const std::vector<double>& start, int iterations = 200000);

/// Exact feasible points: random convex combinations of LP vertices reached
/// with random objectives.
std::vector<NaiveDistribution> random_feasible_points(Rng& rng, const LinearConstraintSet& cs, const Event& support,
                                                      std::size_t count);

double kl_bits(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace testsupport
