/**
 * @file statesum.hpp
 * @brief Truncated state sums over closed braid diagrams.
 *
 * The two-variable series attached to a knot is computed as a weighted trace
 * over the crossing elements of a braid word: every strand of the closure
 * carries a label, every crossing contributes an element, and the closure
 * condition forces the label tuple to be periodic. The engines here organise
 * that sum in three ways:
 *
 *  - positive: for positive (or, via the mirror, negative) words the sum over
 *    each truncation window is provably finite, so results are exact;
 *  - stratified: for arbitrary words the boundary tuples are enumerated by
 *    stratum weight inside a fixed (x, q) window until two consecutive strata
 *    stop contributing, which is reported as heuristic convergence;
 *  - inverse: for homogeneous words some rows can carry inverted labels,
 *    turning each x-coefficient into an ascending q-series that stabilises
 *    inside the window.
 *
 * Every result stores both the raw sum (a series in u = x^{-1}) and the
 * normalised series (in x, constant term 1) together with the signed monomial
 * connecting them, so the symmetry map raw -> series can be replayed and
 * checked. Verification helpers (classical limit, finite-colour evaluation,
 * determinant polynomial) live here as well.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fk/algebra/laurent.hpp"
#include "fk/algebra/series.hpp"
#include "fk/braid/braid.hpp"
#include "fk/weights/labels.hpp"

namespace fk::statesum {

/// Evaluation strategy. Auto picks by word class: positive/negative words use
/// the exact engine, homogeneous words the inverse engine (ranks 2 and 3),
/// everything else the stratified engine.
enum class Method { Auto, Positive, Stratified, Inverse };

const char* to_string(Method m);

/// Labels assigned to the rows of a closed braid diagram (row 1 first; row 1
/// is always the zero label).
struct StateAssignment {
  std::vector<weights::Label> rows;
  std::string to_string() const;
};

/// Tuning knobs shared by the engines.
struct ComputeOptions {
  /// Worker threads for the boundary enumeration. Results are byte-identical
  /// for every thread count.
  int threads = 1;
  /// q-window (power of q, inclusive) for the truncating engines; unset picks
  /// a window wide enough for the bundled tables.
  std::optional<std::int64_t> q_order;
  /// Largest boundary stratum weight explored before the truncating engines
  /// declare the sum unstable.
  std::int32_t stratum_bound = 64;
  /// Rows the inverse engine treats as inverted (1-based, row 1 excluded).
  /// Empty = detect automatically from the word.
  std::vector<int> invert_rows;
  /// Raise Error(NonConvergence) instead of returning converged = false.
  bool require_convergence = false;
};

/// Contribution bookkeeping for one boundary stratum.
struct StratumDelta {
  std::int32_t weight = 0;        ///< stratum weight (sum of |e_1|)
  std::int64_t boundaries = 0;    ///< tuples enumerated
  std::int64_t contributing = 0;  ///< tuples with a nonzero windowed value
};

struct Diagnostics {
  std::string note;                  ///< human-readable route description
  std::vector<int> inverted_rows;    ///< rows carrying inverted labels
  int inversion_sign = 1;            ///< global sign from closing inverted rows
  std::vector<StratumDelta> strata;  ///< per-stratum contribution record
  std::int64_t boundaries = 0;       ///< total boundary tuples enumerated
  std::int64_t contributing = 0;     ///< total contributing tuples
  std::int64_t peak_states = 0;      ///< largest intermediate label front
};

/// A computed series with its provenance. Invariants: `series` is graded in
/// x with constant term exactly 1; `raw` is the unshifted state-sum value
/// graded in u = x^{-1}; applying the symmetry map u^m -> q^{N m} x^m to
/// `raw` reproduces `prefactor` times `series` coefficient by coefficient
/// within the stored window.
struct FKResult {
  int N = 0;
  Method method = Method::Auto;   ///< engine that actually ran
  braid::BraidWord word;
  algebra::Caps caps;             ///< window the raw sum was accumulated in
  algebra::XSeries raw{algebra::XSeries::Var::U, {}};
  algebra::XSeries series{algebra::XSeries::Var::X, {}};
  algebra::XSeries::Leading prefactor{};
  std::int64_t x_order = 0;
  /// Guaranteed q-window of the reported coefficients (unset = exact).
  std::optional<std::int64_t> q_order;
  bool converged = true;
  bool q_truncated = false;
  Diagnostics diag;
};

/// Exact engine for positive words; negative words are computed through the
/// mirror image and the (q, x) -> (q^{-1}, x^{-1}) symmetry. The reported
/// coefficients through x^x_order are exact (no q-window).
/// Errors: Validation when the closure is not a knot or the word has mixed
/// signs; ResourceCap when the window is too large.
FKResult positive_state_sum(const braid::BraidWord& b, int N,
                            std::int64_t x_order,
                            const ComputeOptions& opt = {});

/// Windowed engine for arbitrary words: sums boundary strata of increasing
/// weight inside the (x_order, q_order) window and declares heuristic
/// convergence after two consecutive strata contribute nothing. When the
/// stratum bound is exhausted first, the result carries converged = false
/// (or Error(NonConvergence) if the options demand convergence).
FKResult stratified_state_sum(const braid::BraidWord& b, int N,
                              std::int64_t x_order, std::int64_t q_order,
                              const ComputeOptions& opt = {});

/// Engine for homogeneous words (ranks 2 and 3): rows whose strands only
/// ever enter negative crossings from below are closed with inverted labels,
/// making each x-coefficient an ascending q-series inside the window.
/// Errors: UnsupportedRank for N > 3; Validation when auto-detection is asked
/// on a non-homogeneous word; NoValidInversion when the requested (or
/// detected) row set is inconsistent with the word.
FKResult inverse_state_sum(const braid::BraidWord& b, int N,
                           std::int64_t x_order, std::int64_t q_order,
                           const ComputeOptions& opt = {});

/// Dispatch on `method` (Auto picks by word class, see Method).
FKResult compute(const braid::BraidWord& b, int N, Method method,
                 std::int64_t x_order, const ComputeOptions& opt = {});

/// The default q-window compute() uses when the options leave it unset.
std::int64_t default_q_order(std::int64_t x_order);

/// Reduced quantum invariant of the closure at finite colour k: the same
/// state sum evaluated in the (k+1)-dimensional label window with x -> q^k,
/// normalised so that colour 0 gives exactly 1. Exact Laurent polynomial.
algebra::MultiLaurent finite_color_invariant(const braid::BraidWord& b, int N,
                                             std::int64_t k);

/// Determinant polynomial of the closure from the reduced Burau
/// representation, normalised symmetrically (p(x) = p(x^{-1}), p(1) = 1).
/// The unknot gives 1.
algebra::MultiLaurent alexander_poly(const braid::BraidWord& b);

/// Outcome of a structural check.
struct CheckReport {
  bool pass = false;
  std::string detail;
};

/// Checks that the q -> 1 limit of the normalised series is the inverse of
/// the determinant polynomial raised to N - 1: multiplying the classical
/// limit by that power must collapse to a single constant term inside the
/// window through x^x_order.
CheckReport classical_limit_check(const FKResult& res, std::int64_t x_order);

/// Replays the symmetry map on the stored raw sum and compares against
/// prefactor * series coefficient by coefficient.
CheckReport weyl_symmetry_check(const FKResult& res);

/// Convenience wrapper: compute with Auto and replay the symmetry map.
CheckReport weyl_symmetry_check(const braid::BraidWord& b, int N,
                                std::int64_t x_order);

}  // namespace fk::statesum
