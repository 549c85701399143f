#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "drmdp/mdp.hpp"
#include "drmdp/robust.hpp"

namespace drmdp::mvsa {

/// alpha_n = a / (n + a), beta_n = b / (n + a)^tau.
struct StepSchedule {
  double a = 3.0;
  double b = 0.0;
  double tau = 0.9;

  /// a = 3, tau = 0.9, b = a^tau.
  static StepSchedule standard();
  static StepSchedule with_default_b(double a, double tau);

  /// Throws unless a > 0, tau in (1/2, 1) and 0 < b <= (1 + a)^tau.
  void validate() const;

  /// Human-readable notes for conditions of the convergence theory that fail at this L
  /// (non-integer a, a <= 1 / (2 (1 - L)), L >= 1). Empty when all hold.
  std::vector<std::string> theory_warnings(double lipschitz) const;
};

struct StepSizes {
  double alpha;
  double beta;
};

StepSizes step_sizes(const StepSchedule& sched, long n);

/// Lifted iterate: slow U, fast first/second moment trackers m and g, and the index n of the
/// next update.
struct MvsaState {
  QFunction<double> u;
  QFunction<double> m;
  QFunction<double> g;
  long n = 1;

  /// U = 0, m = 0, g = 1.
  static MvsaState initial(Index dim);
};

/// Deterministic uniform stream. Doubles are built from the top 53 bits of mt19937_64 so the
/// sequence does not depend on the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF next-state sampler over the nominal kernel rows.
class GenerativeModel {
 public:
  explicit GenerativeModel(const Mdp& mdp);

  Index sample(Index z, RandomStream& rng) const;
  Index dim() const { return static_cast<Index>(offsets_.size()) - 1; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Index> successors_;
  std::vector<double> cumulative_;
};

/// Bound B = (r_max + gamma sqrt(2 delta eps)) / (1 - L) on ||U_n||, ||m_n|| and sqrt||g_n||;
/// +inf when L >= 1.
double iterate_bound(const Mdp& mdp, const AmbiguityConfig<double>& cfg);

/// One MVSA iteration in place: slow update from the current (m, g), then one draw per z
/// in z order with Z(z) = max_b U(X(z), b) using the pre-update U, then the fast updates.
void advance(const Mdp& mdp, const GenerativeModel& model, MvsaState& state,
             const AmbiguityConfig<double>& cfg, const StepSchedule& sched, RandomStream& rng);

MvsaState mvsa_step(const Mdp& mdp, const GenerativeModel& model, MvsaState state,
                    const AmbiguityConfig<double>& cfg, const StepSchedule& sched,
                    RandomStream& rng);

struct Checkpoint {
  long n;
  double error;

  bool operator==(const Checkpoint&) const = default;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;
  MvsaState final_state;
  long elapsed_steps = 0;
};

/// Called after every update with the post-update state.
using StepObserver = std::function<void(const MvsaState&)>;

/// N updates from the canonical initialization. Checkpoint n is the error ||U - u_ref||_inf
/// after n updates; grid entries must be strictly increasing and lie in [1, N].
RunRecord run_mvsa(const Mdp& mdp, const AmbiguityConfig<double>& cfg,
                   const StepSchedule& sched, long steps, std::uint64_t seed,
                   const QFunction<double>& u_ref, const std::vector<long>& checkpoint_grid,
                   const StepObserver& observer = {});

/// Independent runs, one per seed, returned in seed-list order. Runs are spread over
/// `threads` workers (0 = hardware concurrency).
std::vector<RunRecord> batch_runs(const Mdp& mdp, const AmbiguityConfig<double>& cfg,
                                  const StepSchedule& sched, long steps,
                                  const std::vector<std::uint64_t>& seeds,
                                  const QFunction<double>& u_ref,
                                  const std::vector<long>& checkpoint_grid,
                                  unsigned threads = 0);

/// About `count` log-spaced integers in [1, steps], always including 1 and steps.
std::vector<long> log_grid(long steps, int count);

}  // namespace drmdp::mvsa
