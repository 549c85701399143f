#include "drmdp/mvsa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "drmdp/error.hpp"

namespace drmdp::mvsa {

StepSchedule StepSchedule::standard() { return with_default_b(3.0, 0.9); }

StepSchedule StepSchedule::with_default_b(double a, double tau) {
  return StepSchedule{a, std::pow(a, tau), tau};
}

void StepSchedule::validate() const {
  require(a > 0.0 && std::isfinite(a), ErrorKind::InvalidArgument, "step size a must be > 0");
  require(tau > 0.5 && tau < 1.0, ErrorKind::InvalidArgument, "tau must lie in (1/2, 1)");
  require(b > 0.0 && b <= std::pow(1.0 + a, tau) * (1.0 + 1e-12), ErrorKind::InvalidArgument,
          "b must lie in (0, (1 + a)^tau]");
}

std::vector<std::string> StepSchedule::theory_warnings(double lipschitz) const {
  std::vector<std::string> notes;
  if (lipschitz >= 1.0) {
    notes.push_back("L = " + std::to_string(lipschitz) +
                    " >= 1: contraction and convergence guarantees do not apply");
  } else if (a <= 1.0 / (2.0 * (1.0 - lipschitz))) {
    notes.push_back("a = " + std::to_string(a) + " <= 1/(2(1-L)) = " +
                    std::to_string(1.0 / (2.0 * (1.0 - lipschitz))));
  }
  if (a != std::floor(a)) notes.push_back("a is not an integer");
  return notes;
}

StepSizes step_sizes(const StepSchedule& sched, long n) {
  require(n >= 1, ErrorKind::InvalidArgument, "step index n must be >= 1");
  const double shifted = static_cast<double>(n) + sched.a;
  return {sched.a / shifted, sched.b / std::pow(shifted, sched.tau)};
}

MvsaState MvsaState::initial(Index dim) {
  return MvsaState{QFunction<double>::Zero(dim), QFunction<double>::Zero(dim),
                   QFunction<double>::Ones(dim), 1};
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

GenerativeModel::GenerativeModel(const Mdp& mdp) {
  const Index d = mdp.dim();
  offsets_.reserve(static_cast<std::size_t>(d) + 1);
  offsets_.push_back(0);
  for (Index z = 0; z < d; ++z) {
    double acc = 0.0;
    for (Index s = 0; s < mdp.n_states(); ++s) {
      const double p = mdp.kernel()(z, s);
      if (p > 0.0) {
        acc += p;
        successors_.push_back(s);
        cumulative_.push_back(acc);
      }
    }
    cumulative_.back() = 1.0;
    offsets_.push_back(successors_.size());
  }
}

Index GenerativeModel::sample(Index z, RandomStream& rng) const {
  const auto zi = static_cast<std::size_t>(z);
  const auto first = cumulative_.begin() + static_cast<std::ptrdiff_t>(offsets_[zi]);
  const auto last = cumulative_.begin() + static_cast<std::ptrdiff_t>(offsets_[zi + 1]);
  const double u = rng.uniform();
  auto it = std::upper_bound(first, last, u);
  if (it == last) --it;
  return successors_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double iterate_bound(const Mdp& mdp, const AmbiguityConfig<double>& cfg) {
  const double lip = cfg.lipschitz(mdp.gamma());
  if (lip >= 1.0) return std::numeric_limits<double>::infinity();
  return (mdp.r_max() + mdp.gamma() * std::sqrt(2.0 * cfg.delta * cfg.epsilon)) / (1.0 - lip);
}

void advance(const Mdp& mdp, const GenerativeModel& model, MvsaState& state,
             const AmbiguityConfig<double>& cfg, const StepSchedule& sched, RandomStream& rng) {
  const Index d = mdp.dim();
  const auto [alpha, beta] = step_sizes(sched, state.n);
  const double gamma = mdp.gamma();
  const double robust_weight = gamma * std::sqrt(2.0 * cfg.delta);

  const StateValue<double> v = v_max(state.u, mdp.n_actions());
  const auto& r = mdp.reward();
  for (Index z = 0; z < d; ++z) {
    const double m = state.m(z);
    const double g = state.g(z);
    const double sigma = std::sqrt(std::max(g - m * m, 0.0) + cfg.epsilon);
    state.u(z) += alpha * (r(z) + gamma * m - robust_weight * sigma - state.u(z));

    const double sample = v(model.sample(z, rng));
    state.m(z) = m + beta * (sample - m);
    state.g(z) = g + beta * (sample * sample - g);
  }
  ++state.n;
}

MvsaState mvsa_step(const Mdp& mdp, const GenerativeModel& model, MvsaState state,
                    const AmbiguityConfig<double>& cfg, const StepSchedule& sched,
                    RandomStream& rng) {
  advance(mdp, model, state, cfg, sched, rng);
  return state;
}

RunRecord run_mvsa(const Mdp& mdp, const AmbiguityConfig<double>& cfg,
                   const StepSchedule& sched, long steps, std::uint64_t seed,
                   const QFunction<double>& u_ref, const std::vector<long>& checkpoint_grid,
                   const StepObserver& observer) {
  cfg.validate();
  sched.validate();
  require(steps >= 0, ErrorKind::InvalidArgument, "steps must be >= 0");
  require(u_ref.size() == mdp.dim(), ErrorKind::ShapeMismatch, "u_ref length != d");
  for (std::size_t i = 0; i < checkpoint_grid.size(); ++i) {
    require(checkpoint_grid[i] >= 1 && checkpoint_grid[i] <= steps, ErrorKind::InvalidArgument,
            "checkpoint outside [1, N]");
    require(i == 0 || checkpoint_grid[i] > checkpoint_grid[i - 1], ErrorKind::InvalidArgument,
            "checkpoints must be strictly increasing");
  }

  const GenerativeModel model(mdp);
  RandomStream rng(seed);
  RunRecord record;
  record.seed = seed;
  record.final_state = MvsaState::initial(mdp.dim());
  record.checkpoints.reserve(checkpoint_grid.size());

  auto next_checkpoint = checkpoint_grid.begin();
  for (long k = 1; k <= steps; ++k) {
    advance(mdp, model, record.final_state, cfg, sched, rng);
    if (observer) observer(record.final_state);
    if (next_checkpoint != checkpoint_grid.end() && *next_checkpoint == k) {
      record.checkpoints.push_back({k, inf_norm_diff(record.final_state.u, u_ref)});
      ++next_checkpoint;
    }
  }
  record.elapsed_steps = steps;
  return record;
}

std::vector<RunRecord> batch_runs(const Mdp& mdp, const AmbiguityConfig<double>& cfg,
                                  const StepSchedule& sched, long steps,
                                  const std::vector<std::uint64_t>& seeds,
                                  const QFunction<double>& u_ref,
                                  const std::vector<long>& checkpoint_grid, unsigned threads) {
  require(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size(),
          ErrorKind::InvalidArgument, "seeds must be distinct");
  std::vector<RunRecord> records(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(seeds.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        records[i] = run_mvsa(mdp, cfg, sched, steps, seeds[i], u_ref, checkpoint_grid);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<long> log_grid(long steps, int count) {
  require(steps >= 1 && count >= 2, ErrorKind::InvalidArgument, "need steps >= 1, count >= 2");
  std::vector<long> grid;
  const double top = std::log(static_cast<double>(steps));
  for (int i = 0; i < count; ++i) {
    const long n = std::lround(std::exp(top * i / (count - 1)));
    if (grid.empty() || n > grid.back()) grid.push_back(std::clamp(n, 1L, steps));
  }
  if (grid.back() != steps) grid.push_back(steps);
  return grid;
}

}  // namespace drmdp::mvsa
