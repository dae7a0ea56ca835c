#include "collabrec/simulator.hpp"

#include <ostream>
#include <string>

#include "collabrec/errors.hpp"

namespace collabrec {

void MetricsSeries::append(ActionKind action, long long sum_reward, long long sum_likable) {
  const long long prev_reward = steps_.empty() ? 0 : steps_.back().cum_reward;
  const long long prev_likable = steps_.empty() ? 0 : steps_.back().cum_likable;
  steps_.push_back({action, sum_reward, sum_likable, prev_reward + sum_reward,
                    prev_likable + sum_likable});
}

double MetricsSeries::likable_fraction(std::size_t from, std::size_t to) const {
  if (from < 1 || from > to || to > steps_.size())
    throw DomainError("likable_fraction needs 1 <= from <= to <= T");
  long long likable = 0;
  for (std::size_t t = from; t <= to; ++t) likable += steps_[t - 1].sum_likable;
  return static_cast<double>(likable) / (static_cast<double>(n_) * static_cast<double>(to - from + 1));
}

double MetricsSeries::avg_cumulative_reward(std::size_t T) const {
  if (T > steps_.size()) throw DomainError("avg_cumulative_reward: T beyond series");
  if (T == 0) return 0.0;
  return static_cast<double>(steps_[T - 1].cum_reward) / static_cast<double>(n_);
}

void MetricsSeries::write_csv(std::ostream& out) const {
  out << "t,action,sum_reward,sum_likable,cum_reward,cum_likable\n";
  for (std::size_t t = 0; t < steps_.size(); ++t) {
    const auto& s = steps_[t];
    out << t + 1 << ',' << to_string(s.action) << ',' << s.sum_reward << ',' << s.sum_likable
        << ',' << s.cum_reward << ',' << s.cum_likable << '\n';
  }
}

Simulator::Simulator(const Environment& env, const Policy& policy, std::uint64_t seed,
                     int threads)
    : Simulator(env, policy, seed, threads,
                SessionState::create(env.n(), env.m(), derive_seed(seed, Stream::Sigma)),
                MetricsSeries(env.n())) {}

Simulator::Simulator(const Environment& env, const Policy& policy, std::uint64_t seed,
                     int threads, SessionState resume_state, MetricsSeries resume_metrics)
    : env_(&env), policy_(&policy), seed_(seed), threads_(threads < 1 ? 1 : threads),
      state_(std::move(resume_state)), metrics_(std::move(resume_metrics)) {
  if (state_.n() != env.n() || state_.m() != env.m())
    throw ConfigError("session shape does not match the environment");
  if (metrics_.n() != env.n() || metrics_.steps() != state_.t())
    throw ConfigError("metrics do not match the session");
}

ActionKind Simulator::advance() {
  const StepPlan plan = policy_->plan(state_, step_seed(seed_, state_.t() + 1), threads_);
  std::vector<Rating> ratings(state_.n());
  long long reward = 0;
  long long likable = 0;
  for (UserId u = 0; u < state_.n(); ++u) {
    const ItemId item = plan.items[u];
    ratings[u] = env_->draw_rating(u, item);
    reward += ratings[u];
    if (env_->likable(u, item)) ++likable;
  }
  state_.record_step(plan.items, ratings, plan.kind == ActionKind::JointExplore);
  metrics_.append(plan.kind, reward, likable);
  return plan.kind;
}

void Simulator::run_until(std::size_t T) {
  if (T > state_.m())
    throw ConfigError("horizon T=" + std::to_string(T) + " exceeds m=" + std::to_string(state_.m()));
  while (state_.t() < T) advance();
}

RunResult run(const Environment& env, const Policy& policy, std::size_t T, std::uint64_t seed,
              int threads) {
  if (T > env.m())
    throw ConfigError("horizon T=" + std::to_string(T) + " exceeds m=" + std::to_string(env.m()));
  Simulator sim(env, policy, seed, threads);
  sim.run_until(T);
  return {sim.metrics(), sim.state()};
}

}  // namespace collabrec
