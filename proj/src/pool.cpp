#include <algorithm>
#include <random>
#include <sstream>

#include "m2m/error.hpp"
#include "m2m/simulator.hpp"

namespace m2m {

std::string_view to_string(AccessMode mode) {
  return mode == AccessMode::Adaptive ? "adaptive" : "naive";
}

std::string_view to_string(Decision decision) {
  return decision == Decision::Regular ? "regular" : "alarm";
}

std::string_view to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::FirstContention: return "first_contention";
    case FrameKind::SecondContention: return "second_contention";
    case FrameKind::ContentionFree: return "contention_free";
  }
  return "unknown";
}

GroupAssignment::GroupAssignment(std::size_t n, std::size_t omega) : omega_(omega) {
  require(n >= 1 && omega >= 1, "GroupAssignment: n and omega must be >= 1");
  groups_.resize((n + omega - 1) / omega);
  for (std::size_t i = 0; i < n; ++i) groups_[i / omega].push_back(i);
}

SlotOutcome SlotOutcome::from(std::vector<std::size_t> transmitters) {
  SlotOutcome s;
  s.kind = transmitters.empty()       ? Kind::Idle
           : transmitters.size() == 1 ? Kind::Singleton
                                      : Kind::Collision;
  s.stations = std::move(transmitters);
  return s;
}

std::size_t max_pool_rs(const ProtocolParams& params, AccessMode mode) {
  const std::size_t pool = params.pool_size();
  const std::size_t contention_free = pool + pool * params.omega;
  if (params.omega < 2) return pool;
  if (mode == AccessMode::NaiveContentionFree) return contention_free;
  // Below the threshold at most delta_c - 1 groups escalate through both frames.
  const std::size_t escalating = std::min(params.delta_c - 1, pool);
  const std::size_t regular = pool + escalating * (params.l1 + params.l2 + params.omega);
  return params.delta_c <= pool ? std::max(regular, contention_free) : regular;
}

void check_deadline_feasibility(const ProtocolParams& params, AccessMode mode, double tau_a_s) {
  const double t_pool = static_cast<double>(max_pool_rs(params, mode)) * params.rs_duration_s;
  if (!(tau_a_s > params.t_r_s + t_pool) || t_pool > params.t_r_s) {
    std::ostringstream os;
    os << "worst-case pool duration " << t_pool << " s with T_R " << params.t_r_s
       << " s violates the alarm deadline " << tau_a_s << " s (omega " << params.omega << ", delta_c "
       << params.delta_c << ")";
    fail(ErrorCategory::Infeasible, os.str());
  }
}

namespace {

class PoolBuilder {
 public:
  PoolBuilder(const ProtocolParams& params, std::span<const StationState> stations, double start_s,
              SplitMix64& rng)
      : params_(params), stations_(stations), start_s_(start_s), rng_(rng) {}

  void resolve(PoolOutcome& out, std::size_t station, std::size_t rs) const {
    const double end = start_s_ + static_cast<double>(rs + 1) * params_.rs_duration_s;
    for (const auto& report : stations_[station].pending)
      out.resolved.push_back({station, rs, report.kind, report.generated_s, end - report.generated_s});
  }

  // One frame slotted ALOHA round; returns stations left in collided slots.
  std::vector<std::size_t> contend(PoolOutcome& out, std::size_t group, FrameKind kind,
                                   const std::vector<std::size_t>& contenders, std::size_t length,
                                   std::size_t& next_rs) {
    std::vector<std::vector<std::size_t>> picks(length);
    std::uniform_int_distribution<std::size_t> slot(0, length - 1);
    for (auto s : contenders) picks[slot(rng_)].push_back(s);

    CommonFrame frame{group, kind, next_rs, {}};
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < length; ++i) {
      auto outcome = SlotOutcome::from(std::move(picks[i]));
      if (outcome.kind == SlotOutcome::Kind::Singleton) resolve(out, outcome.stations.front(), next_rs + i);
      if (outcome.kind == SlotOutcome::Kind::Collision)
        survivors.insert(survivors.end(), outcome.stations.begin(), outcome.stations.end());
      frame.slots.push_back(std::move(outcome));
    }
    next_rs += length;
    out.common_pool.push_back(std::move(frame));
    return survivors;
  }

  void dedicate(PoolOutcome& out, std::size_t group, const GroupAssignment& assignment,
                const std::vector<std::size_t>& pending, std::size_t& next_rs) {
    const std::size_t omega = params_.omega;
    std::vector<std::vector<std::size_t>> slots(omega);
    for (auto s : pending) slots[assignment.in_group_index(s)].push_back(s);
    CommonFrame frame{group, FrameKind::ContentionFree, next_rs, {}};
    for (std::size_t i = 0; i < omega; ++i) {
      if (!slots[i].empty()) resolve(out, slots[i].front(), next_rs + i);
      frame.slots.push_back(SlotOutcome::from(std::move(slots[i])));
    }
    next_rs += omega;
    out.common_pool.push_back(std::move(frame));
  }

 private:
  const ProtocolParams& params_;
  std::span<const StationState> stations_;
  double start_s_;
  SplitMix64& rng_;
};

}  // namespace

PoolOutcome run_pool(std::span<const StationState> stations, const GroupAssignment& assignment,
                     const ProtocolParams& params, AccessMode mode, double pool_start_s, SplitMix64& rng) {
  require(stations.size() == params.n, "run_pool: station count does not match the protocol");
  require(assignment.omega() == params.omega, "run_pool: grouping does not match omega");

  const std::size_t pool = assignment.group_count();
  PoolOutcome out;
  out.start_s = pool_start_s;
  PoolBuilder builder(params, stations, pool_start_s, rng);

  std::vector<std::vector<std::size_t>> transmitters(pool);
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (stations[i].pending.empty()) continue;
    transmitters[assignment.group_of(i)].push_back(i);
    ++out.active;
  }

  out.preallocated.reserve(pool);
  for (std::size_t g = 0; g < pool; ++g) {
    auto slot = SlotOutcome::from(transmitters[g]);
    if (slot.kind == SlotOutcome::Kind::Singleton) builder.resolve(out, slot.stations.front(), g);
    if (slot.kind == SlotOutcome::Kind::Collision) ++out.k_c;
    out.preallocated.push_back(std::move(slot));
  }
  out.decision = out.k_c >= params.delta_c ? Decision::Alarm : Decision::Regular;
  const bool contention_free =
      mode == AccessMode::NaiveContentionFree || out.decision == Decision::Alarm;

  std::size_t next_rs = pool;
  for (std::size_t g = 0; g < pool; ++g) {
    if (out.preallocated[g].kind != SlotOutcome::Kind::Collision) continue;
    auto unresolved = out.preallocated[g].stations;
    if (!contention_free) {
      unresolved = builder.contend(out, g, FrameKind::FirstContention, unresolved, params.l1, next_rs);
      if (!unresolved.empty())
        unresolved = builder.contend(out, g, FrameKind::SecondContention, unresolved, params.l2, next_rs);
    }
    if (!unresolved.empty()) builder.dedicate(out, g, assignment, unresolved, next_rs);
  }

  out.total_rs = next_rs;
  out.pool_duration_s = static_cast<double>(out.total_rs) * params.rs_duration_s;
  return out;
}

ReservationPool::ReservationPool(const ProtocolParams& params, AccessMode mode, double tau_a_s)
    : params_(params), mode_(mode), assignment_(params.n, params.omega) {
  params_.validate();
  check_deadline_feasibility(params_, mode_, tau_a_s);
}

PoolOutcome ReservationPool::run(std::span<const StationState> stations, double pool_start_s,
                                 SplitMix64& rng) const {
  return run_pool(stations, assignment_, params_, mode_, pool_start_s, rng);
}

}  // namespace m2m
