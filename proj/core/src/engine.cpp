#include "frsd/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "frsd/error.hpp"

namespace frsd {

// Persistent workers that execute one indexed batch at a time. The caller
// blocks until every index of the batch has run.
struct Simulator::Pool {
  explicit Pool(std::size_t threads) {
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([this] { work(); });
    }
  }

  ~Pool() {
    {
      std::lock_guard lock(mutex);
      stopping = true;
    }
    wake.notify_all();
    for (auto& w : workers) w.join();
  }

  void for_each(std::size_t count, const std::function<void(std::size_t)>& fn) {
    {
      std::lock_guard lock(mutex);
      task = &fn;
      total = count;
      next.store(0);
      pending = workers.size();
      ++generation;
    }
    wake.notify_all();
    std::unique_lock lock(mutex);
    done.wait(lock, [this] { return pending == 0; });
    task = nullptr;
  }

  void work() {
    std::size_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t)>* fn = nullptr;
      std::size_t count = 0;
      {
        std::unique_lock lock(mutex);
        wake.wait(lock, [&] { return stopping || generation != seen; });
        if (stopping) return;
        seen = generation;
        fn = task;
        count = total;
      }
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) (*fn)(i);
      {
        std::lock_guard lock(mutex);
        if (--pending == 0) done.notify_one();
      }
    }
  }

  std::vector<std::thread> workers;
  std::mutex mutex;
  std::condition_variable wake;
  std::condition_variable done;
  const std::function<void(std::size_t)>* task = nullptr;
  std::size_t total = 0;
  std::atomic<std::size_t> next{0};
  std::size_t pending = 0;
  std::size_t generation = 0;
  bool stopping = false;
};

namespace {

void check_weights(const std::optional<MixingMatrix>& w, MixingKind kind, const DiGraph& g,
                   const char* label) {
  if (!w) return;
  if (w->kind() != kind && !(kind == MixingKind::column && w->kind() == MixingKind::row &&
                             w->weights().colwise().sum().isOnes(1e-12))) {
    throw DomainError(std::string(label) + " weights have the wrong stochasticity");
  }
  if (!(w->graph() == g)) throw GraphError(std::string(label) + " weights built for another graph");
}

}  // namespace

Simulator::Simulator(SimulationConfig config) : config_(std::move(config)) {
  if (!config_.problem) throw DomainError("simulation needs a problem instance");
  const ProblemInstance& problem = *config_.problem;
  const std::size_t n = config_.graph.node_count();
  const std::size_t p = problem.dimension();
  if (problem.node_count() != n) {
    throw DimensionMismatch("problem has " + std::to_string(problem.node_count()) +
                            " nodes, graph has " + std::to_string(n));
  }
  if (config_.max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (config_.cadence < 1) throw DomainError("cadence must be at least 1");
  if (!is_strongly_connected(config_.graph)) throw GraphError("graph is not strongly connected");
  if (!config_.x0) config_.x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  if (static_cast<std::size_t>(config_.x0->size()) != p) {
    throw DimensionMismatch("x0 has the wrong dimension");
  }

  check_weights(config_.row_weights, MixingKind::row, config_.graph, "row");
  check_weights(config_.column_weights, MixingKind::column, config_.graph, "column");
  if (config_.auto_weights) {
    const WeightNeeds needs = required_weights(config_.algorithm);
    if (needs.row && !config_.row_weights) {
      config_.row_weights = build_uniform_row_stochastic(config_.graph);
    }
    if (needs.column && !config_.column_weights) {
      config_.column_weights = build_uniform_column_stochastic(config_.graph);
    }
  }

  protocol_ = make_protocol(config_.algorithm, config_.options);
  states_.reserve(n);
  outbox_.reserve(n);
  neighborhoods_.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    states_.push_back(protocol_->init(i, n, *config_.x0, problem.local(i), config_.hp));
    outbox_.push_back(protocol_->initial_broadcast(states_.back(), config_.hp));
    auto& hood = neighborhoods_[i];
    const auto in = config_.graph.in_neighbors(i);
    hood.assign(in.begin(), in.end());
    hood.insert(std::lower_bound(hood.begin(), hood.end(), i), i);
  }
  if (config_.threads > 1 && n > 1) {
    pool_ = std::make_unique<Pool>(std::min(config_.threads, n));
  }
}

Simulator::~Simulator() = default;

void Simulator::advance() {
  for (std::size_t phase = 0; phase < protocol_->phases(); ++phase) run_phase(phase);
  ++round_;
}

void Simulator::run_phase(std::size_t phase) {
  const std::size_t n = states_.size();
  const std::size_t p = config_.problem->dimension();
  const std::size_t next_phase = (phase + 1) % protocol_->phases();
  const std::size_t expected = protocol_->payload_size(next_phase, n, p);
  const MixingMatrix* row = config_.row_weights ? &*config_.row_weights : nullptr;
  const MixingMatrix* col = config_.column_weights ? &*config_.column_weights : nullptr;

  std::vector<NodeState> next_states(n);
  std::vector<Broadcast> next_outbox(n);
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);

  const std::function<void(std::size_t)> step_node = [&](std::size_t i) {
    try {
      const auto& hood = neighborhoods_[i];
      std::vector<InboxEntry> entries;
      entries.reserve(hood.size());
      for (NodeId j : hood) {
        entries.push_back({.sender = j,
                           .row_weight = row ? (*row)(i, j) : 0.0,
                           .col_weight = col ? (*col)(i, j) : 0.0,
                           .payload = outbox_[j].payload});
      }
      const Inbox inbox{.entries = entries,
                        .has_row_weights = row != nullptr,
                        .has_col_weights = col != nullptr};
      StepResult result =
          protocol_->step(states_[i], phase, inbox, config_.problem->local(i), config_.hp);
      if (result.broadcast.payload.size() != expected) {
        throw DimensionMismatch("broadcast has " +
                                std::to_string(result.broadcast.payload.size()) +
                                " scalars, expected " + std::to_string(expected));
      }
      next_states[i] = std::move(result.state);
      next_outbox[i] = std::move(result.broadcast);
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    }
  };

  if (pool_) {
    pool_->for_each(n, step_node);
  } else {
    for (std::size_t i = 0; i < n; ++i) step_node(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) throw StepError(round_, i, errors[i]);
  }
  states_ = std::move(next_states);
  outbox_ = std::move(next_outbox);
}

Eigen::MatrixXd Simulator::decisions() const {
  const auto n = static_cast<Eigen::Index>(states_.size());
  const auto p = static_cast<Eigen::Index>(config_.problem->dimension());
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = protocol_->decision(states_[static_cast<std::size_t>(i)]).transpose();
  }
  return x;
}

Trace run(const SimulationConfig& config) {
  if (!config.problem) throw DomainError("simulation needs a problem instance");
  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd x_star =
      config.x_star ? *config.x_star : solve_centralized(*config.problem, config.oracle_tol).x_star;

  Simulator sim(config);
  const ProblemInstance& problem = *sim.config().problem;
  const std::size_t n = problem.node_count();
  const std::size_t p = problem.dimension();
  if (static_cast<std::size_t>(x_star.size()) != p) {
    throw DimensionMismatch("x_star has the wrong dimension");
  }

  Trace trace;
  trace.algorithm = config.algorithm;
  trace.nodes = n;
  trace.dimension = p;
  trace.comm_size = comm_size(config.algorithm, n, p);
  std::uint64_t per_iteration = 0;
  for (std::size_t phase = 0; phase < sim.protocol().phases(); ++phase) {
    per_iteration += sim.protocol().payload_size(phase, n, p);
  }

  const Eigen::MatrixXd x_star_stack = x_star.transpose().replicate(static_cast<Eigen::Index>(n), 1);
  const Eigen::MatrixXd x0_stack = sim.decisions();

  auto record = [&](const Eigen::MatrixXd& x, double r) {
    TracePoint pt;
    pt.k = sim.round();
    pt.residual = r;
    pt.consensus_violation = consensus_violation(x, config.graph);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i) {
      g += problem.local(i).grad(x.row(static_cast<Eigen::Index>(i)).transpose());
    }
    pt.grad_norm = (g / static_cast<double>(n)).norm();
    pt.cum_broadcast = per_iteration * sim.round();
    pt.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.points.push_back(pt);
  };

  if (config.observer) config.observer({sim.round(), sim.states()});
  record(x0_stack, residual(x0_stack, x_star_stack, x0_stack));

  Eigen::MatrixXd x = x0_stack;
  for (std::size_t k = 1; k <= config.max_iterations; ++k) {
    sim.advance();
    if (config.observer) config.observer({sim.round(), sim.states()});
    x = sim.decisions();
    const double r = residual(x, x_star_stack, x0_stack);
    const bool diverged = !std::isfinite(r) || r > config.divergence_threshold;
    const bool reached = config.stop_below > 0.0 && r <= config.stop_below;
    if (k % config.cadence == 0 || k == config.max_iterations || diverged || reached) {
      record(x, r);
    }
    if (diverged) {
      trace.diverged = true;
      break;
    }
    if (reached) break;
  }
  trace.final_iterates = std::move(x);
  return trace;
}

}  // namespace frsd
