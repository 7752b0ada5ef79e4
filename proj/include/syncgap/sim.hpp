#pragma once

#include "syncgap/graph.hpp"
#include "syncgap/models.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace syncgap {

// At `time`, W(dst, src) is set to `weight` before the next step.
struct LinkEvent {
    double time = 0.0;
    NodeIndex src = 0;
    NodeIndex dst = 0;
    double weight = 0.0;
};

/// Initial conditions: one uncoupled node is run for `transient` time units
/// from `base_state` (the model's reference state when absent); every node
/// then starts at that point plus i.i.d. uniform offsets in
/// [-perturbation, perturbation] drawn from a mt19937_64 seeded with `seed`.
/// `states`, when given, bypasses all of this.
struct InitSpec {
    std::uint64_t seed = 1;
    double perturbation = 1e-3;
    double transient = 500.0;
    std::optional<State3> base_state;
    std::optional<std::vector<State3>> states;
};

struct DiffSelection {
    NodeIndex i = 0;
    NodeIndex j = 0;
    int component = 0;
};

struct Scenario {
    std::string name;
    Network network;
    ModelSpec model;
    CouplingSpec coupling;
    double alpha = 0.0;
    double t_end = 0.0;
    double dt = 0.01;
    std::vector<LinkEvent> events;
    InitSpec init;
    std::size_t record_stride = 10;
    std::optional<DiffSelection> diff; // signed difference recorded alongside the sync error
};

// Throws InputError: dt <= 0, t_end not on the step grid, unsorted or
// off-grid events, bad indices.
void validate(const Scenario& sc);

struct Trajectory {
    std::size_t nodes = 0;
    std::vector<double> times;
    std::vector<std::vector<State3>> states; // [record][node]
    std::vector<double> sync_error;          // max over node pairs of the inf-norm state difference
    std::vector<double> diff_selected;       // empty unless Scenario::diff is set
};

std::vector<State3> initial_states(const Scenario& sc);

/// Fixed-step RK4 integration of
///   x_i' = f(x_i) + alpha * sum_j W(i,j) H (x_j - x_i)
/// recording every `record_stride` steps (step 0 included). Throws
/// IntegrationError on non-finite state or a component above 1e6.
Trajectory integrate(const Scenario& sc);

// Default: max-pair inf-norm error. With a pair: inf-norm of x_i - x_j, or
// the signed component difference when `component` is given.
std::vector<double> sync_error_series(const Trajectory& traj,
                                      std::optional<std::pair<NodeIndex, NodeIndex>> pair = std::nullopt,
                                      std::optional<int> component = std::nullopt);

// Largest sync error over recorded times in [t0, t1]; NaN when no sample falls inside.
double max_sync_error(const Trajectory& traj, double t0, double t1);

// First recorded time after `after` that starts a run of at least `sustain`
// consecutive samples with sync_error > threshold.
std::optional<double> desync_time(const Trajectory& traj, double after, double threshold = 0.1,
                                  std::size_t sustain = 10);

} // namespace syncgap
