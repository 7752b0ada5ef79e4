#include "syncgap/sim.hpp"

#include "syncgap/error.hpp"
#include "syncgap/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace syncgap {

namespace {

constexpr double overflow_limit = 1e6;

std::size_t grid_index(double t, double dt, const char* what) {
    const double k = t / dt;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 * std::max(1.0, std::abs(k)))
        throw InputError(std::string(what) + " " + std::to_string(t) + " is not a multiple of dt = " +
                         std::to_string(dt));
    return static_cast<std::size_t>(r);
}

// Uniform in [-1, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double symmetric_unit(std::mt19937_64& gen) {
    return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
}

struct Link {
    std::size_t from;
    double w;
};

// Incoming links per node, ascending source index, zero weights skipped.
std::vector<std::vector<Link>> incoming(const Matrix& w) {
    const auto n = static_cast<std::size_t>(w.rows());
    std::vector<std::vector<Link>> in(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (w(i, j) != 0.0) in[i].push_back({j, w(i, j)});
    return in;
}

double spread(const Eigen::VectorXd& y, std::size_t n) {
    double err = 0.0;
    for (int c = 0; c < 3; ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y[static_cast<Eigen::Index>(3 * i) + c];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        err = std::max(err, hi - lo);
    }
    return err;
}

} // namespace

void validate(const Scenario& sc) {
    if (!(sc.dt > 0.0) || !std::isfinite(sc.dt)) throw InputError("dt must be positive");
    if (!(sc.t_end >= 0.0)) throw InputError("t_end must be nonnegative");
    if (!(sc.alpha >= 0.0)) throw InputError("alpha must be nonnegative");
    if (sc.record_stride == 0) throw InputError("record_stride must be positive");
    grid_index(sc.t_end, sc.dt, "t_end");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& e : sc.events) {
        if (e.time < prev) throw InputError("events must be sorted by time");
        if (e.time < 0.0 || e.time > sc.t_end) throw InputError("event time outside [0, t_end]");
        grid_index(e.time, sc.dt, "event time");
        if (e.src >= sc.network.size() || e.dst >= sc.network.size()) throw InputError("event node out of range");
        if (e.src == e.dst) throw InputError("event would create a self-loop");
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw InputError("event weight must be nonnegative");
        prev = e.time;
    }
    if (sc.diff) {
        if (sc.diff->i >= sc.network.size() || sc.diff->j >= sc.network.size() || sc.diff->component < 0 ||
            sc.diff->component > 2)
            throw InputError("diff selection out of range");
    }
    if (sc.init.states && sc.init.states->size() != sc.network.size())
        throw InputError("explicit initial states must give one state per node");
    if (!(sc.init.perturbation >= 0.0) || !(sc.init.transient >= 0.0))
        throw InputError("initial perturbation and transient must be nonnegative");
}

std::vector<State3> initial_states(const Scenario& sc) {
    if (sc.init.states) return *sc.init.states;

    State3 base = sc.init.base_state.value_or(sc.model.reference_state());
    const auto f = [&](const State3& x) -> State3 { return sc.model.vector_field(x); };
    const auto steps = static_cast<std::size_t>(std::llround(sc.init.transient / sc.dt));
    for (std::size_t k = 0; k < steps; ++k) base = rk4_step(f, base, sc.dt);
    if (!base.allFinite() || base.cwiseAbs().maxCoeff() > overflow_limit)
        throw IntegrationError(sc.init.transient, "initial transient escaped");

    std::mt19937_64 gen(sc.init.seed);
    std::vector<State3> out(sc.network.size(), base);
    for (auto& x : out)
        for (int c = 0; c < 3; ++c) x[c] += sc.init.perturbation * symmetric_unit(gen);
    return out;
}

Trajectory integrate(const Scenario& sc) {
    validate(sc);
    const std::size_t n = sc.network.size();
    const auto steps = grid_index(sc.t_end, sc.dt, "t_end");

    Matrix w = sc.network.weights();
    auto links = incoming(w);
    const Matrix3 h = sc.coupling.H;
    const double alpha = sc.alpha;

    auto rhs = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        Eigen::VectorXd out(y.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = y.segment<3>(static_cast<Eigen::Index>(3 * i));
            State3 acc = State3::Zero();
            for (const auto& l : links[i]) acc += l.w * (y.segment<3>(static_cast<Eigen::Index>(3 * l.from)) - xi);
            out.segment<3>(static_cast<Eigen::Index>(3 * i)) = sc.model.vector_field(xi) + alpha * (h * acc);
        }
        return out;
    };

    Eigen::VectorXd y(static_cast<Eigen::Index>(3 * n));
    const auto init = initial_states(sc);
    for (std::size_t i = 0; i < n; ++i) y.segment<3>(static_cast<Eigen::Index>(3 * i)) = init[i];

    Trajectory traj;
    traj.nodes = n;
    auto record = [&](std::size_t k) {
        traj.times.push_back(static_cast<double>(k) * sc.dt);
        std::vector<State3> snap(n);
        for (std::size_t i = 0; i < n; ++i) snap[i] = y.segment<3>(static_cast<Eigen::Index>(3 * i));
        traj.states.push_back(std::move(snap));
        traj.sync_error.push_back(spread(y, n));
        if (sc.diff)
            traj.diff_selected.push_back(y[static_cast<Eigen::Index>(3 * sc.diff->i) + sc.diff->component] -
                                         y[static_cast<Eigen::Index>(3 * sc.diff->j) + sc.diff->component]);
    };

    std::vector<std::size_t> event_step;
    for (const auto& e : sc.events) event_step.push_back(grid_index(e.time, sc.dt, "event time"));
    std::size_t next_event = 0;

    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
        bool changed = false;
        while (next_event < sc.events.size() && event_step[next_event] == k) {
            const auto& e = sc.events[next_event++];
            w(e.dst, e.src) = e.weight;
            changed = true;
        }
        if (changed) links = incoming(w);

        y = rk4_step(rhs, y, sc.dt);
        const double t = static_cast<double>(k + 1) * sc.dt;
        if (!y.allFinite()) throw IntegrationError(t, "state became non-finite");
        if (y.cwiseAbs().maxCoeff() > overflow_limit) throw IntegrationError(t, "state exceeded 1e6");
        if ((k + 1) % sc.record_stride == 0) record(k + 1);
    }
    return traj;
}

std::vector<double> sync_error_series(const Trajectory& traj, std::optional<std::pair<NodeIndex, NodeIndex>> pair,
                                      std::optional<int> component) {
    if (!pair) {
        if (component) throw InputError("a component selection needs a node pair");
        return traj.sync_error;
    }
    const auto [i, j] = *pair;
    if (i >= traj.nodes || j >= traj.nodes) throw InputError("node index out of range");
    if (component && (*component < 0 || *component > 2)) throw InputError("component index out of range");
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& snap : traj.states) {
        if (component) out.push_back(snap[i][*component] - snap[j][*component]);
        else out.push_back((snap[i] - snap[j]).cwiseAbs().maxCoeff());
    }
    return out;
}

double max_sync_error(const Trajectory& traj, double t0, double t1) {
    double m = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < t0 || traj.times[k] > t1) continue;
        m = std::isnan(m) ? traj.sync_error[k] : std::max(m, traj.sync_error[k]);
    }
    return m;
}

std::optional<double> desync_time(const Trajectory& traj, double after, double threshold, std::size_t sustain) {
    std::size_t run = 0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] <= after) continue;
        run = traj.sync_error[k] > threshold ? run + 1 : 0;
        if (run >= sustain) return traj.times[k + 1 - run];
    }
    return std::nullopt;
}

} // namespace syncgap
