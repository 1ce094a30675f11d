#include "gnnsim/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "gnnsim/rational.hpp"

namespace gnnsim {

namespace {

double adjusted_density(const DensityInfo& measured, bool is_adjacency,
                        SparsityMode mode) {
    if (mode == SparsityMode::AmOnly && !is_adjacency) return 1.0;
    return measured.density;
}

}  // namespace

TaskGraph analyze(const std::vector<KernelWorkload>& kernels, const HardwareConfig& cfg,
                  const AnalyzerOptions& opts) {
    cfg.validate();
    TaskGraph graph;
    // kernel -> flattened (bi, bj) -> task id, -1 for elided blocks
    std::vector<std::vector<int>> task_of(kernels.size());

    for (std::size_t k = 0; k < kernels.size(); ++k) {
        const KernelWorkload& kw = kernels[k];
        if (kw.x.source_cols() != kw.y.source_rows())
            throw std::invalid_argument("analyze: kernel operand dims mismatch");
        if (kw.producer_of_x >= 0) {
            const KernelWorkload& p = kernels[kw.producer_of_x];
            if (p.x.grid_rows() != kw.x.grid_rows())
                throw std::invalid_argument("analyze: producer/consumer row blocking mismatch");
        }
        if (kw.producer_of_y >= 0) {
            const KernelWorkload& p = kernels[kw.producer_of_y];
            if (p.y.grid_cols() != kw.y.grid_cols())
                throw std::invalid_argument("analyze: producer/consumer col blocking mismatch");
        }

        const index_t gr = kw.x.grid_rows(), gc = kw.y.grid_cols();
        graph.total_output_blocks += gr * gc;
        task_of[k].assign(static_cast<std::size_t>(gr * gc), -1);

        std::vector<DensityInfo> row_density(static_cast<std::size_t>(gr));
        std::vector<DensityInfo> col_density(static_cast<std::size_t>(gc));
        for (index_t i = 0; i < gr; ++i) row_density[i] = kw.x.row_strip_density(i);
        for (index_t j = 0; j < gc; ++j) col_density[j] = kw.y.col_strip_density(j);

        const bool x_is_adjacency = kw.role == KernelRole::FeatureAggregation;

        for (index_t i = 0; i < gr; ++i) {
            for (index_t j = 0; j < gc; ++j) {
                if (row_density[i].nnz == 0 || col_density[j].nnz == 0) {
                    ++graph.elided_zero_tasks;  // output block is materialized as zeros
                    continue;
                }
                Task t;
                t.id = static_cast<int>(graph.tasks.size());
                t.kernel = static_cast<index_t>(k);
                t.bi = i;
                t.bj = j;
                t.m = kw.x.row_extent(i);
                t.n = kw.x.source_cols();
                t.d = kw.y.col_extent(j);
                t.alpha_x = adjusted_density(row_density[i], x_is_adjacency,
                                             opts.sparsity_mode);
                t.alpha_y = adjusted_density(col_density[j], false, opts.sparsity_mode);
                t.nnz_x = row_density[i].nnz;
                t.nnz_y = col_density[j].nnz;
                t.estimate = compare_devices(t.m, t.n, t.d, t.alpha_x, t.alpha_y, cfg);
                if (opts.per_cc_estimates) {
                    const count_t rate =
                        static_cast<count_t>(cfg.tiles_per_cc) * cfg.beta;
                    t.estimate.cycles_aie = (t.m * t.n * t.d + rate - 1) / rate;
                    t.estimate.t_aie =
                        static_cast<double>(t.estimate.cycles_aie) / cfg.f_aie;
                }
                if (opts.inverted_routing)
                    t.queue = t.estimate.t_alu > t.estimate.t_aie ? QueueKind::Stq
                                                                  : QueueKind::Dtq;
                else
                    t.queue = t.estimate.t_alu <= t.estimate.t_aie ? QueueKind::Stq
                                                                   : QueueKind::Dtq;

                auto add_producer_deps = [&](int producer, bool via_row_strip) {
                    if (producer < 0) return;
                    const auto& ids = task_of[producer];
                    const index_t pgr = kernels[producer].x.grid_rows();
                    const index_t pgc = kernels[producer].y.grid_cols();
                    for (index_t pi = 0; pi < pgr; ++pi)
                        for (index_t pj = 0; pj < pgc; ++pj) {
                            if (!opts.layer_barrier) {
                                if (via_row_strip && pi != i) continue;
                                if (!via_row_strip && pj != j) continue;
                            }
                            const int dep = ids[pi * pgc + pj];
                            if (dep >= 0) t.deps.push_back(dep);
                        }
                };
                add_producer_deps(kw.producer_of_x, /*via_row_strip=*/true);
                add_producer_deps(kw.producer_of_y, /*via_row_strip=*/false);
                std::sort(t.deps.begin(), t.deps.end());
                t.deps.erase(std::unique(t.deps.begin(), t.deps.end()), t.deps.end());

                task_of[k][i * gc + j] = t.id;
                graph.tasks.push_back(std::move(t));
            }
        }
    }
    return graph;
}

namespace {
count_t ceil_div(count_t a, count_t b) { return (a + b - 1) / b; }
}  // namespace

count_t task_effective_macs(const Task& t, PrimitiveKind prim) {
    switch (prim) {
        case PrimitiveKind::Gemm: return t.m * t.n * t.d;
        case PrimitiveKind::Spdmm: return t.nnz_x * t.d;
        case PrimitiveKind::Spmm:
            return static_cast<count_t>(std::llround(
                static_cast<double>(t.nnz_x) * static_cast<double>(t.nnz_y) /
                static_cast<double>(t.n)));
    }
    return 0;
}

count_t task_data_elements(const Task& t, PrimitiveKind prim) {
    switch (prim) {
        case PrimitiveKind::Gemm: return t.m * t.n + t.n * t.d + t.m * t.d;
        case PrimitiveKind::Spdmm: return t.nnz_x + t.nnz_x * t.d + t.m * t.d;
        case PrimitiveKind::Spmm: {
            const count_t pairs = task_effective_macs(t, PrimitiveKind::Spmm);
            return t.nnz_x + pairs + std::min(t.m * t.d, pairs);
        }
    }
    return 0;
}

namespace {

struct Device {
    DeviceId id;
    std::int64_t freq_hz;
    bool busy = false;
    int task = -1;
    PrimitiveKind prim = PrimitiveKind::Gemm;
    QueueKind source_queue = QueueKind::Stq;
    bool serial_transfer_phase = false;  // Serial policy: transfer precedes compute
    bool compute_done = false;
    Rational dispatch_time;
    Rational compute_start;   // after any mode-switch stall
    Rational compute_end;
    Rational transfer_remaining;  // bytes
    count_t task_cycles = 0;      // compute cycles incl. mode switch
    // accumulated stats
    Rational busy_total;
    count_t busy_cycles = 0;
    count_t tasks_run = 0;
    count_t mode_switches = 0;
    PrimitiveKind mode = PrimitiveKind::Gemm;
    bool has_mode = false;
};

}  // namespace

ScheduleResult schedule(const TaskGraph& graph, const HardwareConfig& cfg,
                        const ScheduleOptions& opts) {
    cfg.validate();
    const int n_tasks = static_cast<int>(graph.tasks.size());
    const std::int64_t f_pl = std::llround(cfg.f_pl);
    const std::int64_t f_aie = std::llround(cfg.f_aie);
    const std::int64_t bandwidth = std::llround(cfg.ddr_bandwidth);

    std::vector<Device> devices;
    for (int i = 0; i < cfg.num_alu_arrays; ++i)
        devices.push_back({DeviceId{DeviceId::Kind::Alu, i}, f_pl});
    const int n_aie = opts.per_cc_scheduling ? cfg.num_aie_ccs : 1;
    for (int i = 0; i < n_aie; ++i)
        devices.push_back({DeviceId{DeviceId::Kind::Aie, i}, f_aie});

    // Dependency bookkeeping.
    std::vector<int> indegree(n_tasks, 0);
    std::vector<std::vector<int>> dependents(n_tasks);
    for (const Task& t : graph.tasks)
        for (int dep : t.deps) {
            ++indegree[t.id];
            dependents[dep].push_back(t.id);
        }

    auto queue_of = [&](const Task& t) {
        if (opts.force == ForceDevice::PlOnly) return QueueKind::Stq;
        if (opts.force == ForceDevice::AieOnly) return QueueKind::Dtq;
        return t.queue;
    };

    std::deque<int> stq, dtq;
    std::vector<Rational> ready_at(n_tasks);
    {
        std::vector<int> initial;
        for (const Task& t : graph.tasks)
            if (indegree[t.id] == 0) initial.push_back(t.id);
        for (int id : initial)
            (queue_of(graph.tasks[id]) == QueueKind::Stq ? stq : dtq).push_back(id);
    }

    auto aie_cycles = [&](const Task& t) -> count_t {
        if (!opts.per_cc_scheduling) return t.estimate.cycles_aie;
        return ceil_div(t.m * t.n * t.d,
                        static_cast<count_t>(cfg.tiles_per_cc) * cfg.beta);
    };

    ScheduleResult result;
    result.trace.reserve(static_cast<std::size_t>(n_tasks));
    Rational now;
    int done = 0;

    auto try_dispatch = [&]() {
        for (Device& dev : devices) {
            if (dev.busy) continue;
            const bool is_alu = dev.id.kind == DeviceId::Kind::Alu;
            std::deque<int>* q = is_alu ? &stq : &dtq;
            QueueKind qk = is_alu ? QueueKind::Stq : QueueKind::Dtq;
            if (q->empty() && opts.work_stealing) {
                q = is_alu ? &dtq : &stq;
                qk = is_alu ? QueueKind::Dtq : QueueKind::Stq;
            }
            if (q->empty()) continue;
            const Task& t = graph.tasks[q->front()];
            q->pop_front();

            dev.busy = true;
            dev.task = t.id;
            dev.source_queue = qk;
            dev.prim = is_alu ? t.estimate.alu_primitive : PrimitiveKind::Gemm;
            count_t switch_cycles = 0;
            if (is_alu && dev.has_mode && dev.mode != dev.prim) {
                switch_cycles = cfg.mode_switch_cycles;
                ++dev.mode_switches;
            }
            dev.mode = dev.prim;
            dev.has_mode = is_alu;
            const count_t compute_cycles = is_alu ? t.estimate.cycles_alu : aie_cycles(t);
            dev.task_cycles = compute_cycles + switch_cycles;
            dev.dispatch_time = now;
            dev.compute_done = false;

            Rational transfer_bytes = Rational::from_int(
                opts.memory == MemoryPolicy::ComputeOnly
                    ? 0
                    : 4 * task_data_elements(t, dev.prim));
            dev.transfer_remaining = transfer_bytes;
            dev.serial_transfer_phase =
                opts.memory == MemoryPolicy::Serial && !transfer_bytes.is_zero();
            if (dev.serial_transfer_phase) {
                // compute times are set when the transfer completes
                dev.compute_start = now;
                dev.compute_end = now;
            } else {
                dev.compute_start = now + Rational(switch_cycles, dev.freq_hz);
                dev.compute_end = dev.compute_start + Rational(compute_cycles, dev.freq_hz);
            }
        }
    };

    auto begin_compute_phase = [&](Device& dev) {
        const Task& t = graph.tasks[dev.task];
        count_t switch_cycles = dev.task_cycles -
                                (dev.id.kind == DeviceId::Kind::Alu
                                     ? t.estimate.cycles_alu
                                     : aie_cycles(t));
        dev.serial_transfer_phase = false;
        dev.compute_start = now + Rational(switch_cycles, dev.freq_hz);
        dev.compute_end = now + Rational(dev.task_cycles, dev.freq_hz);
    };

    while (done < n_tasks) {
        try_dispatch();

        // Count active transfers for the equal-share bandwidth model.
        int sharers = 0;
        for (const Device& dev : devices)
            if (dev.busy && !dev.transfer_remaining.is_zero()) ++sharers;

        bool have_event = false;
        Rational t_next;
        auto consider = [&](const Rational& candidate) {
            if (!have_event || candidate < t_next) {
                t_next = candidate;
                have_event = true;
            }
        };
        for (const Device& dev : devices) {
            if (!dev.busy) continue;
            if (!dev.transfer_remaining.is_zero()) {
                // finish time at the current equal share of bandwidth
                Rational rate(bandwidth, sharers);
                consider(now + dev.transfer_remaining / rate);
            }
            if (!dev.serial_transfer_phase && !dev.compute_done)
                consider(dev.compute_end);
        }

        if (!have_event) {
            if (done < n_tasks)
                throw std::runtime_error(
                    "schedule: cyclic dependency detected (no runnable task)");
            break;
        }

        // Advance transfers to t_next.
        if (sharers > 0) {
            const Rational dt = t_next - now;
            const Rational progress = Rational(bandwidth, sharers) * dt;
            for (Device& dev : devices) {
                if (!dev.busy || dev.transfer_remaining.is_zero()) continue;
                Rational left = dev.transfer_remaining - progress;
                dev.transfer_remaining = left < Rational() ? Rational() : left;
            }
        }
        now = t_next;

        // Phase changes and completions.
        std::vector<int> newly_ready;
        for (Device& dev : devices) {
            if (!dev.busy) continue;
            if (dev.serial_transfer_phase && dev.transfer_remaining.is_zero())
                begin_compute_phase(dev);
            if (!dev.serial_transfer_phase && !dev.compute_done && dev.compute_end <= now)
                dev.compute_done = true;
            if (!dev.compute_done || !dev.transfer_remaining.is_zero()) continue;

            const Task& t = graph.tasks[dev.task];
            TraceEvent ev;
            ev.task_id = t.id;
            ev.kernel = t.kernel;
            ev.bi = t.bi;
            ev.bj = t.bj;
            ev.device = dev.id;
            ev.primitive = dev.prim;
            ev.queue = dev.source_queue;
            ev.ready_s = ready_at[t.id].to_double();
            ev.start_s = dev.compute_start.to_double();
            ev.end_s = now.to_double();
            ev.start_cycle = std::llround(ev.start_s * static_cast<double>(dev.freq_hz));
            ev.end_cycle = std::llround(ev.end_s * static_cast<double>(dev.freq_hz));
            ev.macs = task_effective_macs(t, dev.prim);
            ev.data_elements = task_data_elements(t, dev.prim);
            result.trace.push_back(ev);

            dev.busy_total = dev.busy_total + (now - dev.dispatch_time);
            dev.busy_cycles += dev.task_cycles;
            ++dev.tasks_run;
            dev.busy = false;
            dev.task = -1;
            ++done;

            for (int dependent : dependents[t.id])
                if (--indegree[dependent] == 0) newly_ready.push_back(dependent);
        }

        std::sort(newly_ready.begin(), newly_ready.end());
        for (int id : newly_ready) {
            ready_at[id] = now;
            (queue_of(graph.tasks[id]) == QueueKind::Stq ? stq : dtq).push_back(id);
        }
    }

    result.makespan_s = now.to_double();
    for (const Device& dev : devices)
        result.devices.push_back({dev.id, dev.busy_total.to_double(), dev.busy_cycles,
                                  dev.tasks_run, dev.mode_switches});
    return result;
}

QueueReport queue_residency_report(const ScheduleResult& result) {
    QueueReport report;
    struct Edge {
        double time;
        int delta;
    };
    std::vector<Edge> stq_edges, dtq_edges;
    for (const TraceEvent& ev : result.trace) {
        QueueStats& qs = ev.queue == QueueKind::Stq ? report.stq : report.dtq;
        auto& edges = ev.queue == QueueKind::Stq ? stq_edges : dtq_edges;
        const double wait = ev.start_s - ev.ready_s;
        ++qs.tasks;
        qs.total_wait_s += wait;
        qs.max_wait_s = std::max(qs.max_wait_s, wait);
        edges.push_back({ev.ready_s, +1});
        edges.push_back({ev.start_s, -1});
    }
    auto peak = [](std::vector<Edge>& edges) {
        std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            return a.time != b.time ? a.time < b.time : a.delta < b.delta;
        });
        count_t cur = 0, best = 0;
        for (const Edge& e : edges) {
            cur += e.delta;
            best = std::max(best, cur);
        }
        return best;
    };
    report.stq.max_length = peak(stq_edges);
    report.dtq.max_length = peak(dtq_edges);
    for (const DeviceStats& d : result.devices)
        report.device_utilization.push_back(
            result.makespan_s > 0 ? d.busy_s / result.makespan_s : 0.0);
    return report;
}

}  // namespace gnnsim
