#include "thetacbc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "thetacbc/errors.hpp"

namespace thetacbc {

namespace {

constexpr int kMaxStartResamples = 1000;

double certificate_value(const CertificateMatrix& P, const Vector& x, double theta_i,
                         double theta_u) {
    const double t0 = theta_i;
    const double t1 = theta_u;
    return x.dot(P.P_x * x) + P.P_theta(0, 0) * t0 * t0 + 2.0 * P.P_theta(0, 1) * t0 * t1 +
           P.P_theta(1, 1) * t1 * t1;
}

std::string format_point(std::int64_t id, const TrajectoryPoint& p) {
    std::ostringstream out;
    out.precision(9);
    out << id << ',' << p.k;
    for (Eigen::Index i = 0; i < p.x.size(); ++i) {
        out << ',' << p.x(i);
    }
    out << ',' << p.theta_i << ',' << p.theta_u << ',' << (p.in_unsafe ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace

int Parallelism::resolve_workers() const {
    switch (kind) {
        case Kind::Off:
            return 1;
        case Kind::Fixed:
            return std::max(1, workers);
        case Kind::Auto:
        default: {
            const unsigned hw = std::thread::hardware_concurrency();
            return hw == 0 ? 1 : static_cast<int>(hw);
        }
    }
}

void MonteCarloConfig::validate() const {
    if (num_trajectories < 1) {
        throw ValidationError("num_trajectories must be at least 1");
    }
    if (horizon && *horizon < 1) {
        throw ValidationError("horizon must be positive");
    }
    if (parallelism.kind == Parallelism::Kind::Fixed && parallelism.workers < 1) {
        throw ValidationError("fixed parallelism needs at least one worker");
    }
}

TrajectoryResult run_trajectory(const ResolvedScenario& resolved, RandomStream& stream,
                                const TrajectoryOptions& opts) {
    const Scenario& sc = resolved.scenario;
    const UncertainSet& init = sc.init_set;
    const UncertainSet& unsafe = sc.unsafe_set;
    const int horizon = opts.horizon.value_or(sc.horizon);
    const int n = sc.system.state_dim();
    const Vector noise_std = sc.system.noise_std();
    const CertificateMatrix& P = resolved.certificate;

    TrajectoryResult result;
    if (opts.record_path) {
        result.path.emplace();
        result.path->reserve(static_cast<std::size_t>(horizon) + 1);
    }

    // A negative inflated size is an empty set; the start collapses to the center.
    auto draw_start = [&](double& theta_i) {
        theta_i = init.perturbation.sample(stream);
        return sample_uniform(init, std::max(theta_i, -init.nominal_size), stream);
    };

    double theta_i = 0.0;
    Vector x = draw_start(theta_i);
    double previous_b = 0.0;
    Vector noise(n);

    for (int k = 0; k <= horizon; ++k) {
        double theta_u = unsafe.perturbation.sample(stream);
        bool in_unsafe = contains(unsafe, theta_u, x);
        if (k == 0 && in_unsafe) {
            result.start_overlap = true;
            if (opts.overlap_policy == OverlapPolicy::ResampleSeparated) {
                for (int attempt = 0; attempt < kMaxStartResamples && in_unsafe; ++attempt) {
                    x = draw_start(theta_i);
                    theta_u = unsafe.perturbation.sample(stream);
                    in_unsafe = contains(unsafe, theta_u, x);
                }
            }
        }
        if (opts.track_supermartingale) {
            const double b = certificate_value(P, x, theta_i, theta_u);
            if (k > 0) {
                const double inc = b - previous_b;
                result.increment_sum += inc;
                result.increment_sq_sum += inc * inc;
                ++result.transitions;
            }
            previous_b = b;
        }
        if (result.path) {
            result.path->push_back({k, x, theta_i, theta_u, in_unsafe});
        }
        if (in_unsafe && !result.hit) {
            result.hit = true;
            result.first_hit_step = k;
            if (!opts.record_path && !opts.track_supermartingale) {
                break;
            }
        }
        if (k < horizon) {
            for (int i = 0; i < n; ++i) {
                noise(i) = noise_std(i) * stream.normal();
            }
            x = resolved.a_cl * x + noise;
        }
    }
    return result;
}

std::pair<double, double> wald_interval(std::int64_t successes, std::int64_t samples) {
    const double p = static_cast<double>(successes) / static_cast<double>(samples);
    const double half = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return {std::clamp(p - half, 0.0, 1.0), std::clamp(p + half, 0.0, 1.0)};
}

MonteCarloReport estimate(const ResolvedScenario& resolved, const MonteCarloConfig& cfg) {
    cfg.validate();
    const std::int64_t total = cfg.num_trajectories;
    const int horizon = cfg.horizon.value_or(resolved.scenario.horizon);
    const bool record = cfg.trajectory_dump.has_value();

    struct Outcome {
        std::int8_t hit = 0;
        std::int8_t start_overlap = 0;
        int first_hit = -1;
        double increment_sum = 0.0;
        double increment_sq_sum = 0.0;
        std::int64_t transitions = 0;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(total));
    std::vector<std::string> dumps(record ? static_cast<std::size_t>(total) : 0);

    TrajectoryOptions topts;
    topts.overlap_policy = cfg.overlap_policy;
    topts.record_path = record;
    topts.track_supermartingale = cfg.track_supermartingale;
    topts.horizon = horizon;

    auto work = [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t j = begin; j < end; ++j) {
            RandomStream stream(cfg.master_seed, static_cast<std::uint64_t>(j));
            TrajectoryResult r = run_trajectory(resolved, stream, topts);
            Outcome& o = outcomes[static_cast<std::size_t>(j)];
            o.hit = r.hit ? 1 : 0;
            o.start_overlap = r.start_overlap ? 1 : 0;
            o.first_hit = r.first_hit_step.value_or(-1);
            o.increment_sum = r.increment_sum;
            o.increment_sq_sum = r.increment_sq_sum;
            o.transitions = r.transitions;
            if (record) {
                std::string text;
                for (const auto& p : *r.path) {
                    text += format_point(j, p);
                }
                dumps[static_cast<std::size_t>(j)] = std::move(text);
            }
        }
    };

    const int workers =
        static_cast<int>(std::min<std::int64_t>(cfg.parallelism.resolve_workers(), total));
    if (workers <= 1) {
        work(0, total);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const std::int64_t chunk = (total + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t begin = w * chunk;
            const std::int64_t end = std::min(total, begin + chunk);
            if (begin >= end) {
                break;
            }
            pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    MonteCarloReport report;
    report.samples = total;
    report.master_seed = cfg.master_seed;
    report.horizon = horizon;
    report.first_hit_histogram.assign(static_cast<std::size_t>(horizon) + 1, 0);
    double inc_sum = 0.0;
    double inc_sq_sum = 0.0;
    std::int64_t transitions = 0;
    for (const Outcome& o : outcomes) {
        report.unsafe_hits += o.hit;
        report.start_overlaps += o.start_overlap;
        if (o.first_hit >= 0) {
            ++report.first_hit_histogram[static_cast<std::size_t>(o.first_hit)];
        }
        inc_sum += o.increment_sum;
        inc_sq_sum += o.increment_sq_sum;
        transitions += o.transitions;
    }
    report.p_safe_empirical =
        1.0 - static_cast<double>(report.unsafe_hits) / static_cast<double>(total);
    std::tie(report.ci_low, report.ci_high) = wald_interval(total - report.unsafe_hits, total);
    // Keep the point estimate inside the clipped interval despite rounding.
    report.ci_low = std::min(report.ci_low, report.p_safe_empirical);
    report.ci_high = std::max(report.ci_high, report.p_safe_empirical);

    if (cfg.track_supermartingale && transitions > 0) {
        SupermartingaleStats stats;
        stats.transitions = transitions;
        const double m = static_cast<double>(transitions);
        stats.mean_increment = inc_sum / m;
        const double var = std::max(0.0, inc_sq_sum / m - stats.mean_increment * stats.mean_increment);
        stats.standard_error = std::sqrt(var * m / std::max(1.0, m - 1.0) / m);
        report.supermartingale = stats;
    }

    if (record) {
        std::ofstream out(*cfg.trajectory_dump);
        if (!out) {
            throw Error("cannot open trajectory dump file " + *cfg.trajectory_dump);
        }
        const int n = resolved.scenario.system.state_dim();
        out << "trajectory_id,k";
        for (int i = 0; i < n; ++i) {
            out << ",x" << (i + 1);
        }
        out << ",theta_i,theta_u_k,in_unsafe\n";
        for (const auto& chunk : dumps) {
            out << chunk;
        }
        report.trajectory_dump = cfg.trajectory_dump;
    }
    return report;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<double>& sigma_w_list,
                            const std::vector<double>& sigma_i_list,
                            const std::vector<double>& sigma_u_list, const MonteCarloConfig& cfg) {
    if (sigma_w_list.empty() || sigma_i_list.empty() || sigma_u_list.empty()) {
        throw ValidationError("sweep: every sigma list must be non-empty");
    }
    std::vector<SweepRow> rows;
    rows.reserve(sigma_w_list.size() * sigma_i_list.size() * sigma_u_list.size());
    for (double sw : sigma_w_list) {
        for (double si : sigma_i_list) {
            for (double su : sigma_u_list) {
                SweepRow row;
                row.sigma_w = sw;
                row.sigma_i = si;
                row.sigma_u = su;
                try {
                    const ResolvedScenario resolved = resolve(base.with_noise(sw, si, su));
                    const CertificateReport cert = certify(resolved);
                    row.p_empty = cert.p_empty;
                    row.eta = cert.eta;
                    row.beta = cert.beta;
                    row.c = cert.c;
                    row.bound = cert.safety_lower_bound;
                    row.status = cert.valid ? "valid" : "invalid";
                    const MonteCarloReport mc = estimate(resolved, cfg);
                    row.empirical = mc.p_safe_empirical;
                    row.ci_low = mc.ci_low;
                    row.ci_high = mc.ci_high;
                } catch (const Error& e) {
                    row.status = std::string("error: ") + e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

bool dominance_holds(const std::vector<SweepRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) {
        return r.status != "valid" || r.ci_high >= r.bound - kDominanceSlack;
    });
}

}  // namespace thetacbc
