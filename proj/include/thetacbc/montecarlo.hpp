#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thetacbc/certificate.hpp"
#include "thetacbc/rng.hpp"
#include "thetacbc/scenario.hpp"

namespace thetacbc {

enum class OverlapPolicy {
    /// A start inside X_u(theta_u,0) counts as an unsafe trajectory.
    CountUnsafe,
    /// Redraw (theta_i, x0, theta_u,0) until x0 is outside the unsafe set.
    ResampleSeparated,
};

struct Parallelism {
    enum class Kind { Auto, Fixed, Off };
    Kind kind = Kind::Auto;
    int workers = 1;

    static Parallelism automatic() { return {Kind::Auto, 0}; }
    static Parallelism fixed(int k) { return {Kind::Fixed, k}; }
    static Parallelism off() { return {Kind::Off, 1}; }

    int resolve_workers() const;
};

struct MonteCarloConfig {
    std::int64_t num_trajectories = 20000;
    /// Overrides the scenario horizon when set.
    std::optional<int> horizon;
    std::uint64_t master_seed = 42;
    OverlapPolicy overlap_policy = OverlapPolicy::CountUnsafe;
    Parallelism parallelism = Parallelism::automatic();
    /// Write every simulated state to this CSV file.
    std::optional<std::string> trajectory_dump;
    /// Accumulate B(z_{k+1}) - B(z_k) over all transitions.
    bool track_supermartingale = false;

    void validate() const;
};

/// Sample statistics of the one-step certificate increment.
struct SupermartingaleStats {
    std::int64_t transitions = 0;
    double mean_increment = 0.0;
    double standard_error = 0.0;
};

struct MonteCarloReport {
    std::int64_t samples = 0;
    std::int64_t unsafe_hits = 0;
    std::int64_t start_overlaps = 0;
    double p_safe_empirical = 1.0;
    double ci_low = 1.0;
    double ci_high = 1.0;
    /// Index k counts trajectories whose first unsafe visit was at step k.
    std::vector<std::int64_t> first_hit_histogram;
    std::optional<std::string> trajectory_dump;
    std::uint64_t master_seed = 0;
    int horizon = 0;
    std::optional<SupermartingaleStats> supermartingale;
};

/// One simulated state along a trajectory.
struct TrajectoryPoint {
    int k;
    Vector x;
    double theta_i;
    double theta_u;
    bool in_unsafe;
};

struct TrajectoryResult {
    bool hit = false;
    std::optional<int> first_hit_step;
    bool start_overlap = false;
    std::optional<std::vector<TrajectoryPoint>> path;
    double increment_sum = 0.0;
    double increment_sq_sum = 0.0;
    std::int64_t transitions = 0;
};

struct TrajectoryOptions {
    OverlapPolicy overlap_policy = OverlapPolicy::CountUnsafe;
    bool record_path = false;
    bool track_supermartingale = false;
    std::optional<int> horizon;
};

/// Simulates one closed-loop trajectory. theta_i is drawn once, x0 uniformly
/// from X_i(theta_i); at each k = 0..T a fresh theta_u,k is drawn and x_k is
/// tested against X_u(theta_u,k) before advancing x <- A_cl x + w.
TrajectoryResult run_trajectory(const ResolvedScenario& resolved, RandomStream& stream,
                                const TrajectoryOptions& opts = {});

/// Normal-approximation 95% interval (z = 1.96, Wald), clipped to [0, 1].
std::pair<double, double> wald_interval(std::int64_t successes, std::int64_t samples);

/// Aggregates independent trajectories. Trajectory j uses the stream
/// (master_seed, j), so the result does not depend on the worker count.
MonteCarloReport estimate(const ResolvedScenario& resolved, const MonteCarloConfig& cfg);

struct SweepRow {
    double sigma_w = 0.0;
    double sigma_i = 0.0;
    double sigma_u = 0.0;
    double p_empty = 0.0;
    double eta = 0.0;
    double beta = 0.0;
    double c = 0.0;
    double bound = 0.0;
    double empirical = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    /// "valid", "invalid", or "error: <message>".
    std::string status;
};

/// Slack allowed when checking that the empirical CI dominates the bound.
inline constexpr double kDominanceSlack = 1e-3;

/// Evaluates the analytic bound and the empirical estimate on the product
/// grid sigma_w x sigma_i x sigma_u. Every row reuses cfg.master_seed.
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<double>& sigma_w_list,
                            const std::vector<double>& sigma_i_list,
                            const std::vector<double>& sigma_u_list, const MonteCarloConfig& cfg);

/// True when ci_high >= bound - kDominanceSlack for every valid row.
bool dominance_holds(const std::vector<SweepRow>& rows);

}  // namespace thetacbc
