// Config-driven runs, verification suites and scaling sweeps.

#pragma once

#include "ssblab/fragility.hpp"
#include "ssblab/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ssblab::experiments {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kOutDirVariable = "SSBLAB_OUT_DIR";

enum class ModelKind { Ising, FreeBoson };

struct ModelBlock {
    ModelKind kind = ModelKind::Ising;
    int L = 4;
    int d = 1;
    double J = 1.0;
    double h = 0.0;
    int n_max = 6;
    int n_max_excited = -1;
    double hopping = 1.0;
    int particles = 4;
    double alpha = 0.25;
    std::optional<double> density;  // boson sweeps: particles = round(density * |Lambda|)
};

struct EnvironmentBlock {
    env::KernelKind kernel = env::KernelKind::Constant;
    double gbar = 1.0;
    double xi = 1.0;
    std::vector<double> table;
    int contact_size = 0;         // 0: whole lattice; otherwise leading sites
    std::vector<int> contact_sites;
    double correlation_time = 0.0;
};

struct DriveBlock {
    double lambda = 0.01;
    double t_final = 1.0;
    int n_steps = 200;
    int n_quad = 64;
    double horizon = 1.0;
    double epsilon = 0.5;
    int grid_points = 32;
    int report_points = 11;
    bool lindblad = false;
    int random_trials = 0;   // verify: random translation-invariant Theorem-1 draws
};

struct SweepBlock {
    std::vector<int> L;
    std::vector<int> contact_size;
    std::vector<double> lambda;
    std::vector<double> xi;

    bool empty() const { return L.empty() && contact_size.empty() && lambda.empty() && xi.empty(); }
};

struct OutputBlock {
    std::string dir = "ssblab_out";
    std::string prefix = "run";
    bool csv = true;
    bool json = true;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    ModelBlock model;
    EnvironmentBlock environment;
    DriveBlock drive;
    SweepBlock sweep;
    OutputBlock output;
    std::uint64_t seed = 0;
    nlohmann::json source;  // normalised document used for hashing
};

// Throws ConfigError naming the offending key path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_schema();
std::string csv_schema_text();

std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const ExperimentConfig& config);

struct PointSpec {
    int L = 0;
    int contact_size = 0;
    double lambda = 0.0;
    double xi = 0.0;
};

// Cartesian product of the sweep lists; an empty sweep is the single base point.
std::vector<PointSpec> expand_points(const ExperimentConfig& config);

struct LindbladSummary {
    double s_lin = 0.0;          // S_lin(t_final)
    double s_first = 0.0;        // S1(t_final)
    double convention_ratio = 0.0;  // dS_lin/dt at 0 over dS1/dt at 0
    double max_trace_drift = 0.0;
    double min_eigenvalue = 1.0;
    int n_steps = 0;
    dynamics::Trajectory trajectory;
};

struct RegionSummary {
    int afv_volume = 0;
    int ppv_volume = 0;
    bool ppv_bound_holds = false;
    bool afv_bound_holds = false;
    double afv_bound_min_slack = 0.0;
    double ppv_bound_min_slack = 0.0;
};

struct PointResult {
    PointSpec spec;
    int volume = 0;
    int contact_volume = 0;
    double g00 = 0.0;
    double g_min_eigenvalue = 0.0;
    double gamma_afv = 0.0;
    double gamma_ppv = 0.0;
    double ratio = 0.0;           // +inf when gamma_ppv == 0
    double delta_gamma = 0.0;
    double fluct_afv = 0.0;       // <dM^dag dM>
    double fluct_ppv = 0.0;
    double s1_afv = 0.0;          // S1 at t_final
    double s1_ppv = 0.0;
    std::vector<fragility::Certificate> certificates;
    std::optional<fragility::Theorem2Certificate> theorem2;
    std::optional<LindbladSummary> lindblad;
    std::optional<RegionSummary> regions;
    bool ppv_clustering = false;
    std::optional<env::EnvCorrelation> environment;
    std::string status = "ok";
};

enum class Depth { Run, Verify };

// One sweep point through model, environment, entropy and certificates.
PointResult run_point(const ExperimentConfig& config, const PointSpec& spec, Depth depth);

// Runs every point on `threads` workers. Results keep the order of `points`.
// A failing point rethrows after all workers finish; completed results stay in `done`.
std::vector<PointResult> run_points(const ExperimentConfig& config,
                                    const std::vector<PointSpec>& points, Depth depth, int threads,
                                    std::vector<std::optional<PointResult>>* done = nullptr);

void write_points_csv(std::ostream& out, const std::vector<PointResult>& rows);
std::string format_number(double v);

nlohmann::json certificate_json(const fragility::Certificate& cert, const std::string& inputs_hash);
nlohmann::json point_json(const PointResult& point, const std::string& inputs_hash);

struct FitResult {
    bool fitted = false;
    double exponent = 0.0;
    double intercept = 0.0;
    int points = 0;
    std::string note;
};

// Least-squares slope of log y against log x; needs >= 3 distinct positive points.
FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y);
nlohmann::json sweep_summary(const ExperimentConfig& config, const std::vector<PointResult>& rows);

// Random state in one energy eigenspace of the model, averaged over all lattice
// translations (so it is stationary and translation invariant). Needs dim <= 4096.
ManyBodyState random_invariant_state(const models::IsingModel& model, std::mt19937_64& rng);
// Tabulated kernel with a random nonnegative, inversion-symmetric spectrum.
env::SpatialKernel random_psd_kernel(const lattice::Lattice& lattice, std::mt19937_64& rng);
std::vector<int> random_contact(const lattice::Lattice& lattice, std::mt19937_64& rng);
Mat random_site_operator(int q, std::mt19937_64& rng);

struct CheckLine {
    std::string name;
    bool passed = false;
    bool skipped = false;   // preconditions unmet, reported but not counted
    std::string detail;
};

// The verify suite for one point: positivity, both vacuum certificates, the
// intensive-fluctuation bound on clustering states and integrator health.
std::vector<CheckLine> verify_checks(const PointResult& point);

// Exit codes of the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificate = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

// Output directory: --out, then $SSBLAB_OUT_DIR, then the config's output.dir.
std::filesystem::path resolve_out_dir(const CommandOptions& options, const ExperimentConfig& config);

int command_run(const CommandOptions& options, std::ostream& out, std::ostream& err);
int command_verify(const CommandOptions& options, std::ostream& out, std::ostream& err);
int command_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);
int command_schema(std::ostream& out);

}  // namespace ssblab::experiments
