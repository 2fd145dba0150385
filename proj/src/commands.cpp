// Run / verify / sweep / schema entry points behind the CLI.

#include "ssblab/experiments.hpp"

#include "ssblab/errors.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ssblab::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string describe(const PointSpec& s) {
    std::ostringstream o;
    o << "L=" << s.L << " contact=" << (s.contact_size > 0 ? std::to_string(s.contact_size) : "all")
      << " lambda=" << s.lambda << " xi=" << s.xi;
    return o.str();
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
}

// Maps an exception to an exit code and a short label for the summary line.
int classify(std::exception_ptr e, std::string& label, std::string& message) {
    try {
        std::rethrow_exception(e);
    } catch (const PositivityError& x) {
        label = "positivity";
        message = x.what();
        return kExitCertificate;
    } catch (const ConvergenceError& x) {
        label = "convergence";
        message = x.what();
        return kExitConvergence;
    } catch (const ConfigError& x) {
        label = "config";
        message = x.what();
        return kExitConfig;
    } catch (const std::invalid_argument& x) {
        // DomainError / DimensionError: a parameter the config supplied is out of range.
        label = "config";
        message = x.what();
        return kExitConfig;
    } catch (const std::exception& x) {
        label = "error";
        message = x.what();
        return kExitConfig;
    }
}

struct Loaded {
    ExperimentConfig config;
    fs::path out_dir;
    std::string hash;
};

// Returns the exit code on failure, 0 with `loaded` filled otherwise.
int load(const CommandOptions& options, Loaded& loaded, std::ostream& err) {
    try {
        loaded.config = load_config(options.config);
        if (options.seed) loaded.config.seed = *options.seed;
        loaded.out_dir = resolve_out_dir(options, loaded.config);
        loaded.hash = config_hash(loaded.config);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::vector<PointResult> completed(const std::vector<std::optional<PointResult>>& done) {
    std::vector<PointResult> out;
    for (const auto& d : done) {
        if (d) out.push_back(*d);
    }
    return out;
}

std::size_t first_missing(const std::vector<std::optional<PointResult>>& done) {
    for (std::size_t i = 0; i < done.size(); ++i) {
        if (!done[i]) return i;
    }
    return done.size();
}

json record_json(const Loaded& l, const std::vector<PointResult>& rows, double seconds,
                 const std::string& status) {
    json rec;
    rec["config_hash"] = l.hash;
    rec["code_version"] = kCodeVersion;
    rec["schema_version"] = kSchemaVersion;
    rec["seed"] = l.config.seed;
    rec["status"] = status;
    json pts = json::array();
    for (const auto& r : rows) pts.push_back(point_json(r, l.hash));
    rec["points"] = std::move(pts);
    rec["wall_clock_seconds"] = seconds;
    return rec;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << text;
}

}  // namespace

fs::path resolve_out_dir(const CommandOptions& options, const ExperimentConfig& config) {
    if (options.out) return *options.out;
    if (const char* v = std::getenv(kOutDirVariable); v && *v) return v;
    return config.output.dir;
}

std::vector<CheckLine> verify_checks(const PointResult& p) {
    std::vector<CheckLine> lines;
    const double gmax = p.environment ? p.environment->max_eigenvalue() : 1.0;
    lines.push_back({"positivity", p.g_min_eigenvalue >= -1e-10 * std::max(1.0, gmax), false,
                     "min eig g = " + fmt(p.g_min_eigenvalue)});
    for (const auto& c : p.certificates) {
        CheckLine l{c.name, c.passed, !c.preconditions_met, "slack = " + fmt(c.slack)};
        if (!c.notes.empty()) l.detail += " (" + c.notes.front() + ")";
        lines.push_back(std::move(l));
    }
    if (p.theorem2) {
        const auto& t = *p.theorem2;
        lines.push_back({"theorem2", t.base.passed, false,
                         "slack = " + fmt(t.base.slack) + ", epsilon_hat = " + fmt(t.epsilon_hat) +
                             ", nu = " + fmt(t.nu)});
        lines.push_back({"theorem2[lhs>=0]", t.base.lhs >= -fragility::kCertificateTolerance, false,
                         "lhs = " + fmt(t.base.lhs)});
    }
    if (p.regions) {
        const auto& r = *p.regions;
        if (p.ppv_clustering) {
            lines.push_back({"fluctuation-bound[ppv]", r.ppv_bound_holds, false,
                             "|Omega| = " + std::to_string(r.ppv_volume) +
                                 ", min slack = " + fmt(r.ppv_bound_min_slack)});
        } else {
            lines.push_back({"fluctuation-bound[ppv]", false, true, "state is not clustering"});
        }
        lines.push_back({"fluctuation-bound[afv]", r.afv_bound_holds, false,
                         "|Omega| = " + std::to_string(r.afv_volume) +
                             ", min slack = " + fmt(r.afv_bound_min_slack)});
    }
    if (p.lindblad) {
        const auto& l = *p.lindblad;
        lines.push_back({"integrator-health", l.max_trace_drift < 1e-8 && l.min_eigenvalue >= -1e-6, false,
                         "max |tr rho - 1| = " + fmt(l.max_trace_drift) +
                             ", min eig = " + fmt(l.min_eigenvalue)});
    }
    return lines;
}

int command_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    Loaded l;
    if (int rc = load(options, l, err)) return rc;
    const auto start = std::chrono::steady_clock::now();
    const auto points = expand_points(l.config);
    std::vector<std::optional<PointResult>> done;
    std::exception_ptr failure;
    try {
        ensure_dir(l.out_dir);
        run_points(l.config, points, Depth::Run, options.threads, &done);
    } catch (...) {
        failure = std::current_exception();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto rows = completed(done);
    const std::string prefix = l.config.output.prefix;

    int rc = kExitOk;
    std::string status = "ok";
    std::string label;
    std::string message;
    if (failure) {
        rc = classify(failure, label, message);
        const std::size_t bad = first_missing(done);
        std::string where = bad < points.size() ? " at point " + std::to_string(bad) + " (" + describe(points[bad]) + ")" : "";
        message = options.config.string() + where + ": " + message;
        status = "failed: " + label;
        err << "error: " << message << '\n';
    }
    try {
        std::ostringstream csv;
        write_points_csv(csv, rows);
        if (failure) csv << "# FAILED: " << message << '\n';
        if (l.config.output.csv) write_text(l.out_dir / (prefix + "_points.csv"), csv.str());
        if (l.config.output.json) {
            json rec = record_json(l, rows, seconds, status);
            if (failure) rec["failure"] = message;
            write_text(l.out_dir / (prefix + "_record.json"), rec.dump(2) + "\n");
        }
        for (std::size_t i = 0; i < done.size(); ++i) {
            if (!done[i]) continue;
            const auto& r = *done[i];
            if (l.config.output.csv && r.environment) {
                std::ostringstream g;
                env::write_g_csv(g, *r.environment);
                write_text(l.out_dir / (prefix + "_g_" + std::to_string(i) + ".csv"), g.str());
            }
            if (l.config.output.csv && r.lindblad) {
                std::ostringstream t;
                dynamics::write_trajectory_csv(t, r.lindblad->trajectory);
                write_text(l.out_dir / (prefix + "_trajectory_" + std::to_string(i) + ".csv"), t.str());
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return rc ? rc : kExitConfig;
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << "point " << i << " (" << describe(r.spec) << "): g00 = " << fmt(r.g00)
            << ", S1_afv(t) = " << fmt(r.s1_afv) << ", S1_ppv(t) = " << fmt(r.s1_ppv)
            << ", gamma_afv = " << fmt(r.gamma_afv) << ", gamma_ppv = " << fmt(r.gamma_ppv) << '\n';
    }
    out << "wrote " << (l.out_dir / (prefix + "_points.csv")).string() << '\n';
    return rc;
}

int command_verify(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    Loaded l;
    if (int rc = load(options, l, err)) return rc;
    const auto points = expand_points(l.config);
    std::vector<std::optional<PointResult>> done;
    try {
        run_points(l.config, points, Depth::Verify, options.threads, &done);
    } catch (...) {
        std::string label;
        std::string message;
        const int rc = classify(std::current_exception(), label, message);
        const std::size_t bad = first_missing(done);
        out << "FAIL " << label << ": " << message << '\n';
        out << "verify: FAILED (first failing check: " << label << ", point " << bad << ")\n";
        err << "error: " << options.config.string() << ": " << message << '\n';
        return rc;
    }

    int passed = 0;
    int skipped = 0;
    std::string first_failure;
    json report = json::array();
    for (std::size_t i = 0; i < done.size(); ++i) {
        const auto& p = *done[i];
        out << "point " << i << " (" << describe(p.spec) << ")\n";
        for (const auto& line : verify_checks(p)) {
            const char* tag = line.skipped ? "SKIP" : (line.passed ? "PASS" : "FAIL");
            out << "  " << tag << ' ' << line.name << ": " << line.detail << '\n';
            if (line.skipped) {
                ++skipped;
            } else if (line.passed) {
                ++passed;
            } else if (first_failure.empty()) {
                first_failure = line.name;
            }
        }
        report.push_back(point_json(p, l.hash));
    }
    try {
        ensure_dir(l.out_dir);
        write_text(l.out_dir / (l.config.output.prefix + "_verify.json"),
                   json{{"config_hash", l.hash}, {"status", first_failure.empty() ? "pass" : "fail"},
                        {"points", report}}
                           .dump(2) +
                       "\n");
    } catch (const std::exception& e) {
        err << "warning: " << e.what() << '\n';
    }
    if (!first_failure.empty()) {
        out << "verify: FAILED (first failing check: " << first_failure << ")\n";
        return kExitCertificate;
    }
    out << "verify: all " << passed << " checks passed";
    if (skipped) out << " (" << skipped << " skipped: preconditions unmet)";
    out << '\n';
    return kExitOk;
}

int command_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    Loaded l;
    if (int rc = load(options, l, err)) return rc;
    if (l.config.sweep.empty()) {
        err << "error: " << options.config.string() << ": sweep block missing or empty\n";
        return kExitConfig;
    }
    const auto points = expand_points(l.config);
    std::vector<std::optional<PointResult>> done;
    std::exception_ptr failure;
    try {
        run_points(l.config, points, Depth::Run, options.threads, &done);
    } catch (...) {
        failure = std::current_exception();
    }
    const auto rows = completed(done);
    int rc = kExitOk;
    std::string message;
    if (failure) {
        std::string label;
        rc = classify(failure, label, message);
        const std::size_t bad = first_missing(done);
        message = options.config.string() + " at point " + std::to_string(bad) + " (" +
                  describe(points[bad]) + "): " + message;
        err << "error: " << message << '\n';
    }
    json summary = sweep_summary(l.config, rows);
    if (failure) summary["failure"] = message;
    try {
        ensure_dir(l.out_dir);
        std::ostringstream csv;
        write_points_csv(csv, rows);
        if (failure) csv << "# FAILED: " << message << '\n';
        write_text(l.out_dir / (l.config.output.prefix + "_sweep.csv"), csv.str());
        write_text(l.out_dir / (l.config.output.prefix + "_sweep_summary.json"), summary.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return rc ? rc : kExitConfig;
    }
    write_points_csv(out, rows);
    out << summary.dump(2) << '\n';
    return rc;
}

int command_schema(std::ostream& out) {
    out << config_schema().dump(2) << "\n\n" << csv_schema_text();
    return kExitOk;
}

}  // namespace ssblab::experiments
