// Experiment config parsing, schema and hashing.

#include "ssblab/experiments.hpp"

#include "ssblab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ssblab::experiments {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so unknown ones
// can be reported with their full path.
class Block {
public:
    Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw ConfigError("config: " + (path.empty() ? std::string("<root>") : path) + ": " + what);
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    std::string key_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    double number(const std::string& key, double fallback, double lo, double hi) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number()) fail(key_path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x) || x < lo || x > hi) {
            std::ostringstream s;
            s << "value " << x << " outside [" << lo << ", " << hi << "]";
            fail(key_path(key), s.str());
        }
        return x;
    }

    int integer(const std::string& key, int fallback, int lo, int hi) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) fail(key_path(key), "expected an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > hi) {
            fail(key_path(key), "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]");
        }
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) fail(key_path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_string()) fail(key_path(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<int> int_list(const std::string& key, int lo, int hi) {
        std::vector<int> out;
        if (!has(key)) return out;
        const json& v = node_.at(key);
        if (!v.is_array()) fail(key_path(key), "expected a list");
        for (const json& e : v) {
            if (!e.is_number_integer()) fail(key_path(key), "expected integers");
            const long long x = e.get<long long>();
            if (x < lo || x > hi) fail(key_path(key), "entry " + std::to_string(x) + " out of range");
            out.push_back(static_cast<int>(x));
        }
        return out;
    }

    std::vector<double> real_list(const std::string& key, double lo, double hi) {
        std::vector<double> out;
        if (!has(key)) return out;
        const json& v = node_.at(key);
        if (!v.is_array()) fail(key_path(key), "expected a list");
        for (const json& e : v) {
            if (!e.is_number()) fail(key_path(key), "expected numbers");
            const double x = e.get<double>();
            if (!std::isfinite(x) || x < lo || x > hi) fail(key_path(key), "entry out of range");
            out.push_back(x);
        }
        return out;
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!seen_.count(it.key())) fail(key_path(it.key()), "unknown key");
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

constexpr double kHuge = 1e6;

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig cfg;
    Block root(doc, "");
    if (!root.has("schema_version")) Block::fail("schema_version", "missing");
    cfg.schema_version = root.integer("schema_version", kSchemaVersion, 1, 1000);
    if (cfg.schema_version != kSchemaVersion) {
        Block::fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version) +
                                          " (this build reads " + std::to_string(kSchemaVersion) + ")");
    }
    cfg.name = root.text("name", "");
    const double seed = root.number("seed", 0.0, 0.0, 9007199254740992.0);
    if (seed != std::floor(seed)) Block::fail("seed", "expected a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(seed);

    if (!root.has("model")) Block::fail("model", "missing");
    {
        Block m(root.raw("model"), "model");
        const std::string type = m.text("type", "ising");
        if (type == "ising") {
            cfg.model.kind = ModelKind::Ising;
        } else if (type == "free-boson") {
            cfg.model.kind = ModelKind::FreeBoson;
        } else {
            Block::fail("model.type", "expected \"ising\" or \"free-boson\", got \"" + type + "\"");
        }
        cfg.model.L = m.integer("L", 4, 1, 64);
        cfg.model.d = m.integer("d", 1, 1, 3);
        cfg.model.J = m.number("J", 1.0, -kHuge, kHuge);
        cfg.model.h = m.number("h", 0.0, -kHuge, kHuge);
        cfg.model.n_max = m.integer("n_max", 6, 1, 64);
        cfg.model.n_max_excited = m.integer("n_max_excited", -1, -1, 64);
        cfg.model.hopping = m.number("hopping", 1.0, 0.0, kHuge);
        cfg.model.particles = m.integer("particles", 4, 0, 64);
        cfg.model.alpha = m.number("alpha", 0.25, 0.0, 8.0);
        if (m.has("density")) cfg.model.density = m.number("density", 0.0, 0.0, 16.0);
        m.finish();
    }
    if (root.has("environment")) {
        Block e(root.raw("environment"), "environment");
        const std::string kernel = e.text("kernel", "constant");
        try {
            cfg.environment.kernel = env::kernel_kind_from_string(kernel);
        } catch (const std::exception&) {
            Block::fail("environment.kernel", "unknown kernel \"" + kernel + "\"");
        }
        cfg.environment.gbar = e.number("gbar", 1.0, 0.0, kHuge);
        cfg.environment.xi = e.number("xi", 1.0, 1e-9, kHuge);
        cfg.environment.table = e.real_list("table", -kHuge, kHuge);
        cfg.environment.contact_size = e.integer("contact_size", 0, 0, 1 << 20);
        cfg.environment.contact_sites = e.int_list("contact_sites", 0, 1 << 20);
        cfg.environment.correlation_time = e.number("correlation_time", 0.0, 0.0, kHuge);
        if (cfg.environment.kernel == env::KernelKind::Tabulated && cfg.environment.table.empty()) {
            Block::fail("environment.table", "a tabulated kernel needs a table");
        }
        if (cfg.environment.contact_size > 0 && !cfg.environment.contact_sites.empty()) {
            Block::fail("environment", "give contact_size or contact_sites, not both");
        }
        e.finish();
    }
    if (root.has("drive")) {
        Block d(root.raw("drive"), "drive");
        cfg.drive.lambda = d.number("lambda", 0.01, 0.0, 10.0);
        cfg.drive.t_final = d.number("t_final", 1.0, 0.0, kHuge);
        cfg.drive.n_steps = d.integer("n_steps", 200, 10, 10000000);
        cfg.drive.n_quad = d.integer("n_quad", 64, 8, 1 << 16);
        if (cfg.drive.n_quad % 2 != 0) Block::fail("drive.n_quad", "must be even");
        cfg.drive.horizon = d.number("horizon", cfg.drive.t_final, 0.0, kHuge);
        cfg.drive.epsilon = d.number("epsilon", 0.5, 1e-12, 1.0);
        cfg.drive.grid_points = d.integer("grid_points", 32, 32, 1 << 14);
        cfg.drive.report_points = d.integer("report_points", 11, 2, 1 << 14);
        cfg.drive.lindblad = d.boolean("lindblad", false);
        cfg.drive.random_trials = d.integer("random_trials", 0, 0, 100000);
        if (cfg.drive.horizon < cfg.drive.t_final) {
            Block::fail("drive.horizon", "must be >= t_final");
        }
        d.finish();
    }
    if (root.has("sweep")) {
        Block s(root.raw("sweep"), "sweep");
        cfg.sweep.L = s.int_list("L", 1, 64);
        cfg.sweep.contact_size = s.int_list("contact_size", 1, 1 << 20);
        cfg.sweep.lambda = s.real_list("lambda", 0.0, 10.0);
        cfg.sweep.xi = s.real_list("xi", 1e-9, kHuge);
        s.finish();
    }
    if (root.has("output")) {
        Block o(root.raw("output"), "output");
        cfg.output.dir = o.text("dir", cfg.output.dir);
        cfg.output.prefix = o.text("prefix", cfg.output.prefix);
        cfg.output.csv = o.boolean("csv", true);
        cfg.output.json = o.boolean("json", true);
        if (cfg.output.prefix.empty() || cfg.output.prefix.find('/') != std::string::npos) {
            Block::fail("output.prefix", "must be a plain file-name stem");
        }
        o.finish();
    }
    root.finish();
    cfg.source = doc;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& config) {
    json doc = config.source;
    doc["seed"] = config.seed;  // --seed overrides take part in the hash
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
    return buf;
}

json config_schema() {
    auto num = [](double lo, double hi) { return json{{"type", "number"}, {"minimum", lo}, {"maximum", hi}}; };
    auto integer = [](int lo, int hi) { return json{{"type", "integer"}, {"minimum", lo}, {"maximum", hi}}; };
    auto list = [](json item) { return json{{"type", "array"}, {"items", std::move(item)}}; };
    auto object = [](json props, std::vector<std::string> required = {}) {
        json o{{"type", "object"}, {"additionalProperties", false}, {"properties", std::move(props)}};
        if (!required.empty()) o["required"] = required;
        return o;
    };
    json schema = object(
        {{"schema_version", json{{"const", kSchemaVersion}}},
         {"name", json{{"type", "string"}}},
         {"seed", integer(0, 2147483647)},
         {"model", object({{"type", json{{"enum", {"ising", "free-boson"}}}},
                           {"L", integer(1, 64)},
                           {"d", integer(1, 3)},
                           {"J", num(-kHuge, kHuge)},
                           {"h", num(-kHuge, kHuge)},
                           {"n_max", integer(1, 64)},
                           {"n_max_excited", integer(-1, 64)},
                           {"hopping", num(0, kHuge)},
                           {"particles", integer(0, 64)},
                           {"alpha", num(0, 8)},
                           {"density", num(0, 16)}},
                          {"type"})},
         {"environment", object({{"kernel", json{{"enum", {"constant", "exponential", "delta", "tabulated"}}}},
                                 {"gbar", num(0, kHuge)},
                                 {"xi", num(1e-9, kHuge)},
                                 {"table", list(json{{"type", "number"}})},
                                 {"contact_size", integer(0, 1 << 20)},
                                 {"contact_sites", list(integer(0, 1 << 20))},
                                 {"correlation_time", num(0, kHuge)}})},
         {"drive", object({{"lambda", num(0, 10)},
                           {"t_final", num(0, kHuge)},
                           {"n_steps", integer(10, 10000000)},
                           {"n_quad", integer(8, 1 << 16)},
                           {"horizon", num(0, kHuge)},
                           {"epsilon", num(1e-12, 1)},
                           {"grid_points", integer(32, 1 << 14)},
                           {"report_points", integer(2, 1 << 14)},
                           {"lindblad", json{{"type", "boolean"}}},
                           {"random_trials", integer(0, 100000)}})},
         {"sweep", object({{"L", list(integer(1, 64))},
                           {"contact_size", list(integer(1, 1 << 20))},
                           {"lambda", list(num(0, 10))},
                           {"xi", list(num(1e-9, kHuge))}})},
         {"output", object({{"dir", json{{"type", "string"}}},
                            {"prefix", json{{"type", "string"}}},
                            {"csv", json{{"type", "boolean"}}},
                            {"json", json{{"type", "boolean"}}}})}},
        {"schema_version", "model"});
    schema["$schema"] = "http://json-schema.org/draft-07/schema#";
    schema["title"] = "ssblab experiment config";
    return schema;
}

std::string csv_schema_text() {
    return "points CSV (run and sweep), one row per sweep point:\n"
           "  L            linear lattice size\n"
           "  volume       |Lambda| = L^d\n"
           "  contact      |Lambda_C|, sites coupled to the environment\n"
           "  xi           kernel range xi_E (exponential kernel)\n"
           "  lambda       coupling strength\n"
           "  g00          zero-momentum environment correlation\n"
           "  gamma_afv    fitted first-order entropy rate of the symmetric vacuum\n"
           "  gamma_ppv    same for the symmetry-broken vacuum\n"
           "  ratio        gamma_afv / gamma_ppv (inf when gamma_ppv = 0)\n"
           "  delta_gamma  gamma_afv - gamma_ppv\n"
           "  fluct_afv    <dM^dag dM> of the symmetric vacuum\n"
           "  fluct_ppv    <dM^dag dM> of the symmetry-broken vacuum\n"
           "  s1_afv       first-order entropy at t_final\n"
           "  s1_ppv       same for the symmetry-broken vacuum\n"
           "  status       ok, or a note on truncation reliability\n"
           "trajectory CSV (run with drive.lindblad):\n"
           "  t,S_lin,tr_rho,min_eig_rho,M_re,M_im,dMdag_dM\n"
           "g-matrix CSV: k1,k2,re,im over momentum indices\n";
}

}  // namespace ssblab::experiments
