#include "cmacg/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "cmacg/distributions.hpp"
#include "cmacg/io.hpp"
#include "cmacg/verify.hpp"

namespace cmacg::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Input or configuration problem; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t env_seed() {
    const char* s = std::getenv("CMACG_DEFAULT_SEED");
    if (s == nullptr || *s == '\0') return kDefaultSeed;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used, 10);
        if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("CMACG_DEFAULT_SEED is not an unsigned integer: '") + s + "'");
    }
}

io::Format file_format(const RunConfig& cfg, const std::string& path) {
    return cfg.format.empty() ? io::format_from_extension(path) : io::parse_format(cfg.format);
}

// Parameter matrix from --param or --uniform; returns P and a digest of its
// canonical CSV serialization.
std::pair<HermitianPD, std::string> load_parameter(const RunConfig& cfg) {
    if (cfg.uniform && !cfg.param_path.empty()) throw ConfigError("--param and --uniform are exclusive");
    ComplexMatrix p;
    if (!cfg.param_path.empty()) {
        p = io::read_matrix(io::read_file(cfg.param_path), io::format_from_extension(cfg.param_path));
        if (cfg.m && static_cast<std::size_t>(p.rows()) != *cfg.m) {
            std::ostringstream os;
            os << "param: file holds a " << p.rows() << "x" << p.cols() << " matrix but --m is " << *cfg.m;
            throw ConfigError(os.str());
        }
    } else if (cfg.uniform) {
        if (!cfg.m) throw ConfigError("m: --uniform requires --m");
        p = ComplexMatrix::Identity(static_cast<Eigen::Index>(*cfg.m), static_cast<Eigen::Index>(*cfg.m));
    } else {
        return {HermitianPD::identity(1), ""};
    }
    try {
        HermitianPD hp(p);
        return {hp, io::sha256_hex(io::matrix_to_csv(hp.matrix()))};
    } catch (const Error& e) {
        if (e.is_numerical()) throw;
        throw ConfigError(std::string("param: ") + e.what());
    }
}

// diag(m, m-1, ..., 1), the verify default.
HermitianPD default_parameter(std::size_t m) {
    RealVector d(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) d(static_cast<Eigen::Index>(i)) = static_cast<double>(m - i);
    return HermitianPD::diagonal(d);
}

json metadata(const RunConfig& cfg, std::size_t m, std::size_t r, std::size_t n, const std::string& sha,
              Clock::time_point start) {
    json meta;
    meta["seed"] = cfg.seed;
    meta["m"] = m;
    meta["r"] = r;
    meta["n"] = n;
    meta["param_sha256"] = sha;
    meta["tool_version"] = CMACG_VERSION;
    meta["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    return meta;
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        io::write_file_atomic(path, content);
}

json report_json(const VerificationReport& r) {
    return json{{"type", "mean"},       {"check_name", r.check_name}, {"n_samples", r.n_samples},
                {"estimate", r.estimate}, {"std_error", r.std_error}, {"target", r.target},
                {"k", r.k},               {"verdict", r.passed ? "pass" : "fail"},
                {"details", r.details}};
}

json report_json(const TwoSampleResult& r) {
    json comps = json::array();
    for (const auto& c : r.components) comps.push_back(report_json(c));
    return json{{"type", "two_sample"},
                {"check_name", r.check_name},
                {"statistic", r.statistic},
                {"critical_value", r.critical_value},
                {"n1", r.n1},
                {"n2", r.n2},
                {"level", r.level},
                {"functional_description", r.functional_description},
                {"verdict", r.passed ? "pass" : "fail"},
                {"details", r.details},
                {"components", comps}};
}

// ---------------------------------------------------------------------------

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
    const auto start = Clock::now();
    if (cfg.param_path.empty() && !cfg.uniform) throw ConfigError("param: one of --param or --uniform is required");
    if (!cfg.r) throw ConfigError("r: --r is required");
    if (cfg.n < 1) throw ConfigError("n: --n must be at least 1");
    if (cfg.output_path.empty()) throw ConfigError("out: --out is required");
    auto [p, sha] = load_parameter(cfg);
    const std::size_t m = p.dim();
    if (*cfg.r < 1 || *cfg.r > m) throw ConfigError("r: need 1 <= r <= m");

    const CmacgParams params(p, *cfg.r);
    RngState rng(cfg.seed);
    std::vector<ComplexMatrix> draws;
    draws.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const StiefelPoint h = sample_cmacg(params, rng);
        draws.push_back(cfg.as_projection ? projection_matrix(h) : h.frame());
    }
    const io::Format fmt = file_format(cfg, cfg.output_path);
    io::write_file_atomic(cfg.output_path, io::write_draws(draws, fmt));
    json meta = metadata(cfg, m, *cfg.r, cfg.n, sha, start);
    meta["as_projection"] = cfg.as_projection;
    io::write_file_atomic(cfg.output_path + ".meta.json", meta.dump(2) + "\n");
    out << "wrote " << cfg.n << " draws to " << cfg.output_path << " (seed " << cfg.seed << ")\n";
    return kSuccess;
}

int cmd_density(const RunConfig& cfg, std::ostream& out) {
    if (cfg.param_path.empty() && !cfg.uniform) throw ConfigError("param: one of --param or --uniform is required");
    if (!cfg.r) throw ConfigError("r: --r is required");
    if (cfg.input_path.empty()) throw ConfigError("in: --in is required");
    auto [p, sha] = load_parameter(cfg);
    const std::size_t m = p.dim();
    if (*cfg.r < 1 || *cfg.r > m) throw ConfigError("r: need 1 <= r <= m");
    const CmacgParams params(p, *cfg.r);

    const auto frames = io::read_draws(io::read_file(cfg.input_path), file_format(cfg, cfg.input_path), m, *cfg.r);
    std::vector<double> values;
    values.reserve(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        try {
            values.push_back(cmacg_log_density(params, StiefelPoint(frames[k])));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotOnManifold) throw;
            std::ostringstream os;
            os << "in: draw " << k << " is not semi-unitary, residual "
               << io::format_double(e.residual().value_or(0.0));
            throw ConfigError(os.str());
        }
    }

    std::string text;
    if (!cfg.output_path.empty() && io::format_from_extension(cfg.output_path) == io::Format::Json) {
        text = json(values).dump() + "\n";
    } else {
        for (double v : values) text += io::format_double(v) + "\n";
    }
    write_output(cfg.output_path, text, out);
    return kSuccess;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const std::vector<std::string>& known = check_names();
    std::vector<std::string> checks = cfg.checks.empty() ? known : cfg.checks;
    for (const auto& c : checks)
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw ConfigError("checks: unknown check '" + c + "'");

    std::optional<HermitianPD> p;
    if (!cfg.param_path.empty() || cfg.uniform) p = load_parameter(cfg).first;
    const std::size_t m = p ? p->dim() : cfg.m.value_or(3);
    const std::size_t r = cfg.r.value_or(std::min<std::size_t>(2, m));
    if (r < 1 || r > m) throw ConfigError("r: need 1 <= r <= m");
    if (!p) p = default_parameter(m);
    const CmacgParams params(*p, r);

    CheckOptions opts;
    opts.level = cfg.level;
    if (!(opts.level > 0.0 && opts.level < 1.0)) throw ConfigError("level: must lie in (0, 1)");

    json reports = json::array();
    bool all_pass = true;
    for (const auto& name : checks) {
        // Each check owns a stream keyed by its position in the canonical
        // list, so a report does not depend on which other checks ran.
        const auto idx = static_cast<std::uint64_t>(std::find(known.begin(), known.end(), name) - known.begin());
        RngState rng(derive_seed(cfg.seed, idx));
        try {
            if (name == "normalization") {
                auto rep = normalization_check(params, cfg.n, rng, opts);
                all_pass = all_pass && rep.passed;
                reports.push_back(report_json(rep));
            } else if (name == "unitary_invariance") {
                auto rep = unitary_invariance_check(params, cfg.n, rng, opts);
                all_pass = all_pass && rep.passed;
                reports.push_back(report_json(rep));
            } else if (name == "corollary") {
                RngState brng(derive_seed(cfg.seed, 1000 + idx));
                const Eigen::Index md = static_cast<Eigen::Index>(m);
                ComplexMatrix b = ComplexMatrix::Identity(md, md);
                for (Eigen::Index i = 0; i < b.size(); ++i)
                    b.data()[i] += 0.5 * Complex(brng.normal(), brng.normal());
                auto rep = corollary_check(params, b, cfg.n, rng, opts);
                rep.details["b_frobenius_norm"] = b.norm();
                all_pass = all_pass && rep.passed;
                reports.push_back(report_json(rep));
            } else if (name == "general_class") {
                auto rep = general_class_check(params, cfg.n, rng, opts);
                all_pass = all_pass && rep.passed;
                reports.push_back(report_json(rep));
            } else if (name == "normal_covariance") {
                auto rep = normal_covariance_check(params.normal(), cfg.n, rng, opts);
                all_pass = all_pass && rep.passed;
                reports.push_back(report_json(rep));
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InsufficientSample) throw ConfigError(std::string("n: ") + e.what());
            throw;
        }
    }
    json doc = reports;
    write_output(cfg.output_path, doc.dump(2) + "\n", out);
    if (!cfg.output_path.empty()) out << (all_pass ? "all checks passed" : "some checks failed") << "\n";
    return all_pass ? kSuccess : kVerificationFailed;
}

int cmd_sqrt(const RunConfig& cfg, std::ostream& out) {
    const auto start = Clock::now();
    if (cfg.input_path.empty()) throw ConfigError("in: --in is required");
    if (cfg.output_path.empty()) throw ConfigError("out: --out is required");
    const io::Format in_fmt = file_format(cfg, cfg.input_path);
    const ComplexMatrix raw = io::read_matrix(io::read_file(cfg.input_path), in_fmt);
    std::optional<HermitianPD> a;
    try {
        a.emplace(raw);
    } catch (const Error& e) {
        throw ConfigError(std::string("in: ") + e.what());
    }
    SqrtOptions opts{cfg.tol, cfg.max_iter};
    const HermitianPD s = hermitian_sqrt_newton(*a, opts);
    const double residual = max_abs(s.matrix() * s.matrix() - a->matrix());

    io::write_file_atomic(cfg.output_path, io::write_matrix(s.matrix(), file_format(cfg, cfg.output_path)));
    json meta = metadata(cfg, a->dim(), a->dim(), 1, io::sha256_hex(io::matrix_to_csv(a->matrix())), start);
    meta["residual"] = residual;
    meta["relative_residual"] = residual / std::max(1.0, max_abs(a->matrix()));
    io::write_file_atomic(cfg.output_path + ".meta.json", meta.dump(2) + "\n");
    out << "residual " << io::format_double(residual) << "\n";
    return kSuccess;
}

} // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{"normalization", "unitary_invariance", "corollary",
                                                "general_class", "normal_covariance"};
    return names;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Complex matrix angular central Gaussian distribution tools", "cmacg"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CMACG_VERSION);

    RunConfig cfg;
    std::optional<std::uint64_t> seed_flag;
    std::string checks_csv;

    auto add_dims = [&](CLI::App* sub) {
        sub->add_option("--m", cfg.m, "ambient dimension m");
        sub->add_option("--r", cfg.r, "frame size r");
    };
    auto add_param = [&](CLI::App* sub) {
        sub->add_option("--param", cfg.param_path, "parameter matrix P (CSV or .json)");
        sub->add_flag("--uniform", cfg.uniform, "use P = I_m");
    };

    CLI::App* sample = app.add_subcommand("sample", "draw from CMACG(P)");
    add_dims(sample);
    add_param(sample);
    sample->add_option("--n", cfg.n, "number of draws")->required();
    sample->add_option("--seed", seed_flag, "64-bit seed");
    sample->add_option("--out", cfg.output_path, "output file");
    sample->add_option("--format", cfg.format, "csv or json (default from extension)");
    sample->add_flag("--as-projection", cfg.as_projection, "write H H' instead of H");

    CLI::App* density = app.add_subcommand("density", "log-density of frames under CMACG(P)");
    add_dims(density);
    add_param(density);
    density->add_option("--in", cfg.input_path, "stacked frames");
    density->add_option("--out", cfg.output_path, "output file (default stdout)");
    density->add_option("--format", cfg.format, "input format, csv or json");

    CLI::App* verify = app.add_subcommand("verify", "run Monte Carlo checks");
    add_dims(verify);
    add_param(verify);
    cfg.n = 0;
    verify->add_option("--n", cfg.n, "draws per sample")->default_val(50000);
    verify->add_option("--seed", seed_flag, "64-bit seed");
    verify->add_option("--checks", checks_csv, "comma-separated check names");
    verify->add_option("--level", cfg.level, "family-wise significance level")->default_val(0.01);
    verify->add_option("--out", cfg.output_path, "report file (default stdout)");

    CLI::App* sqrt_cmd = app.add_subcommand("sqrt", "principal square root of a Hermitian PD matrix");
    sqrt_cmd->add_option("--in", cfg.input_path, "input matrix");
    sqrt_cmd->add_option("--out", cfg.output_path, "output matrix");
    sqrt_cmd->add_option("--format", cfg.format, "csv or json (default from extension)");
    sqrt_cmd->add_option("--tol", cfg.tol, "relative residual tolerance")->default_val(1e-12);
    sqrt_cmd->add_option("--max-iter", cfg.max_iter, "iteration limit")->default_val(100);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        cfg.seed = seed_flag ? *seed_flag : env_seed();
        if (!checks_csv.empty()) {
            std::stringstream ss(checks_csv);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) cfg.checks.push_back(item);
        }
        if (!cfg.format.empty()) io::parse_format(cfg.format);

        if (cfg.subcommand == "sample") return cmd_sample(cfg, out);
        if (cfg.subcommand == "density") return cmd_density(cfg, out);
        if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
        return cmd_sqrt(cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.is_numerical() ? kNumericalError : kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

} // namespace cmacg::cli
