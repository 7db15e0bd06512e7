#include "invclt/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "invclt/bounds.hpp"
#include "invclt/coupling.hpp"
#include "invclt/distances.hpp"
#include "invclt/error.hpp"
#include "invclt/involution.hpp"
#include "invclt/matrix_io.hpp"
#include "invclt/verify.hpp"

namespace invclt {

using nlohmann::json;

std::vector<double> parse_p_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string token(text.substr(start, comma - start));
        std::erase_if(token, [](unsigned char c) { return std::isspace(c); });
        if (token == "inf" || token == "Inf" || token == "INF") {
            out.push_back(kInfinity);
        } else {
            double p = 0.0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), p);
            if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
                throw Error(ErrorCode::ParseError, "bad p value '" + token + "'");
            }
            if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must be at least 1 or inf");
            out.push_back(p);
        }
        start = comma + 1;
    }
    return out;
}

namespace {

json envelope(const std::string& command) { return json{{"schema", kSchemaVersion}, {"command", command}}; }

RunResult fail(int code, const std::string& message) { return RunResult{code, {}, message}; }

int exit_code_for(const Error& e) {
    return e.code() == ErrorCode::DegenerateArray ? kExitDegenerate : kExitInput;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void dump_draws(const RunConfig& config, const CenteredArray& d) {
    if (config.dump_draws == 0) return;
    json draws = json::array();
    for (const auto& z : leading_zero_bias_draws(d, config.dump_draws, config.seed)) draws.push_back(to_json(z));
    write_file(config.dump_file, draws.dump(2) + "\n");
}

CenteredArray load_array(const RunConfig& config, MomentSummary* summary) {
    if (!config.input) throw Error(ErrorCode::IoError, "--input is required");
    const SymmetricArray e = validate_and_symmetrize(read_matrix(*config.input), config.symmetrize);
    *summary = moments(e);
    return standardize(e);
}

}  // namespace

RunResult run_analyze(const RunConfig& config) {
    try {
        MomentSummary summary;
        const CenteredArray d = load_array(config, &summary);
        const int n = d.n();
        const bool exact = n <= config.cap;
        StepCDF f = exact ? step_cdf(exact_w_distribution(d, config.cap))
                          : ecdf(sample_w(d, config.draws, config.seed, config.threads));
        const DistanceReport dist = distance_report(f, config.p_list, exact, exact ? 0 : config.draws);
        const BoundReport bounds = theorem_bounds(d, config.p_list);

        json j = envelope("analyze");
        j["n"] = n;
        j["mu"] = summary.mu;
        j["sigma2"] = summary.sigma2;
        j["beta"] = d.beta();
        j["mode"] = exact ? "exact" : "mc";
        if (!exact) {
            j["seed"] = config.seed;
            j["draws"] = config.draws;
        }
        json b = json::object();
        for (const auto& [p, v] : bounds.bound) b[p_label(p)] = v;
        j["bounds"] = b;
        j["bound_report"] = to_json(bounds);
        j["distances"] = to_json(dist);

        if (config.emit_cdf) write_file(*config.emit_cdf, cdf_to_csv(f));
        if (config.dump_draws > 0 && n >= 6) dump_draws(config, d);
        return RunResult{kExitOk, j.dump(2) + "\n", {}};
    } catch (const Error& e) {
        return fail(exit_code_for(e), e.what());
    }
}

RunResult run_verify(const RunConfig& config) {
    std::vector<CheckRecord> records;
    try {
        records = run_checks(VerifyOptions{config.seed, config.only, config.threads});
    } catch (const Error& e) {
        return fail(kExitInput, e.what());
    }
    json j = envelope("verify");
    j["seed"] = config.seed;
    if (config.only) j["only"] = *config.only;
    json checks = json::array();
    bool all = true;
    for (const auto& r : records) {
        checks.push_back(to_json(r));
        all = all && r.pass;
    }
    j["checks"] = checks;
    j["pass"] = all;
    return RunResult{all ? kExitOk : kExitVerifyFailed, j.dump(2) + "\n", all ? "" : "verification failed"};
}

RunResult run_simulate(const RunConfig& config) {
    try {
        std::vector<int> ns = config.n_list.empty() ? std::vector<int>{10, 20, 50} : config.n_list;
        std::optional<CenteredArray> from_file;
        if (config.input) {
            MomentSummary summary;
            from_file = load_array(config, &summary);
            ns = {from_file->n()};
        }
        const double ps[] = {1.0, kInfinity};
        std::ostringstream out;
        out.precision(17);
        out << "n,beta,ks_mc,l1_mc,gap_mc,gap_stderr,ks_exact,l1_exact,bound_linf,bound_l1,gap_bound\n";
        for (int n : ns) {
            if (n < 6 || n % 2 != 0) {
                throw Error(n % 2 ? ErrorCode::OddDimension : ErrorCode::DimensionTooSmall,
                            "simulate needs even n >= 6, got " + std::to_string(n));
            }
            Rng array_rng(config.seed, 0xA77A0000ull + static_cast<std::uint64_t>(n));
            const CenteredArray d = from_file ? *from_file : random_centered_array(n, array_rng);
            const StepCDF f = ecdf(sample_w(d, config.draws, config.seed, config.threads));
            const GapEstimate gap = estimate_gap(d, config.draws, config.seed ^ 0x9A9ull, config.threads);
            const BoundReport b = theorem_bounds(d, ps);
            out << n << ',' << d.beta() << ',' << kolmogorov_distance(f) << ',' << l1_distance(f) << ','
                << gap.mean << ',' << gap.std_error << ',';
            if (n <= config.cap) {
                const StepCDF g = step_cdf(exact_w_distribution(d, config.cap));
                out << kolmogorov_distance(g) << ',' << l1_distance(g);
            } else {
                out << ',';
            }
            out << ',' << b.bound[1].second << ',' << b.bound[0].second << ',' << b.gap_bound << '\n';
            if (config.emit_cdf && from_file) write_file(*config.emit_cdf, cdf_to_csv(f));
            if (config.dump_draws > 0 && from_file) dump_draws(config, d);
        }
        return RunResult{kExitOk, out.str(), {}};
    } catch (const Error& e) {
        return fail(exit_code_for(e), e.what());
    }
}

RunResult run_lowerbound(const RunConfig& config) {
    try {
        const std::vector<int> ns = config.n_list.empty() ? std::vector<int>{64, 100, 196} : config.n_list;
        json j = envelope("lowerbound");
        j["seed"] = config.seed;
        j["draws"] = config.draws;
        j["epsilon"] = kLowerBoundEpsilon;
        j["confidence"] = kLowerBoundConfidence;
        json rows = json::array();
        std::string csv = lower_bound_csv_header();
        bool all = true;
        for (int n : ns) {
            const LowerBoundReport r = lower_bound_experiment(n, config.draws, config.seed, config.threads);
            rows.push_back(to_json(r));
            csv += lower_bound_csv_row(r);
            all = all && r.passes && r.lattice_ok;
        }
        j["experiments"] = rows;
        j["pass"] = all;
        if (config.csv) write_file(*config.csv, csv);
        return RunResult{all ? kExitOk : kExitVerifyFailed, j.dump(2) + "\n", all ? "" : "floor not reached"};
    } catch (const Error& e) {
        return fail(exit_code_for(e), e.what());
    }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normal approximation diagnostics for statistics of random fixed-point-free involutions"};
    app.require_subcommand(1);
    RunConfig config;
    std::string p_text = "1,2,inf";
    std::string seed_text;
    std::string dump_file;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed_text, "64-bit seed (decimal or 0x hex)");
        sub->add_option("--threads", config.threads, "worker threads, 0 = hardware");
        sub->add_option("--output", config.output, "write the report here instead of stdout");
    };
    auto array_input = [&](CLI::App* sub) {
        sub->add_option("--input", config.input, "matrix file, CSV or JSON");
        sub->add_flag("--symmetrize", config.symmetrize, "average e_ij and e_ji and drop the diagonal");
        sub->add_option("--draws", config.draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
        sub->add_option("--p", p_text, "comma-separated p values, e.g. 1,2,inf");
        sub->add_option("--cap", config.cap, "exact enumeration when n <= cap");
        sub->add_option("--emit-cdf", config.emit_cdf, "write (t, F, Phi) CSV at the jump points");
        sub->add_option("--dump-draws", config.dump_draws, "write the first K zero-bias draws as JSON");
        sub->add_option("--dump-file", dump_file, "destination for --dump-draws");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "moments, distances and bounds for one array");
    common(analyze);
    array_input(analyze);
    CLI::App* verify = app.add_subcommand("verify", "run the exact verification suite");
    common(verify);
    verify->add_option("--only", config.only, "run one check family");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo distances and coupling gap against the bounds");
    common(simulate);
    array_input(simulate);
    simulate->add_option("--n", config.n_list, "dimensions")->delimiter(',');
    CLI::App* lowerbound = app.add_subcommand("lowerbound", "lattice lower-bound experiment");
    common(lowerbound);
    lowerbound->add_option("--n", config.n_list, "dimensions")->delimiter(',');
    lowerbound->add_option("--draws", config.draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
    lowerbound->add_option("--csv", config.csv, "write sweep rows as CSV");

    config.draws = 0;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (!seed_text.empty()) {
            std::size_t used = 0;
            config.seed = std::stoull(seed_text, &used, 0);
            if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
        }
        config.p_list = parse_p_list(p_text);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception&) {
        err << "error: bad --seed '" << seed_text << "'\n";
        return kExitInput;
    }
    if (!dump_file.empty()) config.dump_file = dump_file;

    RunResult result;
    if (analyze->parsed()) {
        config.command = "analyze";
        if (config.draws == 0) config.draws = 100'000;
        result = run_analyze(config);
    } else if (verify->parsed()) {
        config.command = "verify";
        result = run_verify(config);
    } else if (simulate->parsed()) {
        config.command = "simulate";
        if (config.draws == 0) config.draws = 100'000;
        result = run_simulate(config);
    } else {
        config.command = "lowerbound";
        if (config.draws == 0) config.draws = 200'000;
        result = run_lowerbound(config);
    }

    if (!result.output.empty()) {
        if (config.output) {
            try {
                write_file(*config.output, result.output);
            } catch (const Error& e) {
                err << "error: " << e.what() << '\n';
                return kExitInput;
            }
        } else {
            out << result.output;
        }
    }
    if (!result.error.empty()) err << "error: " << result.error << '\n';
    return result.exit_code;
}

}  // namespace invclt
