#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relfacts/interpret.hpp"
#include "relfacts/oracle.hpp"
#include "relfacts/report.hpp"
#include "relfacts/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    out = buffer.str();
    return true;
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("RELFACTS_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const std::uint64_t value = std::strtoull(raw, &end, 10);
    if (errno == ERANGE || end == raw || *end != '\0') {
        std::cerr << "relfacts: RELFACTS_SEED is not an unsigned integer\n";
        std::exit(kExitUsage);
    }
    return value;
}

int report_parse_error(const std::string& path, const relfacts::scn::ParseError& error) {
    std::cerr << path << ":" << error.line << ":" << error.column << ": " << error.message;
    if (!error.expected.empty()) {
        std::cerr << " (expected: ";
        for (std::size_t i = 0; i < error.expected.size(); ++i) {
            if (i != 0) std::cerr << ", ";
            std::cerr << error.expected[i];
        }
        std::cerr << ")";
    }
    std::cerr << "\n";
    return kExitUsage;
}

std::vector<relfacts::Complex> parse_amplitudes_or_exit(const std::string& flag,
                                                        const std::string& text) {
    auto parsed = relfacts::scn::parse_complex_list(text);
    if (const auto* error = std::get_if<relfacts::scn::ParseError>(&parsed)) {
        std::cerr << "relfacts: bad value for " << flag << ": " << error->message << "\n";
        std::exit(kExitUsage);
    }
    return std::get<std::vector<relfacts::Complex>>(parsed);
}

std::vector<std::size_t> parse_index_list_or_exit(const std::string& flag,
                                                  const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        errno = 0;
        char* end = nullptr;
        const unsigned long long value = std::strtoull(item.c_str(), &end, 10);
        if (errno == ERANGE || end == item.c_str() || *end != '\0') {
            std::cerr << "relfacts: bad value for " << flag << ": '" << item
                      << "' is not an unsigned integer\n";
            std::exit(kExitUsage);
        }
        out.push_back(static_cast<std::size_t>(value));
    }
    if (out.empty()) {
        std::cerr << "relfacts: " << flag << " needs at least one entry\n";
        std::exit(kExitUsage);
    }
    return out;
}

int run_scenario(const std::string& path, std::optional<std::uint64_t> seed_flag,
                 const std::string& format, double threshold) {
    std::string source;
    if (!read_file(path, source)) {
        std::cerr << "relfacts: cannot read '" << path << "'\n";
        return kExitIo;
    }
    auto parsed = relfacts::scn::parse(source);
    if (const auto* error = std::get_if<relfacts::scn::ParseError>(&parsed)) {
        return report_parse_error(path, *error);
    }

    relfacts::scn::InterpretOptions options;
    options.stability_threshold = threshold;
    if (seed_flag) {
        options.seed_override = seed_flag;
    } else if (auto env = env_seed()) {
        options.seed_override = env;
    }

    relfacts::scn::ReportFormat report_format = relfacts::scn::ReportFormat::kText;
    if (format == "json") report_format = relfacts::scn::ReportFormat::kJson;
    if (format == "csv") report_format = relfacts::scn::ReportFormat::kCsv;

    try {
        const relfacts::scn::ScenarioResult result =
            relfacts::scn::interpret(std::get<relfacts::scn::ScenarioAst>(parsed), options);
        std::cout << relfacts::scn::render_report(result, report_format);
        return kExitOk;
    } catch (const relfacts::Error& e) {
        std::cerr << path << ": " << e.what() << "\n";
        return kExitRuntime;
    }
}

int validate_scenario(const std::string& path) {
    std::string source;
    if (!read_file(path, source)) {
        std::cerr << "relfacts: cannot read '" << path << "'\n";
        return kExitIo;
    }
    auto parsed = relfacts::scn::parse(source);
    if (const auto* error = std::get_if<relfacts::scn::ParseError>(&parsed)) {
        return report_parse_error(path, *error);
    }
    return kExitOk;
}

void print_matrix(const std::vector<relfacts::Complex>& flat, std::size_t n) {
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (c != 0) std::cout << " ";
            std::cout << relfacts::scn::format_complex(flat[r * n + c]);
        }
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relfacts: observer-relative quantum measurement scenarios"};
    app.require_subcommand(1);

    // run
    std::string run_path;
    std::string run_format = "text";
    double run_threshold = relfacts::kDefaultStabilityThreshold;
    std::optional<std::uint64_t> run_seed;
    CLI::App* run = app.add_subcommand("run", "execute a .scn scenario and print a report");
    run->add_option("path", run_path, "scenario file")->required();
    run->add_option("--seed", run_seed, "override the scenario seed (RELFACTS_SEED as fallback)");
    run->add_option("--format", run_format, "report format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    run->add_option("--threshold", run_threshold, "stability threshold (default 1e-6)");

    // validate
    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "parse and static-check a scenario");
    validate->add_option("path", validate_path, "scenario file")->required();

    // oracle
    CLI::App* oracle = app.add_subcommand("oracle", "brute-force reference computations");
    oracle->require_subcommand(1);

    std::string chain_wba, chain_wcb;
    CLI::App* chain = oracle->add_subcommand("chain", "amplitude-chain probabilities");
    chain->add_option("--wba", chain_wba, "W(b_i,a) amplitudes, comma separated")->required();
    chain->add_option("--wcb", chain_wcb, "W(c,b_i) amplitudes, comma separated")->required();

    std::string trace_dims = "2,2";
    std::string trace_keep = "0";
    std::string trace_ket;
    std::string trace_fixture = "bell";
    CLI::App* trace = oracle->add_subcommand("trace", "naive partial trace of a pure state");
    trace->add_option("--dims", trace_dims, "subsystem dimensions, comma separated");
    trace->add_option("--keep", trace_keep, "subsystem indices to keep, comma separated");
    trace->add_option("--ket", trace_ket, "state amplitudes, comma separated");
    trace->add_option("--fixture", trace_fixture, "named state when --ket is absent")
        ->check(CLI::IsMember({"bell"}));

    std::string stab_diag, stab_ket, stab_target;
    CLI::App* stability = oracle->add_subcommand("stability", "naive stability deviation");
    stability->add_option("--diag", stab_diag, "diagonal density weights, comma separated");
    stability->add_option("--ket", stab_ket, "pure state amplitudes, comma separated");
    stability->add_option("--target", stab_target, "target ray amplitudes (default uniform)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (run->parsed()) {
        return run_scenario(run_path, run_seed, run_format, run_threshold);
    }
    if (validate->parsed()) {
        return validate_scenario(validate_path);
    }

    using relfacts::Complex;
    if (chain->parsed()) {
        const auto wba = parse_amplitudes_or_exit("--wba", chain_wba);
        const auto wcb = parse_amplitudes_or_exit("--wcb", chain_wcb);
        if (wba.size() != wcb.size()) {
            std::cerr << "relfacts: --wba and --wcb need the same length\n";
            return kExitUsage;
        }
        const auto probes = relfacts::oracle::chain_probes(wba, wcb);
        std::cout << "p_unitary = " << relfacts::scn::format_double(probes.p_unitary) << "\n";
        std::cout << "p_collapse = " << relfacts::scn::format_double(probes.p_collapse) << "\n";
        std::cout << "deficit = " << relfacts::scn::format_double(probes.deficit) << "\n";
        std::cout << "cross_terms = " << relfacts::scn::format_double(probes.cross_terms) << "\n";
        return kExitOk;
    }

    if (trace->parsed()) {
        const auto dims = parse_index_list_or_exit("--dims", trace_dims);
        const auto keep = parse_index_list_or_exit("--keep", trace_keep);
        std::size_t n = 1;
        for (std::size_t d : dims) n *= d;
        std::vector<Complex> ket;
        if (!trace_ket.empty()) {
            ket = parse_amplitudes_or_exit("--ket", trace_ket);
        } else {
            // (|0..0> + |1..1>)/sqrt(2) on two qubits
            ket.assign(4, Complex{0.0, 0.0});
            ket[0] = ket[3] = Complex{1.0 / std::sqrt(2.0), 0.0};
        }
        if (ket.size() != n) {
            std::cerr << "relfacts: ket has " << ket.size() << " amplitudes but dims give " << n
                      << "\n";
            return kExitUsage;
        }
        for (std::size_t k : keep) {
            if (k >= dims.size()) {
                std::cerr << "relfacts: keep index " << k << " is out of range\n";
                return kExitUsage;
            }
        }
        std::vector<Complex> rho(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                rho[i * n + j] = ket[i] * std::conj(ket[j]);
            }
        }
        const std::vector<Complex> out = relfacts::oracle::partial_trace_naive(rho, dims, keep);
        std::size_t out_dim = 1;
        for (std::size_t k : keep) out_dim *= dims[k];
        print_matrix(out, out_dim);
        return kExitOk;
    }

    if (stability->parsed()) {
        if (stab_diag.empty() == stab_ket.empty()) {
            std::cerr << "relfacts: pass exactly one of --diag or --ket\n";
            return kExitUsage;
        }
        std::vector<Complex> rho;
        std::size_t n = 0;
        if (!stab_diag.empty()) {
            const auto weights = parse_amplitudes_or_exit("--diag", stab_diag);
            n = weights.size();
            double total = 0.0;
            for (const Complex& w : weights) {
                if (w.imag() != 0.0 || w.real() < 0.0) {
                    std::cerr << "relfacts: --diag weights must be non-negative reals\n";
                    return kExitUsage;
                }
                total += w.real();
            }
            if (total <= 0.0) {
                std::cerr << "relfacts: --diag weights must not all vanish\n";
                return kExitUsage;
            }
            rho.assign(n * n, Complex{0.0, 0.0});
            for (std::size_t i = 0; i < n; ++i) rho[i * n + i] = weights[i].real() / total;
        } else {
            const auto ket = parse_amplitudes_or_exit("--ket", stab_ket);
            n = ket.size();
            double norm_sq = 0.0;
            for (const Complex& a : ket) norm_sq += std::norm(a);
            if (norm_sq <= 0.0) {
                std::cerr << "relfacts: --ket must not be the zero vector\n";
                return kExitUsage;
            }
            rho.assign(n * n, Complex{0.0, 0.0});
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    rho[i * n + j] = ket[i] * std::conj(ket[j]) / norm_sq;
                }
            }
        }

        std::vector<Complex> target_ray(n, Complex{1.0, 0.0});
        if (!stab_target.empty()) target_ray = parse_amplitudes_or_exit("--target", stab_target);
        if (target_ray.size() != n) {
            std::cerr << "relfacts: --target dimension mismatch\n";
            return kExitUsage;
        }
        double tnorm_sq = 0.0;
        for (const Complex& a : target_ray) tnorm_sq += std::norm(a);
        if (tnorm_sq <= 0.0) {
            std::cerr << "relfacts: --target must not be the zero vector\n";
            return kExitUsage;
        }
        std::vector<Complex> target(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                target[i * n + j] = target_ray[i] * std::conj(target_ray[j]) / tnorm_sq;
            }
        }
        std::vector<std::vector<Complex>> projectors;
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<Complex> p(n * n, Complex{0.0, 0.0});
            p[k * n + k] = 1.0;
            projectors.push_back(std::move(p));
        }
        const double deviation =
            relfacts::oracle::stability_deviation_naive(rho, projectors, target, n);
        std::cout << "deviation = " << relfacts::scn::format_double(deviation) << "\n";
        return kExitOk;
    }

    return kExitUsage;
}
