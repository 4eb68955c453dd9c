// thinlab: numerical experiments on thin matrix groups. One binary with
// subcommands for ball enumeration, congruence scans, Cayley spectra,
// transfer-operator dimension estimates, orbit counting, and the sieve.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "thinlab/ball.hpp"
#include "thinlab/cayley.hpp"
#include "thinlab/config.hpp"
#include "thinlab/congruence_transfer.hpp"
#include "thinlab/counting.hpp"
#include "thinlab/residue.hpp"
#include "thinlab/sieve.hpp"
#include "thinlab/transfer.hpp"
#include "thinlab/walsh.hpp"

namespace {

using namespace thinlab;

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 1;
constexpr int kExitBudget = 2;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class Output {
public:
    Output(const std::string& path, const std::string& banner, bool partial) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file: " + path);
        }
        stream() << "# " << banner << "\n";
        if (partial) stream() << "# PARTIAL\n";
    }

    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct CommonArgs {
    std::string gens_path;
    std::string out_path;
    std::uint64_t budget = 0;    // 0: keep config value
    int threads = -1;            // -1: keep config value

    RunConfig load() const {
        RunConfig config = parse_config(gens_path);
        if (budget > 0) config.element_budget = budget;
        if (threads >= 0) config.threads = threads;
        return config;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--gens", args.gens_path, "generator config file")->required();
    cmd->add_option("--out", args.out_path, "output file (default: stdout)");
    cmd->add_option("--budget", args.budget, "element budget override");
    cmd->add_option("--threads", args.threads, "worker count override");
}

std::string banner(const std::string& what, const RunConfig& config,
                   const std::vector<std::string>& args) {
    // paths are not part of the computation's identity: the generator file
    // content is hashed through the config text, the output path not at all
    std::vector<std::string> hashed;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out" || args[i] == "--gens") {
            ++i;
            continue;
        }
        hashed.push_back(args[i]);
    }
    return "thinlab " + what + " config_hash=" + config_hash(config, hashed);
}

std::vector<double> parse_ladder(const std::string& text, double t_min, double t_max) {
    if (text.rfind("geometric:", 0) != 0)
        throw ConfigError("field ladder: expected geometric:RATIO");
    const double ratio = std::stod(text.substr(10));
    if (!(ratio > 1.0)) throw ConfigError("field ladder: ratio must exceed 1");
    return geometric_ladder(t_min, t_max, ratio);
}

std::vector<int> parse_depth_range(const std::string& text) {
    const auto dots = text.find("..");
    std::vector<int> out;
    if (dots == std::string::npos) {
        out.push_back(std::stoi(text));
        return out;
    }
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw ConfigError("field depths: bad range");
    for (int d = lo; d <= hi; ++d) out.push_back(d);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for thin subgroups of SL2(Z)"};
    app.require_subcommand(1);
    std::vector<std::string> raw_args(argv + 1, argv + argc);

    int exit_code = kExitOk;

    // --- ball ---------------------------------------------------------------
    CommonArgs ball_args;
    double ball_tmax = 10.0;
    auto* cmd_ball = app.add_subcommand("ball", "enumerate the group ball, stream CSV");
    add_common(cmd_ball, ball_args);
    cmd_ball->add_option("--tmax", ball_tmax, "norm threshold T")->required();
    cmd_ball->callback([&] {
        const RunConfig config = ball_args.load();
        const GeneratorSystem system = config.system();
        const BallEnumeration ball = enumerate_ball(system, ball_tmax, config.ball_options());
        Output out(ball_args.out_path, banner("ball", config, raw_args), ball.truncated);
        out.stream() << "word_length,a,b,c,d,norm_sq\n";
        for (std::uint32_t idx : ball.in_ball) {
            const BallEntry& e = ball.entries[idx];
            out.stream() << e.word_length << "," << e.element.a << "," << e.element.b << ","
                         << e.element.c << "," << e.element.d << "," << e.norm_sq << "\n";
        }
        if (ball.truncated) exit_code = kExitBudget;
    });

    // --- congruence scan ------------------------------------------------------
    auto* cmd_congruence = app.add_subcommand("congruence", "congruence reductions");
    CommonArgs scan_args;
    std::uint32_t scan_bound = 100;
    auto* cmd_scan = cmd_congruence->add_subcommand("scan", "bad-prime scan");
    add_common(cmd_scan, scan_args);
    cmd_scan->add_option("--primes-up-to", scan_bound, "scan primes p <= bound")->required();
    cmd_scan->callback([&] {
        const RunConfig config = scan_args.load();
        const GeneratorSystem system = config.system();
        const BadPrimeReport report = strong_approximation_scan(system, scan_bound);
        Output out(scan_args.out_path, banner("congruence scan", config, raw_args), false);
        out.stream() << "p,closure_size,sl2_order,is_full\n";
        for (const auto& [p, size] : report.closure_sizes) {
            const std::uint64_t order = sl2_order(SquareFreeModulus::make(p));
            out.stream() << p << "," << size << "," << order << ","
                         << (size == order ? 1 : 0) << "\n";
        }
    });

    // --- spectral -------------------------------------------------------------
    auto* cmd_spectral = app.add_subcommand("spectral", "Cayley graph spectra");
    CommonArgs gap_args;
    std::uint64_t gap_q = 3;
    double gap_tol = 1e-10;
    auto* cmd_gap = cmd_spectral->add_subcommand("gap", "spectral gap of the averaging operator");
    add_common(cmd_gap, gap_args);
    cmd_gap->add_option("--q", gap_q, "modulus")->required();
    cmd_gap->add_option("--tol", gap_tol, "residual tolerance");
    cmd_gap->callback([&] {
        const RunConfig config = gap_args.load();
        const GeneratorSystem system = config.system();
        const SquareFreeModulus q = SquareFreeModulus::make(validated_modulus(gap_q));
        const AveragingOperator op(system, q);
        const SpectrumReport report = spectral_gap(op, gap_tol);
        Output out(gap_args.out_path, banner("spectral gap", config, raw_args), false);
        out.stream() << "q,dim,lambda1,gap,iterations\n";
        out.stream() << report.q << "," << report.dim << "," << fmt(report.lambda_1) << ","
                     << fmt(report.gap) << "," << report.iterations << "\n";
    });

    CommonArgs flat_args;
    std::uint64_t flat_q = 3;
    int flat_lmax = 16;
    auto* cmd_flatten = cmd_spectral->add_subcommand("flatten", "L2 flattening profile");
    add_common(cmd_flatten, flat_args);
    cmd_flatten->add_option("--q", flat_q, "modulus")->required();
    cmd_flatten->add_option("--lmax", flat_lmax, "largest convolution power");
    cmd_flatten->callback([&] {
        const RunConfig config = flat_args.load();
        const GeneratorSystem system = config.system();
        const SquareFreeModulus q = SquareFreeModulus::make(validated_modulus(flat_q));
        const auto profile = flattening_profile(system, q, flat_lmax);
        Output out(flat_args.out_path, banner("spectral flatten", config, raw_args), false);
        out.stream() << "l,l2_norm\n";
        for (std::size_t l = 0; l < profile.size(); ++l)
            out.stream() << (l + 1) << "," << fmt(profile[l]) << "\n";
    });

    // --- thermo ----------------------------------------------------------------
    auto* cmd_thermo = app.add_subcommand("thermo", "transfer-operator experiments");
    CommonArgs delta_args;
    std::string delta_depths = "4..8";
    double delta_tol = 1e-6;
    auto* cmd_delta = cmd_thermo->add_subcommand("delta", "estimate the critical exponent");
    add_common(cmd_delta, delta_args);
    cmd_delta->add_option("--depths", delta_depths, "depth schedule, e.g. 4..8");
    cmd_delta->add_option("--tol", delta_tol, "bisection tolerance in s");
    cmd_delta->callback([&] {
        const RunConfig config = delta_args.load();
        const SubshiftSpec spec(config.system());
        const DeltaEstimate est =
            estimate_delta(spec, parse_depth_range(delta_depths), delta_tol,
                           CylinderGrid::kDefaultTailPad, config.threads);
        Output out(delta_args.out_path, banner("thermo delta", config, raw_args), false);
        out.stream() << "depth,cylinders,delta_hat,drift\n";
        for (const auto& row : est.rows)
            out.stream() << row.depth << "," << row.cylinders << "," << fmt(row.delta_hat)
                         << "," << fmt(row.drift) << "\n";
        const HolderFit holder = fit_holder_constants(spec, 2, 6);
        out.stream() << "# holder_fit rho=" << fmt(holder.rho)
                     << " tau_norm=" << fmt(holder.tau_norm) << "\n";
    });

    CommonArgs sector_args;
    std::uint64_t sector_q = 3;
    double sector_s = 0.5;
    int sector_depth = 5;
    auto* cmd_sector = cmd_thermo->add_subcommand("sector-gap", "congruence sector contraction");
    add_common(cmd_sector, sector_args);
    cmd_sector->add_option("--q", sector_q, "modulus")->required();
    cmd_sector->add_option("--s", sector_s, "transfer parameter s")->required();
    cmd_sector->add_option("--depth", sector_depth, "cylinder depth");
    cmd_sector->callback([&] {
        const RunConfig config = sector_args.load();
        const SubshiftSpec spec(config.system());
        const SectorGapReport report =
            congruence_sector_gap(spec, sector_depth, validated_modulus(sector_q), sector_s,
                                  CylinderGrid::kDefaultTailPad, config.threads);
        Output out(sector_args.out_path, banner("thermo sector-gap", config, raw_args), false);
        out.stream() << "q,dim,lambda,sector_radius,ratio\n";
        out.stream() << report.q << "," << report.dim << "," << fmt(report.lambda) << ","
                     << fmt(report.sector_radius) << "," << fmt(report.ratio) << "\n";
    });

    // --- count ------------------------------------------------------------------
    auto* cmd_count = app.add_subcommand("count", "orbit counting");
    CommonArgs cball_args;
    double cball_tmin = 2.0, cball_tmax = 200.0;
    std::string cball_ladder = "geometric:1.2";
    auto* cmd_cball = cmd_count->add_subcommand("ball", "ball counts along a ladder");
    add_common(cmd_cball, cball_args);
    cmd_cball->add_option("--tmax", cball_tmax, "top of the ladder")->required();
    cmd_cball->add_option("--tmin", cball_tmin, "bottom of the ladder");
    cmd_cball->add_option("--ladder", cball_ladder, "ladder spec, geometric:RATIO");
    cmd_cball->callback([&] {
        const RunConfig config = cball_args.load();
        const GeneratorSystem system = config.system();
        const auto ladder = parse_ladder(cball_ladder, cball_tmin, cball_tmax);
        const BallCountSeries series = orbit_count(system, ladder, config.ball_options());
        Output out(cball_args.out_path, banner("count ball", config, raw_args), series.truncated);
        out.stream() << "T,count\n";
        for (std::size_t i = 0; i < series.thresholds.size(); ++i)
            out.stream() << fmt(series.thresholds[i]) << "," << series.counts[i] << "\n";
        if (series.truncated) exit_code = kExitBudget;
    });

    CommonArgs ccong_args;
    double ccong_tmax = 200.0;
    std::uint64_t ccong_q = 3;
    auto* cmd_ccong = cmd_count->add_subcommand("cong", "per-class congruence counts");
    add_common(cmd_ccong, ccong_args);
    cmd_ccong->add_option("--tmax", ccong_tmax, "norm threshold")->required();
    cmd_ccong->add_option("--q", ccong_q, "modulus")->required();
    cmd_ccong->callback([&] {
        const RunConfig config = ccong_args.load();
        const GeneratorSystem system = config.system();
        const SquareFreeModulus q = SquareFreeModulus::make(validated_modulus(ccong_q));
        const BallEnumeration ball = enumerate_ball(system, ccong_tmax, config.ball_options());
        const CongruenceCountTable table = congruence_count(system, ball, q);
        Output out(ccong_args.out_path, banner("count cong", config, raw_args), ball.truncated);
        out.stream() << "xi_index,count,deviation\n";
        const double m = static_cast<double>(table.class_counts.size());
        for (std::size_t xi = 0; xi < table.class_counts.size(); ++xi) {
            const double rel = table.total ? static_cast<double>(table.class_counts[xi]) * m /
                                                     static_cast<double>(table.total) - 1.0
                                           : 0.0;
            out.stream() << xi << "," << table.class_counts[xi] << "," << fmt(rel) << "\n";
        }
        if (ball.truncated) exit_code = kExitBudget;
    });

    CommonArgs cfit_args;
    double cfit_tmin = 2.0, cfit_tmax = 200.0;
    std::string cfit_ladder = "geometric:1.2";
    auto* cmd_cfit = cmd_count->add_subcommand("fit", "log-log exponent fit");
    add_common(cmd_cfit, cfit_args);
    cmd_cfit->add_option("--tmax", cfit_tmax, "top of the ladder")->required();
    cmd_cfit->add_option("--tmin", cfit_tmin, "bottom of the ladder");
    cmd_cfit->add_option("--ladder", cfit_ladder, "ladder spec, geometric:RATIO");
    cmd_cfit->callback([&] {
        const RunConfig config = cfit_args.load();
        const GeneratorSystem system = config.system();
        const auto ladder = parse_ladder(cfit_ladder, cfit_tmin, cfit_tmax);
        const BallCountSeries series = orbit_count(system, ladder, config.ball_options());
        const ExponentFit fit = exponent_fit(series);
        Output out(cfit_args.out_path, banner("count fit", config, raw_args), series.truncated);
        out.stream() << "slope,intercept,max_residual,points\n";
        out.stream() << fmt(fit.slope) << "," << fmt(fit.intercept) << ","
                     << fmt(fit.max_residual) << "," << fit.points_used << "\n";
        if (series.truncated) exit_code = kExitBudget;
    });

    // --- sieve -------------------------------------------------------------------
    auto* cmd_sieve = app.add_subcommand("sieve", "affine linear sieve");
    CommonArgs sieve_args;
    std::string sieve_poly = "x12";
    int sieve_t = 1;
    double sieve_tmax = 200.0, sieve_z = 7.0, sieve_level = 1e5;
    int sieve_rmax = 6;
    std::uint32_t sieve_bad_bound = 100;
    auto* cmd_run = cmd_sieve->add_subcommand("run", "full sieve report");
    add_common(cmd_run, sieve_args);
    cmd_run->add_option("--poly", sieve_poly, "orbit polynomial over x11,x12,x21,x22");
    cmd_run->add_option("--t", sieve_t, "declared number of irreducible factors");
    cmd_run->add_option("--tmax", sieve_tmax, "norm threshold")->required();
    cmd_run->add_option("--z", sieve_z, "sift primes up to z");
    cmd_run->add_option("--level", sieve_level, "level D");
    cmd_run->add_option("--rmax", sieve_rmax, "largest r in the almost-prime table");
    cmd_run->add_option("--bad-bound", sieve_bad_bound, "strong-approximation scan bound");
    cmd_run->callback([&] {
        const RunConfig config = sieve_args.load();
        const GeneratorSystem system = config.system();
        const MatrixPolynomial poly = MatrixPolynomial::parse(sieve_poly);
        const BallEnumeration ball = enumerate_ball(system, sieve_tmax, config.ball_options());

        const BadPrimeReport bad = strong_approximation_scan(system, sieve_bad_bound);
        const OrbitPolynomial f = normalize_primitive(poly, sieve_t, system, ball);
        std::vector<std::uint32_t> excluded = bad.bad_primes;
        for (std::uint32_t p : primes_up_to(1000))
            if (mpz_fdiv_ui(f.normalization.get_mpz_t(), p) == 0 && !bad.contains(p))
                excluded.push_back(p);

        const SieveSequence seq = build_sieve_sequence(system, ball, sieve_tmax, f, excluded);
        const std::uint64_t sifted = exact_sifted_sum(seq, sieve_z);
        const BrunBounds bounds = fundamental_lemma_bounds(seq, sieve_z, sieve_level, sieve_t);
        const AlmostPrimeTable table = almost_prime_table(seq);
        const double defect = dimension_check_defect(system, f, 2.0,
                                                     std::max(10.0, sieve_z), excluded);

        Output out(sieve_args.out_path, banner("sieve run", config, raw_args), ball.truncated);
        auto& os = out.stream();
        os << "ball_count = " << seq.ball_count << "\n";
        os << "zero_values = " << seq.zero_count << "\n";
        os << "X = " << seq.X << "\n";
        os << "normalization = " << f.normalization.get_str() << "\n";
        os << "excluded_primes =";
        for (std::uint32_t p : excluded) os << " " << p;
        os << "\n";
        os << "z = " << fmt(sieve_z) << "\n";
        os << "level_D = " << fmt(sieve_level) << "\n";
        os << "exact_sifted_sum = " << sifted << "\n";
        os << "brun_lower = " << fmt(bounds.lower) << "\n";
        os << "brun_upper = " << fmt(bounds.upper) << "\n";
        os << "a2_defect = " << fmt(defect) << "\n";
        const auto remainders = remainder_table(system, seq, f, sieve_level);
        const std::uint64_t max_value =
            seq.values.empty() ? 0 : seq.values.rbegin()->first;
        double abs_remainder_sum = 0.0, populated_sum = 0.0;
        std::size_t populated = 0;
        for (const auto& row : remainders) {
            abs_remainder_sum += std::fabs(row.remainder);
            if (row.d <= max_value) {
                populated_sum += std::fabs(row.remainder);
                ++populated;
            }
        }
        os << "a1_remainder_sum_over_X = "
           << fmt(abs_remainder_sum / static_cast<double>(seq.X)) << "   # over "
           << remainders.size() << " square-free d\n";
        os << "a1_remainder_sum_over_X_populated = "
           << fmt(populated_sum / static_cast<double>(seq.X)) << "   # d <= max value, "
           << populated << " moduli\n";
        os << "almost_prime_table:\n";
        os << "r,count_exactly_r\n";
        os << "zero," << table.zero << "\n";
        for (const auto& [r, c] : table.exact_counts)
            if (r <= sieve_rmax) os << r << "," << c << "\n";
        if (table.unresolved) os << "unresolved," << table.unresolved << "\n";
        if (ball.truncated) exit_code = kExitBudget;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitPrecondition;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
    return exit_code;
}
